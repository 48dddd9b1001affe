#pragma once

#include "multithresh/aggregate.hpp"
#include "multithresh/sim.hpp"
#include "multithresh/threshold.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace multithresh {

//! Midpoint quadrature of (estimator - target)^2 on grid_size points.
double mise(const Evaluable& estimator, const TargetFunction& target, int grid_size);

//! Same, for estimator values already tabulated on midpoint_grid(size).
double mise_on_grid(std::span<const double> values, const TargetFunction& target);

struct ExperimentConfig
{
  Model model = Model::density;
  std::string target = "triangle";
  std::string family = "haar";
  int cascade_depth = 12;
  RuleKind rule = RuleKind::hard;
  Scheme scheme = Scheme::aew;
  std::optional<double> rho; // empty: theory value from min_rho
  std::vector<long> ns;
  int reps = 1;
  std::uint64_t root_seed = 42;
  int grid_size = kDefaultGridSize;
  Noise noise;
  bool shuffle_split = false;
  bool universal_baseline = true;
  int threads = 1;

  void validate() const;
};

struct ExperimentResult
{
  Model model = Model::density;
  std::string target;
  std::string family;
  RuleKind rule = RuleKind::hard;
  long n = 0;
  long m = 0;
  long l = 0;
  int j1 = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  double B = 1.0;
  double rho = 0.0;
  std::vector<double> candidate_risks; // true L2 risk per u in the grid
  double aew_risk = 0.0;
  double erm_risk = 0.0;
  std::size_t erm_index = 0;
  double universal_risk = 0.0; // NaN when the baseline is disabled
  std::vector<double> weights;
  double wall_time = 0.0; // seconds; not serialized

  std::size_t M() const { return candidate_risks.size(); }
};

//! Seed of replication rep at sample size n under root.
std::uint64_t replication_seed(std::uint64_t root, long n, int rep);

//! Theory rho for a configuration: min_rho(B, psi_sup, model).
double theory_rho(Model model, double B, const WaveletFamily& family);

ExperimentResult run_replication(const ExperimentConfig& config,
                                 const WaveletFamily& family,
                                 const TargetFunction& target,
                                 long n,
                                 int rep);

//! reps replications for every n, ordered by (n, rep).
std::vector<ExperimentResult> monte_carlo(const ExperimentConfig& config);

//! Single hard-thresholded estimator on the full sample with the level-free
//! threshold sigma sqrt(2 ln n / n), sigma^2 = B (density) or 1
//! (regression), clipped like the candidates. Its plan carries u = -1.
CandidateEstimator universal_threshold_candidate(const DensitySample& data,
                                                 const WaveletFamily& family,
                                                 const ThresholdRule& rule,
                                                 const LossSpec& loss);
CandidateEstimator universal_threshold_candidate(const RegressionSample& data,
                                                 const WaveletFamily& family,
                                                 const ThresholdRule& rule,
                                                 const LossSpec& loss);

struct SlopeFit
{
  double slope = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
};

//! Least squares of ln(risk) on ln(n).
SlopeFit rate_slope(std::span<const long> ns, std::span<const double> mean_risks);

struct MomentLevel
{
  int level;                   // tau - 1 stands for the scaling coefficients
  std::vector<double> moment;  // E|beta_hat - beta|^4, averaged over k, per n
  bool zero_variance = false;  // excluded from the slope test
  SlopeFit fit;
  double mc_slope_stderr = 0.0; // Monte Carlo error of the slope (delta method)
  bool pass = false;
};

struct MomentReport
{
  std::vector<long> ns;
  int reps = 0;
  std::vector<MomentLevel> levels;
  bool pass = false;
};

//! Fourth-moment decay of the empirical density coefficients; a level passes
//! when its log-log slope lies in [-2.3, -1.7].
MomentReport check_moment(const WaveletFamily& family,
                          const TargetFunction& target,
                          std::span<const int> levels,
                          std::span<const long> ns,
                          int reps,
                          std::uint64_t seed);

struct DeviationReport
{
  long n = 0;
  int reps = 0;
  double rho = 0.0;
  std::vector<int> a_values;
  std::vector<long> exceedances; // worst (j,k) count per a
  std::vector<double> frequency; // exceedances / reps
  std::vector<double> bound;     // 2^{-4a}
  std::vector<double> allowance; // bound + 3 binomial standard errors
  bool pass = false;
};

//! Frequencies of {2 sqrt(n) |beta_hat - beta| >= rho sqrt(a)} over levels
//! tau..j1(n), maximized over (j, k).
DeviationReport check_deviation(const WaveletFamily& family,
                                const TargetFunction& target,
                                double rho,
                                std::span<const int> a_values,
                                long n,
                                int reps,
                                std::uint64_t seed);

struct OracleReport
{
  Model model = Model::density;
  std::string target;
  long n = 0;
  long l = 0;
  std::size_t M = 0;
  int reps = 0;
  double epsilon = 1.0;
  double lhs = 0.0;          // mean AEW risk
  double lhs_stderr = 0.0;
  double erm_lhs = 0.0;      // mean ERM risk
  double min_candidate = 0.0;
  std::size_t best_index = 0;
  double residual = 0.0;     // 4 ln M / (eps beta2 l)
  double rhs = 0.0;
  bool pass = false;         // both AEW and ERM satisfy lhs <= rhs
  double ratio = 0.0;        // lhs / min_candidate
  bool sharp_pass = false;   // lhs <= 1.1 min_candidate + 2 lhs_stderr
  double best_epsilon = 1.0; // minimizer of rhs over the epsilon scan
  double best_rhs = 0.0;
};

OracleReport oracle_report(std::span<const ExperimentResult> results,
                           const TheoryConstants& constants,
                           double epsilon);

//! Rates CSV: header plus one row per replication; lists are ';'-joined and
//! reals use 17 significant digits.
void write_results_csv(std::ostream& out, std::span<const ExperimentResult> results);
std::vector<ExperimentResult> read_results_csv(std::istream& in);

} // namespace multithresh
