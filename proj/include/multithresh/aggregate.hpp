#pragma once

#include "multithresh/estimate.hpp"
#include "multithresh/threshold.hpp"
#include "multithresh/wavelet.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace multithresh {

//! Quadrature grid size used for every integral over [0,1].
inline constexpr int kDefaultGridSize = 1 << 14;

enum class LossKind
{
  regression_quadratic, // Q((x,y), f) = (y - f(x))^2
  density_quadratic,    // Q(z, f) = int f^2 - 2 f(z)
};

//! Loss plus the clipping interval [a, b] of the candidate class.
struct LossSpec
{
  LossKind kind = LossKind::regression_quadratic;
  double a = 0.0;
  double b = 1.0;
  double B = 1.0;
  int grid_size = kDefaultGridSize;

  static LossSpec regression(int grid_size = kDefaultGridSize);
  static LossSpec density(double B, int grid_size = kDefaultGridSize);

  Model model() const
  {
    return kind == LossKind::density_quadratic ? Model::density : Model::regression;
  }
};

inline double
clip(double value, double a, double b)
{
  return value < a ? a : (value > b ? b : value);
}

struct SampleSplit
{
  long m; // training part, builds the candidates
  long l; // learning part, builds the weights
};

//! l = ceil(n / ln n), m = n - l.
SampleSplit split_sample(long n);

//! Offsets u of the candidate thresholds: {0, ..., min(ceil(log2 n), j1)}.
std::vector<int> threshold_grid(long n, int j1);

using Evaluable = std::function<double(double)>;

//! (1/l) sum (Y_i - f(X_i))^2 for regression.
double empirical_risk(const LossSpec& loss, const Evaluable& f, const RegressionSample& data);

//! int f^2 (midpoint rule, loss.grid_size points) - (2/l) sum f(Z_i).
double empirical_risk(const LossSpec& loss, const Evaluable& f, const DensitySample& data);

struct AggregationWeights
{
  std::vector<double> w;

  //! Nonnegative, summing to one within 1e-12.
  void validate() const;
};

//! w_u proportional to exp(-l * risk_u), computed with a max shift.
AggregationWeights aew_weights(std::span<const double> risks, long l);

//! Smallest index attaining the minimum risk.
std::size_t erm_select(std::span<const double> risks);

//! A thresholded expansion clipped to [a, b], with its values cached on the
//! midpoint quadrature grid.
class CandidateEstimator
{
public:
  //! quadrature must be a BasisTable over midpoint_grid(G) covering the
  //! expansion's levels.
  CandidateEstimator(WaveletFamily family,
                     ThresholdPlan plan,
                     WaveletExpansion expansion,
                     double a,
                     double b,
                     const BasisTable& quadrature);

  CandidateEstimator(WaveletFamily family,
                     ThresholdPlan plan,
                     WaveletExpansion expansion,
                     double a,
                     double b,
                     int grid_size = kDefaultGridSize);

  const WaveletFamily& family() const { return family_; }
  int u() const { return plan_.u; }
  const ThresholdPlan& plan() const { return plan_; }
  const WaveletExpansion& expansion() const { return expansion_; }
  double lo() const { return a_; }
  double hi() const { return b_; }
  std::span<const double> grid_values() const { return grid_values_; }
  double integral_sq() const { return integral_sq_; }

  double operator()(double x) const;
  std::vector<double> evaluate(std::span<const double> points) const;
  //! Clipped values at the points of a prebuilt table.
  std::vector<double> evaluate(const BasisTable& table) const;

private:
  void cache(const BasisTable& quadrature);

  WaveletFamily family_;
  ThresholdPlan plan_;
  WaveletExpansion expansion_;
  double a_;
  double b_;
  std::vector<double> grid_values_;
  double integral_sq_ = 0.0;
};

//! x -> sum_u w_u h_{a,b}(candidate_u(x)).
class MixtureEstimator
{
public:
  MixtureEstimator(std::vector<CandidateEstimator> candidates, AggregationWeights weights);

  double operator()(double x) const;
  std::vector<double> evaluate(std::span<const double> points) const;
  //! Mixture on the candidates' shared quadrature grid.
  std::vector<double> grid_values() const;

  const std::vector<CandidateEstimator>& candidates() const { return candidates_; }
  const AggregationWeights& weights() const { return weights_; }

private:
  void clamp(std::vector<double>& values) const;

  std::vector<CandidateEstimator> candidates_;
  AggregationWeights weights_;
};

MixtureEstimator aggregate_mixture(std::vector<CandidateEstimator> candidates,
                                   AggregationWeights weights);

enum class Scheme
{
  aew,
  erm,
};

Scheme parse_scheme(std::string_view name);
const char* to_string(Scheme scheme);

//! The default split takes the first m observations for training. With
//! shuffle set, a seeded random subset of size m trains instead.
struct SplitOptions
{
  bool shuffle = false;
  std::uint64_t seed = 0;
};

struct MultiThresholdDiagnostics
{
  long n = 0;
  long m = 0;
  long l = 0;
  int tau = 0;
  int j1 = 0;
  double rho = 0.0;
  Scheme scheme = Scheme::aew;
  std::vector<int> u_grid;
  std::vector<double> risks;      // empirical risks on the learning part
  AggregationWeights aew_weights; // exponential weights (reported for both schemes)
  std::size_t erm_index = 0;

  std::size_t M() const { return u_grid.size(); }
};

struct MultiThresholdResult
{
  MixtureEstimator estimator; // AEW mixture, or the ERM pick with weight one
  MultiThresholdDiagnostics diagnostics;
};

MultiThresholdResult multi_threshold_estimate(const DensitySample& data,
                                              const WaveletFamily& family,
                                              const ThresholdRule& rule,
                                              const LossSpec& loss,
                                              double rho,
                                              Scheme scheme,
                                              const SplitOptions& split = {});

MultiThresholdResult multi_threshold_estimate(const RegressionSample& data,
                                              const WaveletFamily& family,
                                              const ThresholdRule& rule,
                                              const LossSpec& loss,
                                              double rho,
                                              Scheme scheme,
                                              const SplitOptions& split = {});

struct BetaConstants
{
  double beta1;
  double beta2;
};

BetaConstants beta_constants(double c, double K);

//! Margin exponent kappa, margin constant c, loss bound K and the derived
//! beta constants for one model.
struct TheoryConstants
{
  double kappa = 1.0;
  double c = 16.0;
  double K = 1.0;
  double beta1 = 0.0;
  double beta2 = 0.0;

  //! Regression: c = 16, K = 1. Density: c = 16 B^2, K = B^2 + 2B.
  static TheoryConstants for_model(Model model, double B);
};

//! Residual of the exact oracle inequality; gap is min_f A(f) - A*.
double gamma_residual(long n, long M, double kappa, double gap, double c, double K);

} // namespace multithresh
