#include "multithresh/aggregate.hpp"

#include "multithresh/error.hpp"
#include "multithresh/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace multithresh {

LossSpec
LossSpec::regression(int grid_size)
{
  return { LossKind::regression_quadratic, 0.0, 1.0, 1.0, grid_size };
}

LossSpec
LossSpec::density(double B, int grid_size)
{
  if (!(B >= 1.0) || !std::isfinite(B))
    throw Error(ErrorCode::invalid_bound, "density bound B must be >= 1");
  return { LossKind::density_quadratic, 0.0, B, B, grid_size };
}

SampleSplit
split_sample(long n)
{
  if (n < kMinSampleSize)
    throw Error(ErrorCode::n_too_small, "n=" + std::to_string(n) + " below 16");
  const double nn = static_cast<double>(n);
  const long l = static_cast<long>(std::ceil(nn / std::log(nn)));
  return { n - l, l };
}

std::vector<int>
threshold_grid(long n, int j1)
{
  const int top = std::min(static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))), j1);
  std::vector<int> grid(static_cast<std::size_t>(std::max(top, 0) + 1));
  std::iota(grid.begin(), grid.end(), 0);
  return grid;
}

double
empirical_risk(const LossSpec& loss, const Evaluable& f, const RegressionSample& data)
{
  if (loss.kind != LossKind::regression_quadratic)
    throw Error(ErrorCode::shape_mismatch, "regression data needs the regression loss");
  if (data.size() == 0)
    throw Error(ErrorCode::empty_data, "learning sample is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = data.y()[i] - f(data.x()[i]);
    sum += r * r;
  }
  return sum / static_cast<double>(data.size());
}

double
empirical_risk(const LossSpec& loss, const Evaluable& f, const DensitySample& data)
{
  if (loss.kind != LossKind::density_quadratic)
    throw Error(ErrorCode::shape_mismatch, "density data needs the density loss");
  if (data.size() == 0)
    throw Error(ErrorCode::empty_data, "learning sample is empty");
  double integral = 0.0;
  for (double x : midpoint_grid(loss.grid_size)) {
    const double v = f(x);
    integral += v * v;
  }
  integral /= loss.grid_size;
  double mean = 0.0;
  for (double z : data.x())
    mean += f(z);
  mean /= static_cast<double>(data.size());
  return integral - 2.0 * mean;
}

void
AggregationWeights::validate() const
{
  if (w.empty())
    throw Error(ErrorCode::shape_mismatch, "empty weight vector");
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0))
      throw Error(ErrorCode::invalid_argument, "negative or NaN weight");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error(ErrorCode::invalid_argument, "weights do not sum to one");
}

AggregationWeights
aew_weights(std::span<const double> risks, long l)
{
  if (risks.size() < 2)
    throw Error(ErrorCode::invalid_argument, "exponential weights need at least two candidates");
  if (l < 1)
    throw Error(ErrorCode::invalid_argument, "learning sample size must be positive");
  for (double r : risks)
    if (!std::isfinite(r))
      throw Error(ErrorCode::non_finite_risk, "candidate risk is not finite");

  const double lowest = *std::min_element(risks.begin(), risks.end());
  const double scale = static_cast<double>(l);
  AggregationWeights weights;
  weights.w.reserve(risks.size());
  double total = 0.0;
  for (double r : risks) {
    const double e = std::exp(-scale * (r - lowest));
    weights.w.push_back(e);
    total += e;
  }
  for (double& v : weights.w)
    v /= total;
  return weights;
}

std::size_t
erm_select(std::span<const double> risks)
{
  if (risks.empty())
    throw Error(ErrorCode::invalid_argument, "no candidates to select from");
  return static_cast<std::size_t>(std::min_element(risks.begin(), risks.end()) - risks.begin());
}

CandidateEstimator::CandidateEstimator(WaveletFamily family,
                                       ThresholdPlan plan,
                                       WaveletExpansion expansion,
                                       double a,
                                       double b,
                                       const BasisTable& quadrature)
  : family_(std::move(family))
  , plan_(std::move(plan))
  , expansion_(std::move(expansion))
  , a_(a)
  , b_(b)
{
  cache(quadrature);
}

CandidateEstimator::CandidateEstimator(WaveletFamily family,
                                       ThresholdPlan plan,
                                       WaveletExpansion expansion,
                                       double a,
                                       double b,
                                       int grid_size)
  : family_(std::move(family))
  , plan_(std::move(plan))
  , expansion_(std::move(expansion))
  , a_(a)
  , b_(b)
{
  const auto grid = midpoint_grid(grid_size);
  cache(BasisTable(family_, grid, expansion_.j_max));
}

void
CandidateEstimator::cache(const BasisTable& quadrature)
{
  if (!(a_ < b_))
    throw Error(ErrorCode::invalid_argument, "clip interval needs a < b");
  if (expansion_.tau != family_.tau())
    throw Error(ErrorCode::shape_mismatch, "expansion tau differs from the family's");
  grid_values_ = evaluate(quadrature);
  double sum = 0.0;
  for (double v : grid_values_)
    sum += v * v;
  integral_sq_ = grid_values_.empty() ? 0.0 : sum / static_cast<double>(grid_values_.size());
}

std::vector<double>
CandidateEstimator::evaluate(const BasisTable& table) const
{
  auto values = table.synthesize(expansion_);
  for (double& v : values)
    v = clip(v, a_, b_);
  return values;
}

std::vector<double>
CandidateEstimator::evaluate(std::span<const double> points) const
{
  return evaluate(BasisTable(family_, points, expansion_.j_max));
}

double
CandidateEstimator::operator()(double x) const
{
  return evaluate(std::span<const double>(&x, 1)).front();
}

// A convex combination of values in [a,b] stays there up to rounding; undo
// the last-ulp overshoot so the mixture honours the clip range exactly.
void
MixtureEstimator::clamp(std::vector<double>& values) const
{
  double lo = candidates_.front().lo();
  double hi = candidates_.front().hi();
  for (const auto& c : candidates_) {
    lo = std::min(lo, c.lo());
    hi = std::max(hi, c.hi());
  }
  for (double& v : values)
    v = clip(v, lo, hi);
}

MixtureEstimator::MixtureEstimator(std::vector<CandidateEstimator> candidates,
                                   AggregationWeights weights)
  : candidates_(std::move(candidates))
  , weights_(std::move(weights))
{
  weights_.validate();
  if (candidates_.size() != weights_.w.size())
    throw Error(ErrorCode::shape_mismatch, "one weight per candidate is required");
  const auto grid = candidates_.front().grid_values().size();
  for (const auto& c : candidates_)
    if (c.grid_values().size() != grid)
      throw Error(ErrorCode::shape_mismatch, "candidates use different quadrature grids");
}

std::vector<double>
MixtureEstimator::evaluate(std::span<const double> points) const
{
  std::vector<double> out(points.size(), 0.0);
  if (points.empty())
    return out;
  // Candidates share the family, so one table serves all of them.
  int j_max = candidates_.front().expansion().j_max;
  for (const auto& c : candidates_)
    j_max = std::max(j_max, c.expansion().j_max);
  const BasisTable table(candidates_.front().family(), points, j_max);
  for (std::size_t u = 0; u < candidates_.size(); ++u) {
    const double w = weights_.w[u];
    if (w == 0.0)
      continue;
    const auto values = candidates_[u].evaluate(table);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] += w * values[i];
  }
  clamp(out);
  return out;
}

double
MixtureEstimator::operator()(double x) const
{
  return evaluate(std::span<const double>(&x, 1)).front();
}

std::vector<double>
MixtureEstimator::grid_values() const
{
  std::vector<double> out(candidates_.front().grid_values().size(), 0.0);
  for (std::size_t u = 0; u < candidates_.size(); ++u) {
    const double w = weights_.w[u];
    const auto values = candidates_[u].grid_values();
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] += w * values[i];
  }
  clamp(out);
  return out;
}

MixtureEstimator
aggregate_mixture(std::vector<CandidateEstimator> candidates, AggregationWeights weights)
{
  return MixtureEstimator(std::move(candidates), std::move(weights));
}

Scheme
parse_scheme(std::string_view name)
{
  if (name == "aew" || name == "AEW")
    return Scheme::aew;
  if (name == "erm" || name == "ERM")
    return Scheme::erm;
  throw Error(ErrorCode::unsupported_name, "unknown aggregation scheme '" + std::string(name) + "'");
}

const char*
to_string(Scheme scheme)
{
  return scheme == Scheme::aew ? "AEW" : "ERM";
}

namespace {

// Index order of the observations: identity, or a seeded permutation.
std::vector<std::size_t>
split_order(std::size_t n, const SplitOptions& split)
{
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{ 0 });
  if (split.shuffle) {
    Rng rng(split.seed);
    for (std::size_t i = n - 1; i > 0; --i)
      std::swap(order[i], order[rng.below(i + 1)]);
  }
  return order;
}

struct Prepared
{
  std::vector<double> train_x;
  std::vector<double> train_y; // empty for density
  std::vector<double> learn_x;
  std::vector<double> learn_y;
};

Prepared
partition(std::span<const double> x, std::span<const double> y, long m, const SplitOptions& split)
{
  const auto order = split_order(x.size(), split);
  Prepared p;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const bool train = i < static_cast<std::size_t>(m);
    (train ? p.train_x : p.learn_x).push_back(x[order[i]]);
    if (!y.empty())
      (train ? p.train_y : p.learn_y).push_back(y[order[i]]);
  }
  return p;
}

MultiThresholdResult
run_pipeline(std::span<const double> x,
             std::span<const double> y,
             const WaveletFamily& family,
             const ThresholdRule& rule,
             const LossSpec& loss,
             double rho,
             Scheme scheme,
             const SplitOptions& split)
{
  const bool density = loss.kind == LossKind::density_quadratic;
  const long n = static_cast<long>(x.size());
  const auto [m, l] = split_sample(n);
  const int j1 = j1_level(n);
  const int tau = family.tau();
  if (j1 < tau)
    throw Error(ErrorCode::invalid_level_range,
                "n=" + std::to_string(n) + " gives j1=" + std::to_string(j1) +
                  " below tau=" + std::to_string(tau) + " for " + family.name());
  if (!(rho > 0.0))
    throw Error(ErrorCode::invalid_argument, "rho must be positive");

  const Prepared parts = partition(x, y, m, split);

  const BasisTable train_table(family, parts.train_x, j1);
  const WaveletExpansion raw = density ? train_table.mean_coefficients()
                                       : train_table.mean_coefficients(parts.train_y);
  const auto grid = midpoint_grid(loss.grid_size);
  const BasisTable quadrature(family, grid, j1);
  const BasisTable learn_table(family, parts.learn_x, j1);

  MultiThresholdDiagnostics diag;
  diag.n = n;
  diag.m = m;
  diag.l = l;
  diag.tau = tau;
  diag.j1 = j1;
  diag.rho = rho;
  diag.scheme = scheme;
  diag.u_grid = threshold_grid(n, j1);

  std::vector<CandidateEstimator> candidates;
  candidates.reserve(diag.u_grid.size());
  for (int u : diag.u_grid) {
    auto plan = make_plan(rho, u, tau, j1, static_cast<int>(m));
    auto expansion = threshold_expansion(raw, plan, rule);
    candidates.emplace_back(family, std::move(plan), std::move(expansion), loss.a, loss.b, quadrature);

    const auto at_learn = candidates.back().evaluate(learn_table);
    double risk = 0.0;
    if (density) {
      double mean = 0.0;
      for (double v : at_learn)
        mean += v;
      risk = candidates.back().integral_sq() - 2.0 * mean / static_cast<double>(l);
    } else {
      for (std::size_t i = 0; i < at_learn.size(); ++i) {
        const double r = parts.learn_y[i] - at_learn[i];
        risk += r * r;
      }
      risk /= static_cast<double>(l);
    }
    diag.risks.push_back(risk);
  }

  diag.aew_weights = aew_weights(diag.risks, l);
  diag.erm_index = erm_select(diag.risks);

  AggregationWeights used = diag.aew_weights;
  if (scheme == Scheme::erm) {
    used.w.assign(candidates.size(), 0.0);
    used.w[diag.erm_index] = 1.0;
  }
  return { aggregate_mixture(std::move(candidates), std::move(used)), std::move(diag) };
}

} // namespace

MultiThresholdResult
multi_threshold_estimate(const DensitySample& data,
                         const WaveletFamily& family,
                         const ThresholdRule& rule,
                         const LossSpec& loss,
                         double rho,
                         Scheme scheme,
                         const SplitOptions& split)
{
  if (loss.kind != LossKind::density_quadratic)
    throw Error(ErrorCode::shape_mismatch, "density data needs the density loss");
  return run_pipeline(data.x(), {}, family, rule, loss, rho, scheme, split);
}

MultiThresholdResult
multi_threshold_estimate(const RegressionSample& data,
                         const WaveletFamily& family,
                         const ThresholdRule& rule,
                         const LossSpec& loss,
                         double rho,
                         Scheme scheme,
                         const SplitOptions& split)
{
  if (loss.kind != LossKind::regression_quadratic)
    throw Error(ErrorCode::shape_mismatch, "regression data needs the regression loss");
  return run_pipeline(data.x(), data.y(), family, rule, loss, rho, scheme, split);
}

BetaConstants
beta_constants(double c, double K)
{
  if (!(c > 0.0) || !(K >= 1.0))
    throw Error(ErrorCode::invalid_argument, "beta constants need c > 0 and K >= 1");
  const double ln2 = std::numbers::ln2;
  const double beta1 = std::min({ ln2 / (96.0 * c * K),
                                  3.0 * std::sqrt(ln2) / (16.0 * K * std::numbers::sqrt2),
                                  1.0 / (8.0 * (4.0 * c + K / 3.0)),
                                  1.0 / (576.0 * c) });
  const double beta2 = std::min({ 1.0 / 8.0,
                                  3.0 * ln2 / (32.0 * K),
                                  1.0 / (2.0 * (16.0 * c + K / 3.0)),
                                  beta1 / 2.0 });
  return { beta1, beta2 };
}

TheoryConstants
TheoryConstants::for_model(Model model, double B)
{
  TheoryConstants t;
  t.kappa = 1.0;
  if (model == Model::regression) {
    t.c = 16.0;
    t.K = 1.0;
  } else {
    if (!(B >= 1.0))
      throw Error(ErrorCode::invalid_bound, "density bound B must be >= 1");
    t.c = 16.0 * B * B;
    t.K = loss_difference_bound(Model::density, B);
  }
  const auto [b1, b2] = beta_constants(t.c, t.K);
  t.beta1 = b1;
  t.beta2 = b2;
  return t;
}

double
gamma_residual(long n, long M, double kappa, double gap, double c, double K)
{
  if (n < 1 || M < 2 || !(kappa >= 1.0) || !(gap >= 0.0))
    throw Error(ErrorCode::invalid_argument, "gamma residual needs n >= 1, M >= 2, kappa >= 1, gap >= 0");
  const auto [beta1, beta2] = beta_constants(c, K);
  const double log_m = std::log(static_cast<double>(M));
  const double nn = static_cast<double>(n);
  const double exponent = kappa / (2.0 * kappa - 1.0);
  if (gap >= std::pow(log_m / (beta1 * nn), exponent))
    return std::sqrt(std::pow(gap, 1.0 / kappa) * log_m / (beta1 * nn));
  return std::pow(log_m / (beta2 * nn), exponent);
}

} // namespace multithresh
