#include "multithresh/eval.hpp"

#include "multithresh/error.hpp"
#include "multithresh/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

namespace multithresh {

namespace {

std::string
real(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double
mean_of(std::span<const double> v)
{
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Standard error of the mean.
double
stderr_of(std::span<const double> v)
{
  if (v.size() < 2)
    return 0.0;
  const double mu = mean_of(v);
  double ss = 0.0;
  for (double x : v)
    ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

template<typename Sample>
CandidateEstimator
universal_candidate(const Sample& data,
                    std::span<const double> weights,
                    const WaveletFamily& family,
                    const ThresholdRule& rule,
                    const LossSpec& loss)
{
  const long n = static_cast<long>(data.size());
  const int j1 = j1_level(n);
  if (j1 < family.tau())
    throw Error(ErrorCode::invalid_level_range, "sample too small for " + family.name());
  const double nn = static_cast<double>(n);
  const double sigma = loss.kind == LossKind::density_quadratic ? std::sqrt(loss.B) : 1.0;
  const double lambda = sigma * std::sqrt(2.0 * std::log(nn) / nn);

  ThresholdPlan plan{ -1, 0.0, family.tau(), j1, static_cast<int>(n), {} };
  plan.t.assign(static_cast<std::size_t>(j1 - family.tau() + 1), lambda);
  const BasisTable table(family, data.x(), j1);
  auto raw = table.mean_coefficients(weights);
  auto thresholded = threshold_expansion(raw, plan, rule);
  return CandidateEstimator(family, std::move(plan), std::move(thresholded), loss.a, loss.b,
                            loss.grid_size);
}

// Parallel for over [0, count) with deterministic output slots.
template<typename Body>
void
parallel_for(std::size_t count, int threads, Body&& body)
{
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr failure;
  std::atomic<bool> failed{ false };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true))
            failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

std::vector<std::string>
split(std::string_view text, char sep)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

} // namespace

double
mise_on_grid(std::span<const double> values, const TargetFunction& target)
{
  if (values.empty())
    throw Error(ErrorCode::empty_data, "no estimator values");
  const double size = static_cast<double>(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - target.f((static_cast<double>(i) + 0.5) / size);
    sum += d * d;
  }
  return sum / size;
}

double
mise(const Evaluable& estimator, const TargetFunction& target, int grid_size)
{
  if (grid_size < 1024)
    throw Error(ErrorCode::invalid_argument, "risk quadrature needs at least 2^10 points");
  const auto grid = midpoint_grid(grid_size);
  std::vector<double> values(grid.size());
  std::transform(grid.begin(), grid.end(), values.begin(), estimator);
  return mise_on_grid(values, target);
}

void
ExperimentConfig::validate() const
{
  if (ns.empty())
    throw Error(ErrorCode::config_invalid, "no sample sizes given");
  for (long n : ns)
    if (n < kMinSampleSize)
      throw Error(ErrorCode::config_invalid, "sample size " + std::to_string(n) + " below 16");
  if (reps < 1)
    throw Error(ErrorCode::config_invalid, "reps must be at least 1");
  if (rho && !(*rho > 0.0))
    throw Error(ErrorCode::config_invalid, "rho override must be positive");
  if (grid_size < 1024)
    throw Error(ErrorCode::config_invalid, "grid size must be at least 1024");
}

std::uint64_t
replication_seed(std::uint64_t root, long n, int rep)
{
  return derive_seed(derive_seed(root, static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(rep));
}

double
theory_rho(Model model, double B, const WaveletFamily& family)
{
  return min_rho(model == Model::density ? B : 1.0, family.psi_sup(), model);
}

CandidateEstimator
universal_threshold_candidate(const DensitySample& data,
                              const WaveletFamily& family,
                              const ThresholdRule& rule,
                              const LossSpec& loss)
{
  return universal_candidate(data, {}, family, rule, loss);
}

CandidateEstimator
universal_threshold_candidate(const RegressionSample& data,
                              const WaveletFamily& family,
                              const ThresholdRule& rule,
                              const LossSpec& loss)
{
  return universal_candidate(data, data.y(), family, rule, loss);
}

ExperimentResult
run_replication(const ExperimentConfig& config,
                const WaveletFamily& family,
                const TargetFunction& target,
                long n,
                int rep)
{
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult row;
  row.model = config.model;
  row.target = target.name;
  row.family = family.name();
  row.rule = config.rule;
  row.n = n;
  row.rep = rep;
  row.seed = replication_seed(config.root_seed, n, rep);
  row.B = target.B;

  const bool density = config.model == Model::density;
  const LossSpec loss = density ? LossSpec::density(target.B, config.grid_size)
                                : LossSpec::regression(config.grid_size);
  row.rho = config.rho ? *config.rho : theory_rho(config.model, target.B, family);
  const auto rule = ThresholdRule::certified(config.rule);
  const SplitOptions split{ config.shuffle_split, derive_seed(row.seed, 2) };

  auto run = [&](const auto& sample) {
    auto result = multi_threshold_estimate(sample, family, rule, loss, row.rho, Scheme::aew, split);
    const auto& diag = result.diagnostics;
    row.m = diag.m;
    row.l = diag.l;
    row.j1 = diag.j1;
    row.weights = diag.aew_weights.w;
    row.erm_index = diag.erm_index;
    for (const auto& c : result.estimator.candidates())
      row.candidate_risks.push_back(mise_on_grid(c.grid_values(), target));
    row.aew_risk = mise_on_grid(result.estimator.grid_values(), target);
    row.erm_risk = row.candidate_risks[diag.erm_index];
    row.universal_risk = std::numeric_limits<double>::quiet_NaN();
    if (config.universal_baseline)
      row.universal_risk =
        mise_on_grid(universal_threshold_candidate(sample, family, rule, loss).grid_values(), target);
  };
  if (density)
    run(sample_density(target, n, row.seed));
  else
    run(sample_regression(target, n, config.noise, row.seed));

  row.wall_time =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<ExperimentResult>
monte_carlo(const ExperimentConfig& config)
{
  config.validate();
  const auto family = WaveletFamily::build(config.family, config.cascade_depth);
  const auto target = find_target(config.model, config.target);
  const std::size_t reps = static_cast<std::size_t>(config.reps);
  std::vector<ExperimentResult> rows(config.ns.size() * reps);
  parallel_for(rows.size(), config.threads, [&](std::size_t i) {
    rows[i] = run_replication(config, family, target, config.ns[i / reps],
                              static_cast<int>(i % reps));
  });
  return rows;
}

SlopeFit
rate_slope(std::span<const long> ns, std::span<const double> mean_risks)
{
  if (ns.size() != mean_risks.size() || ns.size() < 3)
    throw Error(ErrorCode::invalid_argument, "slope fit needs at least three (n, risk) pairs");
  const std::size_t k = ns.size();
  std::vector<double> x(k);
  std::vector<double> y(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (ns[i] <= 0 || !(mean_risks[i] > 0.0))
      throw Error(ErrorCode::invalid_argument, "slope fit needs positive n and risks");
    x[i] = std::log(static_cast<double>(ns[i]));
    y[i] = std::log(mean_risks[i]);
  }
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0))
    throw Error(ErrorCode::degenerate_x, "all sample sizes are equal");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ssr += r * r;
  }
  fit.std_error = k > 2 ? std::sqrt(ssr / static_cast<double>(k - 2) / sxx) : 0.0;
  return fit;
}

MomentReport
check_moment(const WaveletFamily& family,
             const TargetFunction& target,
             std::span<const int> levels,
             std::span<const long> ns,
             int reps,
             std::uint64_t seed)
{
  if (levels.empty() || ns.size() < 3 || reps < 2)
    throw Error(ErrorCode::invalid_argument, "moment check needs levels, three sizes and two reps");
  const int tau = family.tau();
  const int top = std::max(tau, *std::max_element(levels.begin(), levels.end()));
  for (int j : levels)
    if (j < tau - 1)
      throw Error(ErrorCode::invalid_level_range, "level below tau - 1");
  const auto truth = analyze(family, target.f, top, 1 << 16);

  MomentReport report;
  report.ns.assign(ns.begin(), ns.end());
  report.reps = reps;
  for (int j : levels)
    report.levels.push_back({ j, {}, false, {}, 0.0, false });

  // per level: log-moment variance per n, for the delta-method slope error
  std::vector<std::vector<double>> log_var(levels.size());
  for (long n : ns) {
    std::vector<std::vector<double>> per_rep(levels.size(), std::vector<double>(static_cast<std::size_t>(reps)));
    for (int r = 0; r < reps; ++r) {
      const auto sample = sample_density(target, n, replication_seed(seed, n, r));
      const auto est = BasisTable(family, sample.x(), top).mean_coefficients();
      for (std::size_t li = 0; li < levels.size(); ++li) {
        const int j = levels[li];
        const auto hat = j == tau - 1 ? std::span<const double>(est.alpha) : est.level(j);
        const auto ref = j == tau - 1 ? std::span<const double>(truth.alpha) : truth.level(j);
        double acc = 0.0;
        for (std::size_t k = 0; k < hat.size(); ++k) {
          const double d = hat[k] - ref[k];
          acc += d * d * d * d;
        }
        per_rep[li][static_cast<std::size_t>(r)] = acc / static_cast<double>(hat.size());
      }
    }
    for (std::size_t li = 0; li < levels.size(); ++li) {
      const double m = mean_of(per_rep[li]);
      const double se = stderr_of(per_rep[li]);
      report.levels[li].moment.push_back(m);
      log_var[li].push_back(m > 0.0 ? (se / m) * (se / m) : 0.0);
    }
  }

  std::vector<double> logn;
  for (long n : ns)
    logn.push_back(std::log(static_cast<double>(n)));
  const double mx = mean_of(logn);
  double sxx = 0.0;
  for (double v : logn)
    sxx += (v - mx) * (v - mx);

  bool any = false;
  bool all = true;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    auto& lvl = report.levels[li];
    // A moment indistinguishable from zero means the coefficient has no
    // sampling noise (e.g. the Haar scaling coefficient).
    lvl.zero_variance = std::any_of(lvl.moment.begin(), lvl.moment.end(),
                                    [](double m) { return !(m > 1e-300); });
    if (lvl.zero_variance)
      continue;
    lvl.fit = rate_slope(ns, lvl.moment);
    double var = 0.0;
    for (std::size_t i = 0; i < logn.size(); ++i) {
      const double c = (logn[i] - mx) / sxx;
      var += c * c * log_var[li][i];
    }
    lvl.mc_slope_stderr = std::sqrt(var);
    lvl.pass = lvl.fit.slope >= -2.3 && lvl.fit.slope <= -1.7;
    any = true;
    all = all && lvl.pass;
  }
  report.pass = any && all;
  return report;
}

DeviationReport
check_deviation(const WaveletFamily& family,
                const TargetFunction& target,
                double rho,
                std::span<const int> a_values,
                long n,
                int reps,
                std::uint64_t seed)
{
  if (!(rho > 0.0) || reps < 1 || a_values.empty())
    throw Error(ErrorCode::invalid_argument, "deviation check needs rho > 0, reps and a values");
  const int tau = family.tau();
  const int j1 = j1_level(n);
  const auto truth = analyze(family, target.f, j1, 1 << 16);
  const double scale = 2.0 * std::sqrt(static_cast<double>(n));

  std::vector<double> cut;
  for (int a : a_values)
    cut.push_back(rho * std::sqrt(static_cast<double>(std::max(a, 0))));

  // exceed[a][flat (j,k)]
  const std::size_t coeffs = (std::size_t{ 1 } << (j1 + 1)) - (std::size_t{ 1 } << tau);
  std::vector<std::vector<long>> exceed(a_values.size(), std::vector<long>(coeffs, 0));
  for (int r = 0; r < reps; ++r) {
    const auto sample = sample_density(target, n, replication_seed(seed, n, r));
    const auto est = BasisTable(family, sample.x(), j1).mean_coefficients();
    std::size_t flat = 0;
    for (int j = tau; j <= j1; ++j) {
      const auto hat = est.level(j);
      const auto ref = truth.level(j);
      for (std::size_t k = 0; k < hat.size(); ++k, ++flat) {
        const double dev = scale * std::abs(hat[k] - ref[k]);
        for (std::size_t ai = 0; ai < cut.size(); ++ai)
          if (dev >= cut[ai])
            ++exceed[ai][flat];
      }
    }
  }

  DeviationReport report;
  report.n = n;
  report.reps = reps;
  report.rho = rho;
  report.a_values.assign(a_values.begin(), a_values.end());
  report.pass = true;
  for (std::size_t ai = 0; ai < a_values.size(); ++ai) {
    const long worst = *std::max_element(exceed[ai].begin(), exceed[ai].end());
    const double freq = static_cast<double>(worst) / reps;
    const double bound = std::exp2(-4.0 * a_values[ai]);
    const double allowance = bound + 3.0 * std::sqrt(bound * (1.0 - bound) / reps);
    report.exceedances.push_back(worst);
    report.frequency.push_back(freq);
    report.bound.push_back(bound);
    report.allowance.push_back(allowance);
    report.pass = report.pass && freq <= allowance;
  }
  return report;
}

OracleReport
oracle_report(std::span<const ExperimentResult> results,
              const TheoryConstants& constants,
              double epsilon)
{
  if (results.empty())
    throw Error(ErrorCode::empty_data, "no experiment rows");
  if (!(epsilon > 0.0))
    throw Error(ErrorCode::invalid_argument, "epsilon must be positive");
  const auto& first = results.front();
  for (const auto& row : results)
    if (row.model != first.model || row.target != first.target || row.n != first.n ||
        row.M() != first.M() || row.l != first.l)
      throw Error(ErrorCode::mixed_configuration,
                  "oracle report needs rows from a single (model, target, n)");
  if (first.M() < 2)
    throw Error(ErrorCode::invalid_argument, "oracle inequality needs M >= 2 candidates");

  OracleReport report;
  report.model = first.model;
  report.target = first.target;
  report.n = first.n;
  report.l = first.l;
  report.M = first.M();
  report.reps = static_cast<int>(results.size());
  report.epsilon = epsilon;

  std::vector<double> aew;
  std::vector<double> erm;
  for (const auto& row : results) {
    aew.push_back(row.aew_risk);
    erm.push_back(row.erm_risk);
  }
  report.lhs = mean_of(aew);
  report.lhs_stderr = stderr_of(aew);
  report.erm_lhs = mean_of(erm);

  report.min_candidate = std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < report.M; ++u) {
    double sum = 0.0;
    for (const auto& row : results)
      sum += row.candidate_risks[u];
    const double m = sum / static_cast<double>(results.size());
    if (m < report.min_candidate) {
      report.min_candidate = m;
      report.best_index = u;
    }
  }

  const double base = 4.0 * std::log(static_cast<double>(report.M)) /
                      (constants.beta2 * static_cast<double>(report.l));
  auto rhs_at = [&](double eps) { return (1.0 + eps) * report.min_candidate + base / eps; };
  report.residual = base / epsilon;
  report.rhs = rhs_at(epsilon);
  report.pass = report.lhs <= report.rhs && report.erm_lhs <= report.rhs;
  report.ratio = report.min_candidate > 0.0 ? report.lhs / report.min_candidate
                                            : std::numeric_limits<double>::infinity();
  report.sharp_pass = report.lhs <= 1.1 * report.min_candidate + 2.0 * report.lhs_stderr;

  report.best_rhs = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 120; ++i) {
    const double eps = std::pow(10.0, -3.0 + 0.05 * i);
    const double value = rhs_at(eps);
    if (value < report.best_rhs) {
      report.best_rhs = value;
      report.best_epsilon = eps;
    }
  }
  return report;
}

namespace {

constexpr const char* kResultsHeader =
  "model,target,family,rule,n,m,l,j1,M,rep,seed,B,rho,aew_risk,erm_risk,erm_u,"
  "universal_risk,candidate_risks,weights";

std::string
join(std::span<const double> values)
{
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i)
      out += ';';
    out += real(values[i]);
  }
  return out;
}

double
to_real(const std::string& text, long line)
{
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size())
      throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    if (text == "nan")
      return std::numeric_limits<double>::quiet_NaN();
    throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": bad number '" + text + "'");
  }
}

std::vector<double>
to_reals(const std::string& text, long line)
{
  std::vector<double> out;
  for (const auto& part : split(text, ';'))
    out.push_back(to_real(part, line));
  return out;
}

} // namespace

void
write_results_csv(std::ostream& out, std::span<const ExperimentResult> results)
{
  out << kResultsHeader << '\n';
  for (const auto& r : results) {
    out << to_string(r.model) << ',' << r.target << ',' << r.family << ',' << to_string(r.rule)
        << ',' << r.n << ',' << r.m << ',' << r.l << ',' << r.j1 << ',' << r.M() << ',' << r.rep
        << ',' << r.seed << ',' << real(r.B) << ',' << real(r.rho) << ',' << real(r.aew_risk)
        << ',' << real(r.erm_risk) << ',' << r.erm_index << ',' << real(r.universal_risk) << ','
        << join(r.candidate_risks) << ',' << join(r.weights) << '\n';
  }
}

std::vector<ExperimentResult>
read_results_csv(std::istream& in)
{
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader)
    throw Error(ErrorCode::parse_error, "line 1: unexpected results header");
  std::vector<ExperimentResult> rows;
  long number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty())
      continue;
    const auto f = split(line, ',');
    if (f.size() != 19)
      throw Error(ErrorCode::parse_error, "line " + std::to_string(number) + ": expected 19 fields");
    try {
      ExperimentResult r;
      r.model = parse_model(f[0]);
      r.target = f[1];
      r.family = f[2];
      r.rule = parse_rule(f[3]);
      r.n = std::stol(f[4]);
      r.m = std::stol(f[5]);
      r.l = std::stol(f[6]);
      r.j1 = std::stoi(f[7]);
      const auto M = std::stoul(f[8]);
      r.rep = std::stoi(f[9]);
      r.seed = std::stoull(f[10]);
      r.B = to_real(f[11], number);
      r.rho = to_real(f[12], number);
      r.aew_risk = to_real(f[13], number);
      r.erm_risk = to_real(f[14], number);
      r.erm_index = std::stoul(f[15]);
      r.universal_risk = to_real(f[16], number);
      r.candidate_risks = to_reals(f[17], number);
      r.weights = to_reals(f[18], number);
      if (r.candidate_risks.size() != M || r.weights.size() != M)
        throw Error(ErrorCode::parse_error, "line " + std::to_string(number) + ": list length differs from M");
      rows.push_back(std::move(r));
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse_error, "line " + std::to_string(number) + ": malformed row");
    }
  }
  return rows;
}

} // namespace multithresh
