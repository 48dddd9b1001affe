#include "cli.hpp"

#include "multithresh/error.hpp"
#include "multithresh/eval.hpp"
#include "multithresh/random.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace multithresh::cli {

namespace {

std::string
real(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Flat run configuration shared by every subcommand; each field is both a
// flag and a key of the --config file.
struct RunConfig
{
  std::string model = "density";
  std::string target = "triangle";
  std::string family = "haar";
  int depth = 12;
  std::string rule = "hard";
  std::string scheme = "AEW";
  std::string rho = "theory";
  std::vector<long> ns;
  std::optional<int> reps;
  std::uint64_t seed = 42;
  int grid = kDefaultGridSize;
  std::string noise = "bernoulli";
  bool shuffle = false;
  int threads = 1;
  std::optional<double> bound;
  std::string output;
};

struct CheckOptions
{
  double c = 16.0;
  double K = 1.0;
  double step = 0.01;
  double range = 10.0;
  std::vector<double> u_grid{ 0.1, 0.5, 1.0, 2.0 };
  std::vector<int> levels;
  std::vector<int> a_values{ 1, 2, 3, 4 };
  std::string results;
  double epsilon = 1.0;
};

struct EstimateOptions
{
  std::string input;
  bool candidates = false;
  std::string diagnostics;
};

// Output sink: a file, or out when the path is empty or "-".
class Sink
{
public:
  Sink(const std::string& path, std::ostream& fallback)
    : stream_(&fallback)
  {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_)
        throw Error(ErrorCode::config_invalid, "cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::optional<double>
rho_override(const RunConfig& run)
{
  if (run.rho == "theory")
    return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(run.rho, &used);
    if (used == run.rho.size() && v > 0.0 && std::isfinite(v))
      return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::config_invalid, "rho must be 'theory' or a positive number");
}

ExperimentConfig
experiment(const RunConfig& run, std::vector<long> default_ns, int default_reps)
{
  ExperimentConfig config;
  config.model = parse_model(run.model);
  config.target = run.target;
  config.family = run.family;
  config.cascade_depth = run.depth;
  config.rule = parse_rule(run.rule);
  config.scheme = parse_scheme(run.scheme);
  config.rho = rho_override(run);
  config.ns = run.ns.empty() ? std::move(default_ns) : run.ns;
  config.reps = run.reps.value_or(default_reps);
  config.root_seed = run.seed;
  config.grid_size = run.grid;
  config.noise = Noise::parse(run.noise);
  config.shuffle_split = run.shuffle;
  config.threads = run.threads;
  config.validate();
  // surface unknown names as configuration errors before any work starts
  find_target(config.model, config.target);
  WaveletFamily::build(config.family, config.cascade_depth);
  return config;
}

std::string
summary_path(const std::string& path)
{
  const std::string suffix = ".csv";
  if (path.size() > suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return path.substr(0, path.size() - suffix.size()) + ".summary.csv";
  return path + ".summary.csv";
}

double
mean(const std::vector<double>& v)
{
  double s = 0.0;
  for (double x : v)
    s += x;
  return s / static_cast<double>(v.size());
}

double
sem(const std::vector<double>& v)
{
  if (v.size() < 2)
    return 0.0;
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v)
    ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

int
cmd_simulate(const RunConfig& run, std::ostream& out)
{
  const auto config = experiment(run, { 1024 }, 1);
  const auto target = find_target(config.model, config.target);
  const long n = config.ns.front();
  // same draw as replication 0 of a rates run at this n
  const auto seed = replication_seed(config.root_seed, n, 0);
  Sink sink(run.output, out);
  if (config.model == Model::density)
    write_sample(*sink, sample_density(target, n, seed));
  else
    write_sample(*sink, sample_regression(target, n, config.noise, seed));
  return kOk;
}

int
cmd_estimate(const RunConfig& run, const EstimateOptions& opts, std::ostream& out)
{
  const auto config = experiment(run, { kMinSampleSize }, 1);
  const auto family = WaveletFamily::build(config.family, config.cascade_depth);
  const auto rule = ThresholdRule::certified(config.rule);
  std::ifstream in(opts.input);
  if (!in)
    throw Error(ErrorCode::parse_error, "cannot read " + opts.input);

  const double B = run.bound ? *run.bound : find_target(config.model, config.target).B;
  const LossSpec loss = config.model == Model::density ? LossSpec::density(B, config.grid_size)
                                                      : LossSpec::regression(config.grid_size);
  const SplitOptions split{ config.shuffle_split, derive_seed(config.root_seed, 2) };

  std::optional<MultiThresholdResult> result;
  double rho = 0.0;
  if (config.model == Model::density) {
    const auto data = read_density_sample(in);
    rho = config.rho ? *config.rho : theory_rho(config.model, B, family);
    result.emplace(multi_threshold_estimate(data, family, rule, loss, rho, config.scheme, split));
  } else {
    const auto data = read_regression_sample(in);
    rho = config.rho ? *config.rho : theory_rho(config.model, B, family);
    result.emplace(multi_threshold_estimate(data, family, rule, loss, rho, config.scheme, split));
  }
  const auto& diag = result->diagnostics;
  const auto grid = midpoint_grid(config.grid_size);
  const auto values = result->estimator.grid_values();

  {
    Sink sink(run.output, out);
    *sink << "x,f_tilde";
    if (opts.candidates)
      for (int u : diag.u_grid)
        *sink << ",u" << u;
    *sink << '\n';
    for (std::size_t i = 0; i < grid.size(); ++i) {
      *sink << real(grid[i]) << ',' << real(values[i]);
      if (opts.candidates)
        for (const auto& c : result->estimator.candidates())
          *sink << ',' << real(c.grid_values()[i]);
      *sink << '\n';
    }
  }

  std::string sidecar = opts.diagnostics;
  if (sidecar.empty() && !run.output.empty() && run.output != "-")
    sidecar = run.output + ".diagnostics.json";
  if (!sidecar.empty()) {
    nlohmann::ordered_json j;
    j["model"] = to_string(config.model);
    j["family"] = family.name();
    j["rule"] = to_string(config.rule);
    j["scheme"] = to_string(config.scheme);
    j["n"] = diag.n;
    j["m"] = diag.m;
    j["l"] = diag.l;
    j["tau"] = diag.tau;
    j["j1"] = diag.j1;
    j["M"] = diag.M();
    j["rho"] = rho;
    j["B"] = B;
    j["seed"] = config.root_seed;
    j["split_seed"] = split.seed;
    j["shuffle"] = split.shuffle;
    j["u_grid"] = diag.u_grid;
    j["risks"] = diag.risks;
    j["weights"] = diag.aew_weights.w;
    j["erm_u"] = diag.u_grid[diag.erm_index];
    std::ofstream file(sidecar, std::ios::binary);
    if (!file)
      throw Error(ErrorCode::config_invalid, "cannot write " + sidecar);
    file << j.dump(2) << '\n';
  }
  return kOk;
}

int
cmd_rates(const RunConfig& run, std::ostream& out)
{
  auto config = experiment(run, { 512, 1024, 2048, 4096, 8192 }, 100);
  if (config.ns.size() < 3)
    throw Error(ErrorCode::config_invalid, "rates needs at least three values of n");
  const auto target = find_target(config.model, config.target);
  const auto rows = monte_carlo(config);

  const std::string path = run.output.empty() ? "rates.csv" : run.output;
  {
    Sink sink(path, out);
    write_results_csv(*sink, rows);
  }

  std::vector<double> agg_means;
  std::vector<double> uni_means;
  out << "n,reps,aggregate_mean,aggregate_stderr,universal_mean,universal_stderr\n";
  for (long n : config.ns) {
    std::vector<double> agg;
    std::vector<double> uni;
    for (const auto& r : rows)
      if (r.n == n) {
        agg.push_back(config.scheme == Scheme::aew ? r.aew_risk : r.erm_risk);
        uni.push_back(r.universal_risk);
      }
    agg_means.push_back(mean(agg));
    uni_means.push_back(mean(uni));
    out << n << ',' << agg.size() << ',' << real(agg_means.back()) << ',' << real(sem(agg)) << ','
        << real(uni_means.back()) << ',' << real(sem(uni)) << '\n';
  }
  const auto fit = rate_slope(config.ns, agg_means);
  const auto uni = rate_slope(config.ns, uni_means);
  const double s = target.smoothness.s;
  const double expected = std::isfinite(s) ? -2.0 * s / (2.0 * s + 1.0) : -1.0;

  std::ostringstream summary;
  summary << "model,target,family,rule,scheme,rho,reps,slope,slope_stderr,expected_slope,"
             "universal_slope,universal_stderr\n"
          << to_string(config.model) << ',' << config.target << ',' << config.family << ','
          << to_string(config.rule) << ',' << to_string(config.scheme) << ',' << real(rows.front().rho)
          << ',' << config.reps << ',' << real(fit.slope) << ',' << real(fit.std_error) << ','
          << real(expected) << ',' << real(uni.slope) << ',' << real(uni.std_error) << '\n';
  if (path == "-") {
    out << summary.str();
  } else {
    Sink sink(summary_path(path), out);
    *sink << summary.str();
  }
  out << "slope " << real(fit.slope) << " +- " << real(fit.std_error) << " (expected "
      << real(expected) << ", universal " << real(uni.slope) << ")\n";
  return kOk;
}

int
cmd_constants(const CheckOptions& opts, std::ostream& out)
{
  const auto beta = beta_constants(opts.c, opts.K);
  out << "c=" << real(opts.c) << " K=" << real(opts.K) << '\n'
      << "beta1=" << real(beta.beta1) << '\n'
      << "beta2=" << real(beta.beta2) << '\n';
  return kOk;
}

int
cmd_ongle(const RunConfig& run, const CheckOptions& opts, std::ostream& out)
{
  const auto rule = ThresholdRule::certified(parse_rule(run.rule));
  const auto report = verify_ongle(rule, opts.u_grid, opts.step, opts.range);
  out << "rule=" << to_string(rule.kind) << " c1=" << real(rule.c1) << " c2=" << real(rule.c2)
      << " points=" << report.points_checked << '\n';
  if (report.witness) {
    const auto& w = *report.witness;
    out << "violation at x=" << real(w.x) << " y=" << real(w.y) << " u=" << real(w.u)
        << " lhs=" << real(w.lhs) << " rhs=" << real(w.rhs) << '\n';
  }
  out << (report.pass ? "pass" : "fail") << '\n';
  return report.pass ? kOk : kCheckFailed;
}

int
cmd_moment(const RunConfig& run, const CheckOptions& opts, std::ostream& out)
{
  const auto config = experiment(run, { 256, 1024, 4096 }, 1000);
  if (config.model != Model::density)
    throw Error(ErrorCode::config_invalid, "moment check runs on the density model");
  const auto family = WaveletFamily::build(config.family, config.cascade_depth);
  const auto target = find_target(config.model, config.target);
  std::vector<int> levels = opts.levels;
  if (levels.empty())
    for (int j = family.tau() - 1; j <= family.tau() + 3; ++j)
      levels.push_back(j);
  const auto report = check_moment(family, target, levels, config.ns, config.reps, config.root_seed);

  std::ostringstream csv;
  csv << "level,zero_variance,slope,slope_stderr,mc_slope_stderr,pass\n";
  for (const auto& lvl : report.levels)
    csv << lvl.level << ',' << lvl.zero_variance << ',' << real(lvl.fit.slope) << ','
        << real(lvl.fit.std_error) << ',' << real(lvl.mc_slope_stderr) << ',' << lvl.pass << '\n';
  out << csv.str() << (report.pass ? "pass" : "fail") << '\n';
  if (!run.output.empty()) {
    Sink sink(run.output, out);
    *sink << csv.str();
  }
  return report.pass ? kOk : kCheckFailed;
}

int
cmd_deviation(const RunConfig& run, const CheckOptions& opts, std::ostream& out)
{
  const auto config = experiment(run, { 1024 }, 10000);
  if (config.model != Model::density)
    throw Error(ErrorCode::config_invalid, "deviation check runs on the density model");
  const auto family = WaveletFamily::build(config.family, config.cascade_depth);
  const auto target = find_target(config.model, config.target);
  const double rho = config.rho ? *config.rho : theory_rho(config.model, target.B, family);
  const auto report = check_deviation(family, target, rho, opts.a_values, config.ns.front(),
                                      config.reps, config.root_seed);

  std::ostringstream csv;
  csv << "a,exceedances,frequency,bound,allowance\n";
  for (std::size_t i = 0; i < report.a_values.size(); ++i)
    csv << report.a_values[i] << ',' << report.exceedances[i] << ',' << real(report.frequency[i])
        << ',' << real(report.bound[i]) << ',' << real(report.allowance[i]) << '\n';
  out << "rho=" << real(rho) << " n=" << report.n << " reps=" << report.reps << '\n'
      << csv.str() << (report.pass ? "pass" : "fail") << '\n';
  if (!run.output.empty()) {
    Sink sink(run.output, out);
    *sink << csv.str();
  }
  return report.pass ? kOk : kCheckFailed;
}

int
cmd_oracle(const RunConfig& run, const CheckOptions& opts, std::ostream& out)
{
  if (opts.results.empty())
    throw Error(ErrorCode::config_invalid, "check oracle needs --results");
  std::ifstream in(opts.results);
  if (!in)
    throw Error(ErrorCode::parse_error, "cannot read " + opts.results);
  const auto rows = read_results_csv(in);
  if (rows.empty())
    throw Error(ErrorCode::empty_data, "no rows in " + opts.results);

  // one report per (model, target, n) group, in order of appearance
  std::vector<std::vector<ExperimentResult>> groups;
  std::map<std::tuple<int, std::string, long>, std::size_t> index;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(static_cast<int>(r.model), r.target, r.n);
    auto [it, fresh] = index.try_emplace(key, groups.size());
    if (fresh)
      groups.emplace_back();
    groups[it->second].push_back(r);
  }

  std::ostringstream csv;
  csv << "model,target,n,l,M,reps,epsilon,lhs,lhs_stderr,erm_lhs,min_candidate,best_u,residual,"
         "rhs,pass,ratio,sharp_pass,best_epsilon,best_rhs\n";
  bool all = true;
  for (const auto& group : groups) {
    const auto constants = TheoryConstants::for_model(group.front().model, group.front().B);
    const auto r = oracle_report(group, constants, opts.epsilon);
    all = all && r.pass;
    csv << to_string(r.model) << ',' << r.target << ',' << r.n << ',' << r.l << ',' << r.M << ','
        << r.reps << ',' << real(r.epsilon) << ',' << real(r.lhs) << ',' << real(r.lhs_stderr)
        << ',' << real(r.erm_lhs) << ',' << real(r.min_candidate) << ',' << r.best_index << ','
        << real(r.residual) << ',' << real(r.rhs) << ',' << r.pass << ',' << real(r.ratio) << ','
        << r.sharp_pass << ',' << real(r.best_epsilon) << ',' << real(r.best_rhs) << '\n';
    out << to_string(r.model) << ' ' << r.target << " n=" << r.n << ": LHS=" << real(r.lhs)
        << " RHS=" << real(r.rhs) << " ratio=" << real(r.ratio) << ' '
        << (r.pass ? "bound satisfied (non-sharp at this scale)" : "bound violated") << '\n';
  }
  if (!run.output.empty()) {
    Sink sink(run.output, out);
    *sink << csv.str();
  }
  return all ? kOk : kCheckFailed;
}

} // namespace

int
run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "Multi-threshold wavelet estimation with exponential-weight aggregation" };
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key = value file; flags override it");

  RunConfig run;
  app.add_option("--model", run.model, "density or regression")->capture_default_str();
  app.add_option("--target", run.target, "uniform, bump, triangle, twostep")->capture_default_str();
  app.add_option("--family", run.family, "haar, d4 .. d20")->capture_default_str();
  app.add_option("--depth", run.depth, "Cascade depth for Daubechies tables")->capture_default_str();
  app.add_option("--rule", run.rule, "hard, soft or garrote")->capture_default_str();
  app.add_option("--scheme", run.scheme, "AEW or ERM")->capture_default_str();
  app.add_option("--rho", run.rho, "'theory' or a positive override")->capture_default_str();
  app.add_option("--n", run.ns, "Sample sizes")->delimiter(',');
  app.add_option("--reps", run.reps, "Replications per n");
  app.add_option("--seed", run.seed, "Root seed")->capture_default_str();
  app.add_option("--grid", run.grid, "Quadrature grid size")->capture_default_str();
  app.add_option("--noise", run.noise, "bernoulli or uniform:<delta>")->capture_default_str();
  app.add_flag("--shuffle", run.shuffle, "Random train/learn split");
  app.add_option("--threads", run.threads, "Worker threads for replications")->capture_default_str();
  app.add_option("--bound", run.bound, "Sup bound B for estimate (default: target's)");
  app.add_option("-o,--output", run.output, "Output path ('-' for stdout)");

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Aggregate estimator from a sample file");
  estimate->add_option("-i,--input", est.input, "Sample file")->required();
  estimate->add_flag("--candidates", est.candidates, "Add one column per candidate");
  estimate->add_option("--diagnostics", est.diagnostics, "Diagnostics JSON path");

  auto* simulate = app.add_subcommand("simulate", "Draw a sample from a target");
  auto* rates = app.add_subcommand("rates", "Monte Carlo risks and rate slope");

  CheckOptions chk;
  auto* check = app.add_subcommand("check", "Hypothesis and constant checks");
  check->fallthrough();
  check->require_subcommand(1);
  auto* constants = check->add_subcommand("constants", "beta1, beta2 from (c, K)");
  constants->add_option("--c", chk.c)->capture_default_str();
  constants->add_option("--K", chk.K)->capture_default_str();
  auto* ongle = check->add_subcommand("ongle", "Brute-force thresholding condition");
  ongle->add_option("--step", chk.step)->capture_default_str();
  ongle->add_option("--range", chk.range)->capture_default_str();
  ongle->add_option("--u", chk.u_grid)->delimiter(',');
  auto* moment = check->add_subcommand("moment", "Fourth-moment decay of coefficients");
  moment->add_option("--levels", chk.levels)->delimiter(',');
  auto* deviation = check->add_subcommand("deviation", "Coefficient deviation frequencies");
  deviation->add_option("--a", chk.a_values)->delimiter(',');
  auto* oracle = check->add_subcommand("oracle", "Oracle inequality on a rates CSV");
  oracle->add_option("--results", chk.results, "Rates CSV")->required();
  oracle->add_option("--epsilon", chk.epsilon)->capture_default_str();
  for (auto* sub : { estimate, simulate, rates, constants, ongle, moment, deviation, oracle })
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*simulate)
      return cmd_simulate(run, out);
    if (*estimate)
      return cmd_estimate(run, est, out);
    if (*rates)
      return cmd_rates(run, out);
    if (*constants)
      return cmd_constants(chk, out);
    if (*ongle)
      return cmd_ongle(run, chk, out);
    if (*moment)
      return cmd_moment(run, chk, out);
    if (*deviation)
      return cmd_deviation(run, chk, out);
    if (*oracle)
      return cmd_oracle(run, chk, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_data_error(e.code()) ? kDataError : kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

} // namespace multithresh::cli
