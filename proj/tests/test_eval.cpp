#include "multithresh/error.hpp"
#include "multithresh/eval.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace multithresh;

namespace {

ErrorCode
code_of(auto&& fn)
{
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::invalid_argument;
}

ExperimentResult
fake_row(int rep, std::size_t M, long l)
{
  ExperimentResult r;
  r.model = Model::regression;
  r.target = "bump";
  r.family = "haar";
  r.n = 1024;
  r.m = 1024 - l;
  r.l = l;
  r.j1 = 8;
  r.rep = rep;
  r.seed = 1000 + rep;
  r.B = 0.8;
  r.rho = 1.0;
  for (std::size_t u = 0; u < M; ++u)
    r.candidate_risks.push_back(0.01 * (u + 1) + 0.001 * rep);
  r.weights.assign(M, 1.0 / M);
  r.aew_risk = 0.011 + 0.001 * rep;
  r.erm_risk = r.candidate_risks[0];
  r.universal_risk = 0.02;
  return r;
}

} // namespace

TEST_SUITE("eval")
{
  TEST_CASE("mise")
  {
    const auto uniform = find_target(Model::density, "uniform");
    const auto triangle = find_target(Model::density, "triangle");
    CHECK(mise([](double) { return 0.0; }, uniform, 1024) == 1.0);
    CHECK(mise(triangle.f, triangle, 1 << 14) <= 1e-15);
    // int_0^1 (2 - |4x - 2|)^2 dx = 4/3
    CHECK(mise([](double) { return 0.0; }, triangle, 1 << 14) == doctest::Approx(4.0 / 3.0).epsilon(1e-8));
    CHECK(code_of([&] { mise(triangle.f, triangle, 512); }) == ErrorCode::invalid_argument);
  }

  TEST_CASE("config validation")
  {
    ExperimentConfig c;
    c.ns = { 512 };
    CHECK_NOTHROW(c.validate());
    c.reps = 0;
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::config_invalid);
    c.reps = 1;
    c.ns = { 8 };
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::config_invalid);
    c.ns = {};
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::config_invalid);
    c.ns = { 64 };
    c.rho = -1.0;
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::config_invalid);
  }

  TEST_CASE("monte carlo determinism and ranges")
  {
    ExperimentConfig c;
    c.model = Model::regression;
    c.target = "bump";
    c.ns = { 256, 512 };
    c.reps = 2;
    c.rho = 1.0;
    const auto a = monte_carlo(c);
    const auto b = monte_carlo(c);
    REQUIRE(a.size() == 4);
    std::ostringstream sa;
    std::ostringstream sb;
    write_results_csv(sa, a);
    write_results_csv(sb, b);
    CHECK(sa.str() == sb.str());
    for (const auto& r : a) {
      CHECK(r.aew_risk >= 0.0);
      CHECK(r.erm_risk >= 0.0);
      CHECK(r.universal_risk >= 0.0);
      for (double v : r.candidate_risks)
        CHECK(v >= 0.0);
      CHECK_NOTHROW(AggregationWeights{ r.weights }.validate());
      CHECK(r.seed == replication_seed(42, r.n, r.rep));
    }
    CHECK(a[0].n == 256);
    CHECK(a[2].n == 512);
    CHECK(a[1].rep == 1);

    c.threads = 3;
    std::ostringstream sc;
    write_results_csv(sc, monte_carlo(c));
    CHECK(sc.str() == sa.str());
  }

  TEST_CASE("uniform density: the aggregate avoids the worst candidate")
  {
    ExperimentConfig c;
    c.target = "uniform";
    c.ns = { 4096 };
    c.reps = 100;
    c.universal_baseline = false;
    const auto rows = monte_carlo(c);
    std::vector<double> mean(rows.front().M(), 0.0);
    double agg = 0.0;
    for (const auto& r : rows) {
      agg += r.aew_risk;
      for (std::size_t u = 0; u < mean.size(); ++u)
        mean[u] += r.candidate_risks[u];
    }
    CHECK(agg < *std::max_element(mean.begin(), mean.end()));
  }

  TEST_CASE("universal baseline")
  {
    const auto haar = WaveletFamily::build("haar", 12);
    const auto target = find_target(Model::density, "triangle");
    const auto data = sample_density(target, 1024, 3);
    const auto c = universal_threshold_candidate(data, haar, ThresholdRule::certified(RuleKind::hard),
                                                 LossSpec::density(target.B));
    CHECK(c.u() == -1);
    const double lambda = std::sqrt(2.0) * std::sqrt(2.0 * std::log(1024.0) / 1024.0);
    for (double t : c.plan().t)
      CHECK(t == doctest::Approx(lambda).epsilon(1e-14));
    CHECK(c.plan().j1 == 8);
  }

  TEST_CASE("rate_slope")
  {
    const std::vector<long> ns{ 512, 1024, 2048, 4096, 8192 };
    std::vector<double> r;
    for (long n : ns)
      r.push_back(std::pow(static_cast<double>(n), -2.0 / 3.0));
    const auto fit = rate_slope(ns, r);
    CHECK(std::abs(fit.slope + 2.0 / 3.0) <= 1e-12);
    CHECK(fit.std_error <= 1e-12);

    std::vector<double> c;
    for (long n : ns)
      c.push_back(7.5 / static_cast<double>(n));
    CHECK(std::abs(rate_slope(ns, c).slope + 1.0) <= 1e-12);

    std::vector<double> noisy{ 0.3, 0.21, 0.12, 0.09, 0.05 };
    std::vector<double> scaled(noisy);
    for (auto& v : scaled)
      v *= 13.0;
    CHECK(std::abs(rate_slope(ns, noisy).slope - rate_slope(ns, scaled).slope) <= 1e-12);
    CHECK(rate_slope(ns, noisy).std_error > 0.0);

    CHECK(code_of([] { rate_slope(std::vector<long>{ 64, 64, 64 }, std::vector<double>{ 1, 2, 3 }); }) ==
          ErrorCode::degenerate_x);
    CHECK_THROWS_AS(rate_slope(std::vector<long>{ 64, 128 }, std::vector<double>{ 1, 2 }), Error);
    CHECK_THROWS_AS(rate_slope(std::vector<long>{ 64, 128, 256 }, std::vector<double>{ 1, 0, 2 }), Error);
  }

  TEST_CASE("moment check")
  {
    const auto haar = WaveletFamily::build("haar", 12);
    const auto uniform = find_target(Model::density, "uniform");
    const std::vector<int> levels{ -1, 0, 2 };
    const std::vector<long> ns{ 256, 1024, 4096 };
    const auto report = check_moment(haar, uniform, levels, ns, 1000, 7);
    REQUIRE(report.levels.size() == 3);
    CHECK(report.levels[0].zero_variance); // Haar scaling coefficient is exact
    CHECK_FALSE(report.levels[1].zero_variance);
    for (std::size_t i = 1; i < 3; ++i) {
      CHECK(report.levels[i].fit.slope >= -2.3);
      CHECK(report.levels[i].fit.slope <= -1.7);
    }
    CHECK(report.pass);

    // doubling the replications shrinks the Monte Carlo slope error by about 1/sqrt(2)
    const auto twice = check_moment(haar, uniform, levels, ns, 2000, 7);
    for (std::size_t i = 1; i < 3; ++i) {
      const double ratio = twice.levels[i].mc_slope_stderr / report.levels[i].mc_slope_stderr;
      CHECK(ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.15));
    }
  }

  TEST_CASE("deviation check")
  {
    const auto haar = WaveletFamily::build("haar", 12);
    const auto uniform = find_target(Model::density, "uniform");
    const std::vector<int> a{ 0, 1, 2, 3, 4 };
    const auto loose = check_deviation(haar, uniform, 2.0, a, 256, 500, 3);
    CHECK(loose.bound[0] == 1.0);
    CHECK(loose.frequency[0] <= loose.allowance[0]);
    for (std::size_t i = 1; i < a.size(); ++i)
      CHECK(loose.exceedances[i] <= loose.exceedances[i - 1]);
    CHECK(loose.exceedances[1] > 0);

    const double rho = min_rho(1.0, haar.psi_sup(), Model::density);
    const auto strict = check_deviation(haar, uniform, rho, std::vector<int>{ 1, 2, 3, 4 }, 1024, 2000, 3);
    CHECK(strict.pass);
    for (long e : strict.exceedances)
      CHECK(e == 0);
  }

  TEST_CASE("oracle report")
  {
    std::vector<ExperimentResult> rows;
    for (int r = 0; r < 10; ++r)
      rows.push_back(fake_row(r, 11, 148));
    const auto tc = TheoryConstants::for_model(Model::regression, 1.0);
    const auto rep = oracle_report(rows, tc, 1.0);
    CHECK(rep.M == 11);
    CHECK(rep.residual == doctest::Approx(1194.5406937356639).epsilon(1e-12));
    CHECK(rep.pass);
    CHECK(rep.best_index == 0);
    CHECK(rep.min_candidate == doctest::Approx(0.0145));
    CHECK(rep.lhs == doctest::Approx(0.0155));
    CHECK(rep.ratio == doctest::Approx(0.0155 / 0.0145));
    // rhs is convex in epsilon with minimizer sqrt(residual(1) / min)
    const double eps = std::sqrt(rep.residual / rep.min_candidate);
    CHECK(std::abs(std::log10(rep.best_epsilon) - std::log10(std::min(eps, 1000.0))) <= 0.05);
    CHECK(rep.best_rhs <= rep.rhs);

    auto mixed = rows;
    mixed[3].n = 2048;
    CHECK(code_of([&] { oracle_report(mixed, tc, 1.0); }) == ErrorCode::mixed_configuration);
    std::vector<ExperimentResult> single{ fake_row(0, 1, 148) };
    CHECK_THROWS_AS(oracle_report(single, tc, 1.0), Error);
  }

  TEST_CASE("results csv round trip")
  {
    std::vector<ExperimentResult> rows{ fake_row(0, 3, 148), fake_row(1, 3, 148) };
    rows[1].universal_risk = std::nan("");
    std::ostringstream out;
    write_results_csv(out, rows);
    std::istringstream in(out.str());
    const auto back = read_results_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].candidate_risks == rows[0].candidate_risks);
    CHECK(back[0].weights == rows[0].weights);
    CHECK(back[0].seed == rows[0].seed);
    CHECK(back[1].aew_risk == rows[1].aew_risk);
    CHECK(std::isnan(back[1].universal_risk));
    std::ostringstream again;
    write_results_csv(again, back);
    CHECK(again.str() == out.str());

    std::istringstream header("n,risk\n1,2\n");
    CHECK(code_of([&] { read_results_csv(header); }) == ErrorCode::parse_error);
    std::istringstream truncated(out.str().substr(0, out.str().size() - 30));
    CHECK(code_of([&] { read_results_csv(truncated); }) == ErrorCode::parse_error);
  }
}
