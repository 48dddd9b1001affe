#include "multithresh/error.hpp"
#include "multithresh/random.hpp"
#include "multithresh/wavelet.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace multithresh;

namespace {

WaveletExpansion
random_expansion(int tau, int j_max, std::uint64_t seed)
{
  Rng rng(seed);
  auto e = WaveletExpansion::zeros(tau, j_max);
  for (auto& a : e.alpha)
    a = 2.0 * rng.uniform() - 1.0;
  for (auto& row : e.beta)
    for (auto& b : row)
      b = 2.0 * rng.uniform() - 1.0;
  return e;
}

double
max_coeff_error(const WaveletExpansion& a, const WaveletExpansion& b)
{
  double err = 0.0;
  for (std::size_t k = 0; k < a.alpha.size(); ++k)
    err = std::max(err, std::abs(a.alpha[k] - b.alpha[k]));
  for (std::size_t j = 0; j < a.beta.size(); ++j)
    for (std::size_t k = 0; k < a.beta[j].size(); ++k)
      err = std::max(err, std::abs(a.beta[j][k] - b.beta[j][k]));
  return err;
}

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

} // namespace

TEST_SUITE("wavelet")
{
  TEST_CASE("haar family")
  {
    const auto haar = build_family("haar", 12);
    CHECK(haar.tau() == 0);
    CHECK(haar.support_width() == 1);
    CHECK(haar.psi_sup() == 1.0);
    CHECK(haar.regularity() == 1);
    REQUIRE(haar.filter().size() == 2);
    CHECK(haar.filter()[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(haar.filter()[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  }

  TEST_CASE("d4 family")
  {
    const auto d4 = build_family("d4", 12);
    CHECK(d4.support_width() == 3);
    CHECK(d4.tau() == 2);
    CHECK(d4.regularity() == 2);
    CHECK(d4.psi_sup() >= 1.0);
    CHECK(build_family("daubechies4", 12).name() == d4.name());

    // phi at the integers: (1 + sqrt 3)/2 and (1 - sqrt 3)/2
    CHECK(d4.phi(1.0) == doctest::Approx((1.0 + std::sqrt(3.0)) / 2.0).epsilon(1e-12));
    CHECK(d4.phi(2.0) == doctest::Approx((1.0 - std::sqrt(3.0)) / 2.0).epsilon(1e-12));
    CHECK(d4.phi(0.0) == doctest::Approx(0.0));
    CHECK(d4.phi(3.0) == doctest::Approx(0.0));
    CHECK(d4.phi(-0.1) == 0.0);
    CHECK(d4.psi(3.2) == 0.0);

    // PyWavelets db2 wavefun(level=12) at dyadic points
    const double x[] = { 0.5, 1.0, 1.5, 2.0, 2.5 };
    const double phi[] = { 0.9328906315797212, 1.3659360421135953, 0.00015477895415418993,
                           -0.36593604211359365, 0.0669545894661266 };
    const double psi[] = { -0.24996729135834617, -0.366001459396902, 1.7317827225563427,
                           -1.3656919014885953, 0.2498779296875004 };
    for (int i = 0; i < 5; ++i) {
      CHECK(std::abs(d4.phi(x[i]) - phi[i]) < 1e-3);
      CHECK(std::abs(d4.psi(x[i]) - psi[i]) < 1e-3);
    }
  }

  TEST_CASE("filter invariants for every family")
  {
    for (const auto& name : family_names()) {
      CAPTURE(name);
      const auto f = build_family(name, 10);
      const auto h = f.filter();
      CHECK(std::abs(std::accumulate(h.begin(), h.end(), 0.0) - std::sqrt(2.0)) < 1e-12);
      for (std::size_t m = 0; 2 * m < h.size(); ++m) {
        double s = 0.0;
        for (std::size_t k = 0; k + 2 * m < h.size(); ++k)
          s += h[k] * h[k + 2 * m];
        CHECK(std::abs(s - (m == 0 ? 1.0 : 0.0)) < 1e-12);
      }
      CHECK((1 << f.tau()) >= f.support_width());
      CHECK((f.tau() == 0 || (1 << (f.tau() - 1)) < f.support_width()));
      CHECK(f.regularity() * 2 == static_cast<int>(h.size()));
      CHECK(f.psi_sup() >= 1.0);
    }
  }

  TEST_CASE("build errors")
  {
    CHECK(code_of([] { build_family("coif3", 12); }) == ErrorCode::unsupported_name);
    CHECK(code_of([] { build_family("d4", 3); }) == ErrorCode::depth_out_of_range);
    CHECK(code_of([] { build_family("d4", 21); }) == ErrorCode::depth_out_of_range);
    CHECK_NOTHROW(build_family("d4", 6));
    CHECK_NOTHROW(build_family("d4", 20));
  }

  TEST_CASE("eval_periodized examples")
  {
    const auto haar = build_family("haar", 12);
    CHECK(eval_periodized(haar, BasisKind::wavelet, 1, 0, 0.2) == doctest::Approx(std::sqrt(2.0)));
    CHECK(eval_periodized(haar, BasisKind::wavelet, 1, 1, 0.9) == doctest::Approx(-std::sqrt(2.0)));
    for (double x : { 0.0, 0.3, 0.999, 1.0 })
      CHECK(eval_periodized(haar, BasisKind::scaling, 0, 0, x) == 1.0);
    CHECK(code_of([&] { eval_periodized(haar, BasisKind::wavelet, 2, 4, 0.5); }) ==
          ErrorCode::index_out_of_range);
    CHECK(code_of([&] { eval_periodized(haar, BasisKind::wavelet, 1, -1, 0.5); }) ==
          ErrorCode::index_out_of_range);
    CHECK(code_of([&] { eval_periodized(haar, BasisKind::scaling, 1, 0, 0.5); }) ==
          ErrorCode::index_out_of_range);
  }

  TEST_CASE("periodization matches the lattice sum and is 1-periodic")
  {
    const auto d4 = build_family("d4", 12);
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      const int j = 2 + static_cast<int>(rng.below(4));
      const auto k = static_cast<std::int64_t>(rng.below(std::uint64_t{ 1 } << j));
      const double x = rng.uniform();
      auto lattice = [&](double t) {
        double sum = 0.0;
        for (int l = -5; l <= 5; ++l)
          sum += std::exp2(j / 2.0) * d4.psi(std::exp2(j) * (t - l) - static_cast<double>(k));
        return sum;
      };
      const double v = eval_periodized(d4, BasisKind::wavelet, j, k, x);
      CHECK(std::abs(v - lattice(x)) < 1e-12);
      CHECK(std::abs(lattice(x + 1.0) - v) < 1e-12);
      CHECK_THROWS(eval_periodized(d4, BasisKind::wavelet, j, k, x + 1.0));
    }
  }

  TEST_CASE("synthesize examples")
  {
    const auto haar = build_family("haar", 12);
    auto one = WaveletExpansion::zeros(0, -1);
    one.alpha[0] = 1.0;
    const std::vector<double> grid{ 0.0, 0.1, 0.5, 0.77, 1.0 };
    for (double v : synthesize(haar, one, grid))
      CHECK(v == 1.0);

    auto mother = WaveletExpansion::zeros(0, 0);
    mother.level(0)[0] = 1.0;
    const auto v = synthesize(haar, mother, std::vector<double>{ 0.25, 0.75 });
    CHECK(v[0] == 1.0);
    CHECK(v[1] == -1.0);
  }

  TEST_CASE("haar round trip is exact")
  {
    const auto haar = build_family("haar", 12);
    for (int j_max : { 0, 3, 7, 10 }) {
      const auto e = random_expansion(0, j_max, 100 + j_max);
      const auto back = analyze(haar, [&](double x) { return synthesize(haar, e, std::vector<double>{ x })[0]; },
                                j_max, 1 << (j_max + 2));
      CHECK(max_coeff_error(e, back) <= 1e-12);
    }
  }

  TEST_CASE("d4 round trip on a fine grid")
  {
    const auto d4 = build_family("d4", 12);
    const auto e = random_expansion(2, 5, 9);
    const auto grid = midpoint_grid(1 << 14);
    const auto values = synthesize(d4, e, grid);
    const auto back = analyze(
      d4,
      [&](double x) {
        const auto i = static_cast<std::size_t>(std::floor(x * (1 << 14)));
        return values[std::min<std::size_t>(i, values.size() - 1)];
      },
      5, 1 << 14);
    CHECK(max_coeff_error(e, back) <= 1e-3);
  }

  TEST_CASE("d4 numerical orthonormality, coarse levels")
  {
    const auto d4 = build_family("d4", 12);
    const int G = 1 << 14;
    const auto grid = midpoint_grid(G);
    std::vector<std::vector<double>> rows;
    for (int j = 2; j <= 3; ++j)
      for (int k = 0; k < (1 << j); ++k) {
        std::vector<double> r(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
          r[i] = eval_periodized(d4, BasisKind::wavelet, j, k, grid[i]);
        rows.push_back(std::move(r));
      }
    double worst = 0.0;
    for (std::size_t a = 0; a < rows.size(); ++a)
      for (std::size_t b = a; b < rows.size(); ++b) {
        const double ip = std::inner_product(rows[a].begin(), rows[a].end(), rows[b].begin(), 0.0) / G;
        worst = std::max(worst, std::abs(ip - (a == b ? 1.0 : 0.0)));
      }
    CHECK(worst <= 1e-3);
  }

  TEST_CASE("parseval norm")
  {
    auto e = WaveletExpansion::zeros(0, 0);
    e.alpha[0] = 3.0;
    e.level(0)[0] = 4.0;
    CHECK(parseval_norm(e) == 5.0);
    CHECK(parseval_norm(WaveletExpansion::zeros(0, 4)) == 0.0);

    const auto haar = build_family("haar", 12);
    const auto r = random_expansion(0, 6, 17);
    const auto values = synthesize(haar, r, midpoint_grid(1 << 14));
    double sq = 0.0;
    for (double v : values)
      sq += v * v;
    CHECK(std::abs(std::sqrt(sq / (1 << 14)) - parseval_norm(r)) <= 1e-6);

    // additivity over levels
    double levels = 0.0;
    for (double a : r.alpha)
      levels += a * a;
    for (int j = 0; j <= 6; ++j) {
      auto only = WaveletExpansion::zeros(0, 6);
      std::copy(r.level(j).begin(), r.level(j).end(), only.level(j).begin());
      levels += parseval_norm(only) * parseval_norm(only);
    }
    CHECK(levels == doctest::Approx(parseval_norm(r) * parseval_norm(r)).epsilon(1e-14));
  }

  TEST_CASE("besov seminorm")
  {
    const double inf = std::numeric_limits<double>::infinity();
    auto single = WaveletExpansion::zeros(0, 2);
    single.level(2)[1] = 1.0;
    CHECK(besov_seminorm(single, 1.0, 2.0, 2.0) == doctest::Approx(4.0).epsilon(1e-15));

    auto alpha = WaveletExpansion::zeros(0, 3);
    alpha.alpha[0] = -0.7;
    for (double s : { 0.5, 1.0, 2.0 })
      for (double p : { 1.0, 2.0, inf })
        for (double q : { 1.0, 3.0, inf }) {
          const double expect = 0.7 * std::exp2(-(s + 0.5 - (std::isinf(p) ? 0.0 : 1.0 / p)));
          CHECK(besov_seminorm(alpha, s, p, q) == doctest::Approx(expect).epsilon(1e-14));
        }

    auto two = WaveletExpansion::zeros(0, 1);
    two.level(0)[0] = 1.0;
    two.level(1)[0] = 3.0;
    // level terms 2^{j s}(sum |beta|^2)^{1/2} with s=1, p=2: 1 and 6
    CHECK(besov_seminorm(two, 1.0, 2.0, inf) == doctest::Approx(6.0));

    const auto r = random_expansion(0, 5, 23);
    auto scaled = r;
    for (auto& a : scaled.alpha)
      a *= -2.5;
    for (auto& row : scaled.beta)
      for (auto& b : row)
        b *= -2.5;
    CHECK(besov_seminorm(scaled, 1.5, 2.0, 1.0) ==
          doctest::Approx(2.5 * besov_seminorm(r, 1.5, 2.0, 1.0)).epsilon(1e-14));

    CHECK(code_of([&] { besov_seminorm(r, 0.0, 2.0, 2.0); }) == ErrorCode::invalid_argument);
    CHECK(code_of([&] { besov_seminorm(r, 1.0, 0.5, 2.0); }) == ErrorCode::invalid_argument);
  }

  TEST_CASE("expansion validation")
  {
    auto e = WaveletExpansion::zeros(2, 4);
    CHECK(e.alpha.size() == 4);
    CHECK(e.level(4).size() == 16);
    CHECK_NOTHROW(e.validate());
    e.beta[1].pop_back();
    CHECK(code_of([&] { e.validate(); }) == ErrorCode::shape_mismatch);
    auto nan = WaveletExpansion::zeros(0, 1);
    nan.level(1)[0] = std::nan("");
    CHECK(code_of([&] { nan.validate(); }) == ErrorCode::invalid_argument);
  }
}
