#include "multithresh/estimate.hpp"

#include "multithresh/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace multithresh {

namespace {

bool
in_unit(double v)
{
  return v >= 0.0 && v <= 1.0;
}

// Unique j >= 0 with target <= 2^j < 2 target (target >= 1).
int
dyadic_ceiling(double target)
{
  int j = std::max(0, static_cast<int>(std::ceil(std::log2(target))));
  while (j > 0 && std::exp2(j - 1) >= target)
    --j;
  while (std::exp2(j) < target)
    ++j;
  return j;
}

void
check_levels(const WaveletFamily& family, int j1)
{
  if (j1 < family.tau() || j1 > 30)
    throw Error(ErrorCode::invalid_level_range,
                "j1=" + std::to_string(j1) + " below tau=" + std::to_string(family.tau()));
}

} // namespace

Model
parse_model(std::string_view name)
{
  if (name == "density")
    return Model::density;
  if (name == "regression")
    return Model::regression;
  throw Error(ErrorCode::unsupported_name, "unknown model '" + std::string(name) + "'");
}

const char*
to_string(Model model)
{
  return model == Model::density ? "density" : "regression";
}

DensitySample::DensitySample(std::vector<double> x)
  : x_(std::move(x))
{
  for (std::size_t i = 0; i < x_.size(); ++i)
    if (!in_unit(x_[i]))
      throw Error(ErrorCode::parse_error,
                  "observation " + std::to_string(i + 1) + " outside [0,1]");
}

DensitySample
DensitySample::slice(std::size_t first, std::size_t count) const
{
  if (first + count > x_.size())
    throw Error(ErrorCode::shape_mismatch, "slice beyond the sample");
  DensitySample out;
  out.x_.assign(x_.begin() + static_cast<std::ptrdiff_t>(first),
                x_.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

RegressionSample::RegressionSample(std::vector<double> x, std::vector<double> y)
  : x_(std::move(x))
  , y_(std::move(y))
{
  if (x_.size() != y_.size())
    throw Error(ErrorCode::shape_mismatch, "x and y lengths differ");
  for (std::size_t i = 0; i < x_.size(); ++i)
    if (!in_unit(x_[i]) || !in_unit(y_[i]))
      throw Error(ErrorCode::parse_error,
                  "observation " + std::to_string(i + 1) + " outside the unit square");
}

RegressionSample
RegressionSample::slice(std::size_t first, std::size_t count) const
{
  if (first + count > x_.size())
    throw Error(ErrorCode::shape_mismatch, "slice beyond the sample");
  RegressionSample out;
  const auto b = static_cast<std::ptrdiff_t>(first);
  const auto e = static_cast<std::ptrdiff_t>(first + count);
  out.x_.assign(x_.begin() + b, x_.begin() + e);
  out.y_.assign(y_.begin() + b, y_.begin() + e);
  return out;
}

int
j1_level(long n)
{
  if (n < kMinSampleSize)
    throw Error(ErrorCode::n_too_small, "n=" + std::to_string(n) + " below 16");
  const double nn = static_cast<double>(n);
  return dyadic_ceiling(nn / std::log(nn));
}

int
js_level(long n, double s)
{
  if (n < 2 || !(s > 0.0))
    throw Error(ErrorCode::invalid_argument, "js_level needs n >= 2 and s > 0");
  return dyadic_ceiling(std::pow(static_cast<double>(n), 1.0 / (1.0 + 2.0 * s)));
}

WaveletExpansion
density_coeffs(const DensitySample& sample, const WaveletFamily& family, int j1)
{
  check_levels(family, j1);
  if (sample.size() == 0)
    throw Error(ErrorCode::empty_data, "density sample is empty");
  return BasisTable(family, sample.x(), j1).mean_coefficients();
}

WaveletExpansion
regression_coeffs(const RegressionSample& sample, const WaveletFamily& family, int j1)
{
  check_levels(family, j1);
  if (sample.size() == 0)
    throw Error(ErrorCode::empty_data, "regression sample is empty");
  return BasisTable(family, sample.x(), j1).mean_coefficients(sample.y());
}

namespace detail {

double
larger_quadratic_root(double a, double b)
{
  return 0.5 * (a + std::sqrt(a * a + 4.0 * b));
}

} // namespace detail

double
rho_condition_ratio(double rho, double B, double psi_sup)
{
  return rho * rho / (8.0 * B + (8.0 * rho / (3.0 * std::numbers::sqrt2)) * (psi_sup + B));
}

double
min_rho(double B, double psi_sup, Model model)
{
  if (model == Model::regression)
    B = 1.0;
  if (!(B >= 1.0) || !std::isfinite(B))
    throw Error(ErrorCode::invalid_bound, "density bound B must be >= 1");
  if (!(psi_sup > 0.0))
    throw Error(ErrorCode::invalid_argument, "psi_sup must be positive");
  const double four_ln2 = 4.0 * std::numbers::ln2;
  const double a = four_ln2 * (8.0 / (3.0 * std::numbers::sqrt2)) * (psi_sup + B);
  const double b = four_ln2 * 8.0 * B;
  return detail::larger_quadratic_root(a, b);
}

double
loss_difference_bound(Model model, double B)
{
  return model == Model::regression ? 1.0 : B * B + 2.0 * B;
}

} // namespace multithresh
