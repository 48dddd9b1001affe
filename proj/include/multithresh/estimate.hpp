#pragma once

#include "multithresh/wavelet.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace multithresh {

enum class Model
{
  density,
  regression,
};

Model parse_model(std::string_view name);
const char* to_string(Model model);

//! Observations X_1..X_n in [0,1] from an unknown density.
class DensitySample
{
public:
  DensitySample() = default;
  explicit DensitySample(std::vector<double> x);

  std::span<const double> x() const { return x_; }
  std::size_t size() const { return x_.size(); }

  DensitySample slice(std::size_t first, std::size_t count) const;

private:
  std::vector<double> x_;
};

//! Pairs (X_i, Y_i) in the unit square, X uniform design.
class RegressionSample
{
public:
  RegressionSample() = default;
  RegressionSample(std::vector<double> x, std::vector<double> y);

  std::span<const double> x() const { return x_; }
  std::span<const double> y() const { return y_; }
  std::size_t size() const { return x_.size(); }

  RegressionSample slice(std::size_t first, std::size_t count) const;

private:
  std::vector<double> x_;
  std::vector<double> y_;
};

//! Smallest n accepted by the estimation pipeline.
inline constexpr long kMinSampleSize = 16;

//! Finest level: n / ln n <= 2^j1 < 2 n / ln n.
int j1_level(long n);

//! Oracle level for smoothness s: n^{1/(1+2s)} <= 2^js < 2 n^{1/(1+2s)}.
int js_level(long n, double s);

//! alpha_{tau,k} = mean phi_{tau,k}(X_i), beta_{j,k} = mean psi_{j,k}(X_i)
//! for tau <= j <= j1.
WaveletExpansion density_coeffs(const DensitySample& sample, const WaveletFamily& family, int j1);

//! Same as density_coeffs with each term weighted by Y_i.
WaveletExpansion regression_coeffs(const RegressionSample& sample,
                                   const WaveletFamily& family,
                                   int j1);

//! Smallest rho with rho^2 / (8B + (8 rho / (3 sqrt 2)) (psi_sup + B)) >= 4 ln 2.
//! The regression model uses B = 1 regardless of the argument.
double min_rho(double B, double psi_sup, Model model);

//! Left side of the rho condition above; min_rho makes it equal 4 ln 2.
double rho_condition_ratio(double rho, double B, double psi_sup);

//! Almost-sure bound K on |Q(z, f) - Q(z, f*)| over the clipped class:
//! 1 for regression, B^2 + 2B for the density quadratic loss.
double loss_difference_bound(Model model, double B);

namespace detail {
//! Positive root of r^2 - a r - b = 0 for a >= 0, b >= 0.
double larger_quadratic_root(double a, double b);
} // namespace detail

} // namespace multithresh
