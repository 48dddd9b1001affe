#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace multithresh {

//! Periodized orthonormal wavelet bases on [0,1].
//!
//! Filter convention: the low-pass filter h has unit l2 norm and sums to
//! sqrt(2), so phi(x) = sqrt(2) sum_k h_k phi(2x - k). The mother wavelet is
//! psi(x) = sqrt(2) sum_k g_k phi(2x - k) with g_k = (-1)^k h_{L-1-k}. Both
//! are supported on [0, L-1] for a filter of length L.
//!
//! Haar is evaluated in closed form. Daubechies families are evaluated by
//! linear interpolation in dyadic tables of step 2^-cascade_depth built with
//! the cascade algorithm.

enum class FamilyKind
{
  haar,
  daubechies,
};

enum class BasisKind
{
  scaling,
  wavelet,
};

class WaveletFamily
{
public:
  //! Accepts "haar" and "d4", "d6", ..., "d20" (also spelled
  //! "daubechies4" ...). The number is the filter length; a filter of
  //! length 2N has N vanishing moments.
  static WaveletFamily build(std::string_view name, int cascade_depth);

  const std::string& name() const { return name_; }
  FamilyKind kind() const { return kind_; }
  std::span<const double> filter() const { return filter_; }
  int support_width() const { return static_cast<int>(filter_.size()) - 1; }
  int tau() const { return tau_; }
  int regularity() const { return regularity_; }
  double psi_sup() const { return psi_sup_; }
  int cascade_depth() const { return cascade_depth_; }

  //! Mother functions on the real line (zero outside [0, L-1]).
  double phi(double x) const;
  double psi(double x) const;

private:
  struct Tables
  {
    double step_inv = 0;
    std::vector<double> phi;
    std::vector<double> psi;
  };

  double lookup(const std::vector<double>& table, double x) const;

  std::string name_;
  FamilyKind kind_ = FamilyKind::haar;
  std::vector<double> filter_;
  int tau_ = 0;
  int regularity_ = 1;
  double psi_sup_ = 1.0;
  int cascade_depth_ = 0;
  std::shared_ptr<const Tables> tables_;
};

inline WaveletFamily
build_family(std::string_view name, int cascade_depth)
{
  return WaveletFamily::build(name, cascade_depth);
}

//! Names accepted by build_family.
std::vector<std::string> family_names();

//! Coefficients alpha_{tau,k} (k < 2^tau) and beta_{j,k} (tau <= j <= j_max,
//! k < 2^j). j_max == tau - 1 means no detail levels.
struct WaveletExpansion
{
  int tau = 0;
  int j_max = -1;
  std::vector<double> alpha;
  std::vector<std::vector<double>> beta;

  static WaveletExpansion zeros(int tau, int j_max);

  std::span<double> level(int j) { return beta.at(static_cast<std::size_t>(j - tau)); }
  std::span<const double> level(int j) const
  {
    return beta.at(static_cast<std::size_t>(j - tau));
  }

  //! Throws shape_mismatch / invalid_argument when the layout or the
  //! finiteness invariant is broken.
  void validate() const;
};

//! psi^per_{j,k}(x) = sum_l 2^{j/2} psi(2^j (x - l) - k), likewise for phi.
//! Scaling functions are only available at j == tau.
double eval_periodized(const WaveletFamily& family,
                       BasisKind kind,
                       int j,
                       std::int64_t k,
                       double x);

//! Sparse evaluation of every basis function phi_{tau,.}, psi_{j,.} for
//! tau <= j <= j_max at a fixed set of points. Each point touches at most
//! L-1 functions per level, so synthesis and the adjoint (empirical
//! coefficients) both cost O(points * levels * L).
class BasisTable
{
public:
  BasisTable(const WaveletFamily& family, std::span<const double> points, int j_max);

  std::size_t size() const { return num_points_; }
  int tau() const { return tau_; }
  int j_max() const { return j_max_; }

  //! f(x_i) for every stored point.
  std::vector<double> synthesize(const WaveletExpansion& expansion) const;

  //! Coefficients (1/n) sum_i weight_i * basis(x_i); a null span means
  //! unit weights.
  WaveletExpansion mean_coefficients(std::span<const double> weights = {}) const;

private:
  struct Entry
  {
    std::int32_t index;
    double value;
  };

  // rows_ = 1 + (j_max - tau + 1); row 0 is the scaling level.
  int tau_;
  int j_max_;
  int rows_;
  int width_;
  std::size_t num_points_;
  std::vector<Entry> entries_; // [point][row][width]
};

std::vector<double> synthesize(const WaveletFamily& family,
                               const WaveletExpansion& expansion,
                               std::span<const double> grid);

double parseval_norm(const WaveletExpansion& expansion);

//! Sequence-space Besov norm with beta_{tau-1,k} = alpha_{tau,k}.
//! p or q may be +infinity (max modification).
double besov_seminorm(const WaveletExpansion& expansion, double s, double p, double q);

//! Coefficients of f by midpoint quadrature on grid_size points. Exact for
//! Haar when grid_size is a multiple of 2^{j_max+1} and f is constant on
//! the corresponding dyadic cells.
WaveletExpansion analyze(const WaveletFamily& family,
                         const std::function<double(double)>& f,
                         int j_max,
                         int grid_size);

//! Midpoints (i + 1/2)/size, i < size.
std::vector<double> midpoint_grid(int size);

} // namespace multithresh
