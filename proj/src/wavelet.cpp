#include "multithresh/wavelet.hpp"

#include "daubechies_filters.hpp"
#include "multithresh/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

namespace multithresh {

namespace {

constexpr int kMinDepth = 6;
constexpr int kMaxDepth = 20;
constexpr int kMaxLevel = 30;

std::string
lowercase(std::string_view s)
{
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

// Filter length encoded in "d<L>" or "daubechies<L>"; 0 when not matched.
int
parse_daubechies_length(const std::string& name)
{
  std::string_view digits;
  if (name.rfind("daubechies", 0) == 0)
    digits = std::string_view(name).substr(10);
  else if (name.size() > 1 && name[0] == 'd')
    digits = std::string_view(name).substr(1);
  else
    return 0;
  int length = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), length);
  if (ec != std::errc() || ptr != digits.data() + digits.size())
    return 0;
  return length;
}

inline std::int64_t
positive_mod(std::int64_t a, std::int64_t m)
{
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

void
check_unit_point(double x)
{
  if (!(x >= 0.0 && x <= 1.0))
    throw Error(ErrorCode::index_out_of_range,
                "evaluation point " + std::to_string(x) + " outside [0,1]");
}

} // namespace

WaveletFamily
WaveletFamily::build(std::string_view requested, int cascade_depth)
{
  if (cascade_depth < kMinDepth || cascade_depth > kMaxDepth)
    throw Error(ErrorCode::depth_out_of_range,
                "cascade depth " + std::to_string(cascade_depth) + " not in [6, 20]");

  WaveletFamily family;
  family.cascade_depth_ = cascade_depth;
  const std::string name = lowercase(requested);

  if (name == "haar") {
    family.name_ = "haar";
    family.kind_ = FamilyKind::haar;
    family.filter_ = { M_SQRT1_2, M_SQRT1_2 };
    family.tau_ = 0;
    family.regularity_ = 1;
    family.psi_sup_ = 1.0;
    return family;
  }

  const int length = parse_daubechies_length(name);
  const auto filter = (length % 2 == 0) ? detail::daubechies_filter(length / 2)
                                        : std::span<const double>{};
  if (filter.empty())
    throw Error(ErrorCode::unsupported_name, "unknown wavelet family '" +
                                               std::string(requested) + "'");

  family.name_ = "d" + std::to_string(length);
  family.kind_ = FamilyKind::daubechies;
  family.filter_.assign(filter.begin(), filter.end());
  family.regularity_ = length / 2;
  const int width = family.support_width();
  while ((1 << family.tau_) < width)
    ++family.tau_;

  // Scaling function at the integers: eigenvector of A(i,m) = sqrt(2) h_{2i-m}
  // for eigenvalue 1, normalized to unit sum.
  const int L = length;
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(L + 1, L);
  for (int i = 0; i < L; ++i) {
    for (int m = 0; m < L; ++m) {
      const int idx = 2 * i - m;
      if (idx >= 0 && idx < L)
        system(i, m) = M_SQRT2 * filter[static_cast<std::size_t>(idx)];
    }
    system(i, i) -= 1.0;
  }
  system.row(L).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(L + 1);
  rhs(L) = 1.0;
  const Eigen::VectorXd at_integers = system.colPivHouseholderQr().solve(rhs);

  auto tables = std::make_shared<Tables>();
  const std::int64_t scale = std::int64_t{ 1 } << cascade_depth;
  const std::int64_t size = width * scale + 1;
  tables->step_inv = static_cast<double>(scale);
  tables->phi.assign(static_cast<std::size_t>(size), 0.0);
  for (int i = 0; i < L; ++i)
    if (i * scale < size)
      tables->phi[static_cast<std::size_t>(i * scale)] = at_integers(i);

  // phi(x) = sqrt(2) sum_k h_k phi(2x - k); at refinement r the new points
  // are odd multiples of 2^{R-r}, and 2x - k lands on coarser points.
  auto& phi = tables->phi;
  for (int r = 1; r <= cascade_depth; ++r) {
    const std::int64_t stride = std::int64_t{ 1 } << (cascade_depth - r);
    for (std::int64_t i = stride; i < size; i += 2 * stride) {
      double value = 0.0;
      for (int k = 0; k < L; ++k) {
        const std::int64_t idx = 2 * i - k * scale;
        if (idx >= 0 && idx < size)
          value += filter[static_cast<std::size_t>(k)] * phi[static_cast<std::size_t>(idx)];
      }
      phi[static_cast<std::size_t>(i)] = M_SQRT2 * value;
    }
  }

  tables->psi.assign(static_cast<std::size_t>(size), 0.0);
  double psi_max = 0.0;
  for (std::int64_t i = 0; i < size; ++i) {
    double value = 0.0;
    for (int k = 0; k < L; ++k) {
      const std::int64_t idx = 2 * i - k * scale;
      if (idx >= 0 && idx < size) {
        const double g = ((k % 2 == 0) ? 1.0 : -1.0) *
                         filter[static_cast<std::size_t>(L - 1 - k)];
        value += g * phi[static_cast<std::size_t>(idx)];
      }
    }
    value *= M_SQRT2;
    tables->psi[static_cast<std::size_t>(i)] = value;
    psi_max = std::max(psi_max, std::abs(value));
  }
  family.psi_sup_ = std::max(1.0, psi_max * 1.01);
  family.tables_ = std::move(tables);
  return family;
}

std::vector<std::string>
family_names()
{
  std::vector<std::string> names{ "haar" };
  for (int length = 4; length <= 20; length += 2)
    names.push_back("d" + std::to_string(length));
  return names;
}

double
WaveletFamily::lookup(const std::vector<double>& table, double x) const
{
  const double pos = x * tables_->step_inv;
  if (!(pos >= 0.0))
    return 0.0;
  const auto last = table.size() - 1;
  const double fl = std::floor(pos);
  if (fl >= static_cast<double>(last))
    return fl == static_cast<double>(last) ? table[last] : 0.0;
  const auto i = static_cast<std::size_t>(fl);
  const double frac = pos - fl;
  return table[i] + frac * (table[i + 1] - table[i]);
}

double
WaveletFamily::phi(double x) const
{
  if (kind_ == FamilyKind::haar)
    return (x >= 0.0 && x < 1.0) ? 1.0 : 0.0;
  return lookup(tables_->phi, x);
}

double
WaveletFamily::psi(double x) const
{
  if (kind_ == FamilyKind::haar) {
    if (x >= 0.0 && x < 0.5)
      return 1.0;
    if (x >= 0.5 && x < 1.0)
      return -1.0;
    return 0.0;
  }
  return lookup(tables_->psi, x);
}

WaveletExpansion
WaveletExpansion::zeros(int tau, int j_max)
{
  if (tau < 0 || j_max < tau - 1 || j_max > kMaxLevel)
    throw Error(ErrorCode::invalid_level_range,
                "levels tau=" + std::to_string(tau) + ", j_max=" + std::to_string(j_max));
  WaveletExpansion e;
  e.tau = tau;
  e.j_max = j_max;
  e.alpha.assign(std::size_t{ 1 } << tau, 0.0);
  for (int j = tau; j <= j_max; ++j)
    e.beta.emplace_back(std::size_t{ 1 } << j, 0.0);
  return e;
}

void
WaveletExpansion::validate() const
{
  if (tau < 0 || j_max < tau - 1 || j_max > kMaxLevel)
    throw Error(ErrorCode::invalid_level_range, "expansion level range");
  if (alpha.size() != (std::size_t{ 1 } << tau) ||
      beta.size() != static_cast<std::size_t>(j_max - tau + 1))
    throw Error(ErrorCode::shape_mismatch, "expansion layout");
  for (int j = tau; j <= j_max; ++j)
    if (level(j).size() != (std::size_t{ 1 } << j))
      throw Error(ErrorCode::shape_mismatch,
                  "level " + std::to_string(j) + " must hold 2^j coefficients");
  auto finite = [](double v) { return std::isfinite(v); };
  bool ok = std::all_of(alpha.begin(), alpha.end(), finite);
  for (const auto& row : beta)
    ok = ok && std::all_of(row.begin(), row.end(), finite);
  if (!ok)
    throw Error(ErrorCode::invalid_argument, "non-finite coefficient");
}

double
eval_periodized(const WaveletFamily& family, BasisKind kind, int j, std::int64_t k, double x)
{
  if (j < family.tau() || j > kMaxLevel || (kind == BasisKind::scaling && j != family.tau()))
    throw Error(ErrorCode::index_out_of_range, "level " + std::to_string(j));
  const std::int64_t count = std::int64_t{ 1 } << j;
  if (k < 0 || k >= count)
    throw Error(ErrorCode::index_out_of_range, "translation " + std::to_string(k));
  check_unit_point(x);

  const double y = std::ldexp(x, j);
  const double fl = std::floor(y);
  const double frac = y - fl;
  const auto cell = static_cast<std::int64_t>(fl);
  double sum = 0.0;
  for (int d = 0; d < family.support_width(); ++d) {
    if (positive_mod(cell - d, count) != k)
      continue;
    sum += kind == BasisKind::scaling ? family.phi(frac + d) : family.psi(frac + d);
  }
  return sum * std::sqrt(static_cast<double>(count));
}

BasisTable::BasisTable(const WaveletFamily& family, std::span<const double> points, int j_max)
  : tau_(family.tau())
  , j_max_(j_max)
  , rows_(j_max - family.tau() + 2)
  , width_(family.support_width())
  , num_points_(points.size())
{
  if (j_max < tau_ - 1 || j_max > kMaxLevel)
    throw Error(ErrorCode::invalid_level_range, "basis table up to level " + std::to_string(j_max));
  entries_.resize(num_points_ * static_cast<std::size_t>(rows_ * width_));
  auto out = entries_.begin();
  for (double x : points) {
    check_unit_point(x);
    for (int row = 0; row < rows_; ++row) {
      const int j = row == 0 ? tau_ : tau_ + row - 1;
      const std::int64_t count = std::int64_t{ 1 } << j;
      const double norm = std::sqrt(static_cast<double>(count));
      const double y = std::ldexp(x, j);
      const double fl = std::floor(y);
      const double frac = y - fl;
      const auto cell = static_cast<std::int64_t>(fl);
      for (int d = 0; d < width_; ++d, ++out) {
        out->index = static_cast<std::int32_t>(positive_mod(cell - d, count));
        out->value = norm * (row == 0 ? family.phi(frac + d) : family.psi(frac + d));
      }
    }
  }
}

std::vector<double>
BasisTable::synthesize(const WaveletExpansion& expansion) const
{
  expansion.validate();
  if (expansion.tau != tau_ || expansion.j_max > j_max_)
    throw Error(ErrorCode::shape_mismatch, "expansion does not fit the basis table");
  const int used_rows = expansion.j_max - tau_ + 2;
  std::vector<double> values(num_points_, 0.0);
  const std::size_t stride = static_cast<std::size_t>(rows_ * width_);
  for (std::size_t i = 0; i < num_points_; ++i) {
    const Entry* e = entries_.data() + i * stride;
    double sum = 0.0;
    for (int row = 0; row < used_rows; ++row) {
      const double* coeffs = row == 0 ? expansion.alpha.data() : expansion.beta[row - 1].data();
      for (int d = 0; d < width_; ++d, ++e)
        sum += coeffs[e->index] * e->value;
    }
    values[i] = sum;
  }
  return values;
}

WaveletExpansion
BasisTable::mean_coefficients(std::span<const double> weights) const
{
  if (!weights.empty() && weights.size() != num_points_)
    throw Error(ErrorCode::shape_mismatch, "weights must match the number of points");
  WaveletExpansion out = WaveletExpansion::zeros(tau_, j_max_);
  if (num_points_ == 0)
    return out;
  const std::size_t stride = static_cast<std::size_t>(rows_ * width_);
  for (std::size_t i = 0; i < num_points_; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w == 0.0)
      continue;
    const Entry* e = entries_.data() + i * stride;
    for (int row = 0; row < rows_; ++row) {
      double* coeffs = row == 0 ? out.alpha.data() : out.beta[row - 1].data();
      for (int d = 0; d < width_; ++d, ++e)
        coeffs[e->index] += w * e->value;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(num_points_);
  for (double& a : out.alpha)
    a *= inv_n;
  for (auto& row : out.beta)
    for (double& b : row)
      b *= inv_n;
  return out;
}

std::vector<double>
synthesize(const WaveletFamily& family, const WaveletExpansion& expansion, std::span<const double> grid)
{
  if (expansion.tau != family.tau())
    throw Error(ErrorCode::shape_mismatch, "expansion tau differs from the family's");
  return BasisTable(family, grid, expansion.j_max).synthesize(expansion);
}

double
parseval_norm(const WaveletExpansion& expansion)
{
  double sum = 0.0;
  for (double a : expansion.alpha)
    sum += a * a;
  for (const auto& row : expansion.beta)
    for (double b : row)
      sum += b * b;
  return std::sqrt(sum);
}

double
besov_seminorm(const WaveletExpansion& expansion, double s, double p, double q)
{
  if (!(s > 0.0) || !(p >= 1.0) || !(q >= 1.0))
    throw Error(ErrorCode::invalid_argument, "Besov parameters need s > 0, p >= 1, q >= 1");
  const bool p_inf = std::isinf(p);
  const bool q_inf = std::isinf(q);
  const double inv_p = p_inf ? 0.0 : 1.0 / p;

  auto level_term = [&](int j, std::span<const double> row) {
    double norm = 0.0;
    if (p_inf) {
      for (double b : row)
        norm = std::max(norm, std::abs(b));
    } else {
      for (double b : row)
        norm += std::pow(std::abs(b), p);
      norm = std::pow(norm, inv_p);
    }
    return std::exp2(j * (s + 0.5 - inv_p)) * norm;
  };

  double acc = 0.0;
  auto add = [&](double term) {
    if (q_inf)
      acc = std::max(acc, term);
    else
      acc += std::pow(term, q);
  };
  add(level_term(expansion.tau - 1, expansion.alpha));
  for (int j = expansion.tau; j <= expansion.j_max; ++j)
    add(level_term(j, expansion.level(j)));
  return q_inf ? acc : std::pow(acc, 1.0 / q);
}

std::vector<double>
midpoint_grid(int size)
{
  if (size < 1)
    throw Error(ErrorCode::invalid_argument, "grid size must be positive");
  std::vector<double> grid(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i)
    grid[static_cast<std::size_t>(i)] = (i + 0.5) / size;
  return grid;
}

WaveletExpansion
analyze(const WaveletFamily& family, const std::function<double(double)>& f, int j_max, int grid_size)
{
  const auto grid = midpoint_grid(grid_size);
  std::vector<double> values(grid.size());
  std::transform(grid.begin(), grid.end(), values.begin(), f);
  return BasisTable(family, grid, j_max).mean_coefficients(values);
}

} // namespace multithresh
