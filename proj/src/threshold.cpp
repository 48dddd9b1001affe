#include "multithresh/threshold.hpp"

#include "multithresh/error.hpp"

#include <algorithm>
#include <cmath>

namespace multithresh {

RuleKind
parse_rule(std::string_view name)
{
  if (name == "hard")
    return RuleKind::hard;
  if (name == "soft")
    return RuleKind::soft;
  if (name == "garrote")
    return RuleKind::garrote;
  throw Error(ErrorCode::unsupported_name, "unknown thresholding rule '" + std::string(name) + "'");
}

const char*
to_string(RuleKind kind)
{
  switch (kind) {
    case RuleKind::hard: return "hard";
    case RuleKind::soft: return "soft";
    case RuleKind::garrote: return "garrote";
  }
  return "unknown";
}

double
apply_rule(RuleKind kind, double u, double x)
{
  if (!(std::abs(x) >= u))
    return 0.0;
  switch (kind) {
    case RuleKind::hard: return x;
    case RuleKind::soft: return std::copysign(std::abs(x) - u, x);
    case RuleKind::garrote: return x - u * u / x;
  }
  return 0.0;
}

ThresholdPlan
make_plan(double rho, int u, int tau, int j1, int n)
{
  if (tau < 0 || j1 < tau)
    throw Error(ErrorCode::invalid_level_range,
                "need tau <= j1, got tau=" + std::to_string(tau) + ", j1=" + std::to_string(j1));
  if (n < 2 || !(rho > 0.0) || !std::isfinite(rho))
    throw Error(ErrorCode::invalid_argument, "need n >= 2 and rho > 0");

  ThresholdPlan plan{ u, rho, tau, j1, n, {} };
  plan.t.reserve(static_cast<std::size_t>(j1 - tau + 1));
  const double scale = rho / (2.0 * std::sqrt(static_cast<double>(n)));
  for (int j = tau; j <= j1; ++j)
    plan.t.push_back(scale * std::sqrt(static_cast<double>(std::max(0, j - u))));
  return plan;
}

WaveletExpansion
threshold_expansion(const WaveletExpansion& raw, const ThresholdPlan& plan, const ThresholdRule& rule)
{
  raw.validate();
  if (raw.tau != plan.tau || raw.j_max != plan.j1)
    throw Error(ErrorCode::shape_mismatch, "expansion levels do not match the threshold plan");
  WaveletExpansion out = raw;
  for (int j = plan.tau; j <= plan.j1; ++j) {
    const double t = plan.at(j);
    if (t <= 0.0)
      continue;
    for (double& b : out.level(j))
      b = apply_rule(rule.kind, t, b);
  }
  return out;
}

OngleReport
verify_ongle(const ThresholdRule& rule, std::span<const double> u_grid, double step, double range)
{
  if (!(step > 0.0) || u_grid.empty())
    throw Error(ErrorCode::invalid_argument, "verify_ongle needs a positive step and u values");
  const double u_max = *std::max_element(u_grid.begin(), u_grid.end());
  if (!(range >= 5.0 * u_max))
    throw Error(ErrorCode::invalid_argument, "range must be at least 5 max(u)");

  OngleReport report;

  const auto steps = static_cast<long>(std::llround(2.0 * range / step));
  std::vector<double> axis(static_cast<std::size_t>(steps + 1));
  for (long i = 0; i <= steps; ++i)
    axis[static_cast<std::size_t>(i)] = -range + static_cast<double>(i) * step;

  for (double u : u_grid) {
    for (long ix = 0; ix <= steps; ++ix) {
      const double x = axis[static_cast<std::size_t>(ix)];
      const double fx = apply_rule(rule.kind, u, x);
      for (long iy = 0; iy <= steps; ++iy) {
        const double y = axis[static_cast<std::size_t>(iy)];
        const double gap = std::abs(static_cast<double>(ix - iy) * step);
        const double lhs = (fx - y) * (fx - y);
        const double near = std::min(std::abs(y), rule.c2 * u);
        const double rhs = rule.c1 * (near * near + (gap >= 0.5 * u ? gap * gap : 0.0));
        ++report.points_checked;
        if (lhs > rhs * (1.0 + 1e-12) + 1e-15) {
          report.pass = false;
          report.witness = OngleWitness{ x, y, u, lhs, rhs };
          return report;
        }
      }
    }
  }
  return report;
}

} // namespace multithresh
