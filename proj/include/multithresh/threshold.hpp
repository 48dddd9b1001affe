#pragma once

#include "multithresh/wavelet.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace multithresh {

enum class RuleKind
{
  hard,
  soft,
  garrote,
};

RuleKind parse_rule(std::string_view name);
const char* to_string(RuleKind kind);

//! A thresholding rule together with the constants (c1, c2) for which
//! |rule_u(x) - y|^2 <= c1 (min(|y|, c2 u)^2 + |x - y|^2 1{|x - y| >= u/2})
//! holds for every x, y and u > 0.
struct ThresholdRule
{
  RuleKind kind = RuleKind::hard;
  double c1 = 8.0;
  double c2 = 2.0;

  //! Constants certified by brute force over the default grid (see the
  //! threshold unit tests). One pair covers all three rules.
  static ThresholdRule certified(RuleKind kind) { return { kind, 8.0, 2.0 }; }
};

//! hard: x 1{|x| >= u}; soft: sign(x)(|x| - u) 1{|x| >= u};
//! garrote: (x - u^2/x) 1{|x| >= u}.
double apply_rule(RuleKind kind, double u, double x);

inline double
apply_rule(const ThresholdRule& rule, double u, double x)
{
  return apply_rule(rule.kind, u, x);
}

//! Effective per-level thresholds t_j = rho sqrt((j - u)_+) / (2 sqrt(n))
//! for tau <= j <= j1.
struct ThresholdPlan
{
  int u = 0;
  double rho = 0;
  int tau = 0;
  int j1 = 0;
  int n = 0;
  std::vector<double> t;

  double at(int j) const { return t.at(static_cast<std::size_t>(j - tau)); }
};

ThresholdPlan make_plan(double rho, int u, int tau, int j1, int n);

//! Keeps alpha, replaces beta_{j,k} by rule_{t_j}(beta_{j,k}) where t_j > 0.
WaveletExpansion threshold_expansion(const WaveletExpansion& raw,
                                     const ThresholdPlan& plan,
                                     const ThresholdRule& rule);

struct OngleWitness
{
  double x;
  double y;
  double u;
  double lhs;
  double rhs;
};

struct OngleReport
{
  bool pass = true;
  std::size_t points_checked = 0;
  std::optional<OngleWitness> witness; // first violation
};

//! Brute-force check of the rule's (c1, c2) on the grid
//! x, y in [-range, range] with spacing step, u in u_grid.
OngleReport verify_ongle(const ThresholdRule& rule,
                         std::span<const double> u_grid,
                         double step,
                         double range);

} // namespace multithresh
