#pragma once

#include "multithresh/estimate.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace multithresh {

//! Documented Besov membership B^s_{p,q}; infinite entries stand for
//! "arbitrarily large" (s) or the sup modification (p, q).
struct Smoothness
{
  double s;
  double p;
  double q;
};

struct TargetFunction
{
  std::string name;
  std::function<double(double)> f;
  double B;                // sup bound on [0,1]
  Smoothness smoothness;
  bool is_density;

  double operator()(double x) const { return f(x); }
};

//! Every target comes in a density variant (integrates to one, bound
//! B >= 1) and a regression variant (values inside [0.1, 0.9] unless
//! constant). Names: uniform, bump, triangle, twostep.
std::vector<TargetFunction> target_library();

TargetFunction find_target(Model model, std::string_view name);

std::vector<std::string> target_names();

//! i.i.d. draws by rejection from the uniform envelope B. Proposals and
//! acceptance draws come from two streams derived from seed, so a constant
//! density returns the proposal stream unchanged.
DensitySample sample_density(const TargetFunction& target, long n, std::uint64_t seed);

enum class NoiseKind
{
  bernoulli,
  uniform,
};

struct Noise
{
  NoiseKind kind = NoiseKind::bernoulli;
  double delta = 0.0; // half-width for uniform noise

  //! "bernoulli" or "uniform:<delta>".
  static Noise parse(std::string_view text);
  std::string str() const;
};

//! X ~ U[0,1]; Y | X ~ Bernoulli(f(X)) or Y = f(X) + U[-delta, delta].
RegressionSample sample_regression(const TargetFunction& target,
                                   long n,
                                   const Noise& noise,
                                   std::uint64_t seed);

//! Plain text, one observation per line: "x" or "x,y". Blank lines and
//! lines starting with '#' are skipped.
void write_sample(std::ostream& out, const DensitySample& sample);
void write_sample(std::ostream& out, const RegressionSample& sample);
DensitySample read_density_sample(std::istream& in);
RegressionSample read_regression_sample(std::istream& in);

} // namespace multithresh
