#include "multithresh/sim.hpp"

#include "multithresh/error.hpp"
#include "multithresh/random.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>

namespace multithresh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kAuditGrid = 1 << 16;
constexpr double kBumpConcentration = 1.0;

double
von_mises(double x)
{
  return std::exp(kBumpConcentration * std::cos(2.0 * std::numbers::pi * (x - 0.5))) /
         std::cyl_bessel_i(0.0, kBumpConcentration);
}

// Sup and inf of f over the audit grid.
std::pair<double, double>
audit_range(const TargetFunction& target)
{
  double lo = kInf;
  double hi = -kInf;
  for (int i = 0; i < kAuditGrid; ++i) {
    const double v = target.f((i + 0.5) / kAuditGrid);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return { lo, hi };
}

std::string
format_real(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool
parse_real(std::string_view text, double& out)
{
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
    text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (text.empty())
    return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

// Calls on_line(line_number, fields) for every data line.
template<typename OnLine>
void
for_each_record(std::istream& in, OnLine&& on_line)
{
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    while (!view.empty() && (view.back() == '\r' || view.back() == ' '))
      view.remove_suffix(1);
    if (view.empty() || view.front() == '#')
      continue;
    on_line(number, view);
  }
}

[[noreturn]] void
bad_line(long number, std::string_view line, const char* expected)
{
  throw Error(ErrorCode::parse_error, "line " + std::to_string(number) + ": expected " +
                                        expected + ", got '" + std::string(line) + "'");
}

} // namespace

std::vector<TargetFunction>
target_library()
{
  const double bump_max = von_mises(0.5);
  return {
    { "uniform", [](double) { return 1.0; }, 1.0, { kInf, kInf, kInf }, true },
    { "bump", von_mises, bump_max, { kInf, kInf, kInf }, true },
    { "triangle",
      [](double x) { return 2.0 - std::abs(4.0 * x - 2.0); },
      2.0,
      { 1.0, kInf, kInf },
      true },
    { "twostep",
      [](double x) { return (x >= 0.25 && x < 0.75) ? 1.5 : 0.5; },
      1.5,
      { 1.0, 1.0, kInf },
      true },
    { "uniform", [](double) { return 0.5; }, 0.5, { kInf, kInf, kInf }, false },
    { "bump",
      [](double x) {
        return 0.2 + 0.6 * std::exp(kBumpConcentration *
                                    (std::cos(2.0 * std::numbers::pi * (x - 0.5)) - 1.0));
      },
      0.8,
      { kInf, kInf, kInf },
      false },
    { "triangle",
      [](double x) { return 0.1 + 0.8 * (1.0 - std::abs(2.0 * x - 1.0)); },
      0.9,
      { 1.0, kInf, kInf },
      false },
    { "twostep",
      [](double x) { return (x >= 0.25 && x < 0.75) ? 0.75 : 0.25; },
      0.75,
      { 1.0, 1.0, kInf },
      false },
  };
}

TargetFunction
find_target(Model model, std::string_view name)
{
  for (auto& target : target_library())
    if (target.name == name && target.is_density == (model == Model::density))
      return target;
  throw Error(ErrorCode::unsupported_name, "unknown target '" + std::string(name) + "'");
}

std::vector<std::string>
target_names()
{
  return { "uniform", "bump", "triangle", "twostep" };
}

DensitySample
sample_density(const TargetFunction& target, long n, std::uint64_t seed)
{
  if (!target.is_density)
    throw Error(ErrorCode::non_density_target, target.name + " is not a density");
  if (n < kMinSampleSize)
    throw Error(ErrorCode::n_too_small, "n=" + std::to_string(n) + " below 16");
  Rng proposals(derive_seed(seed, 0));
  Rng acceptance(derive_seed(seed, 1));
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(n));
  while (static_cast<long>(x.size()) < n) {
    const double candidate = proposals.uniform();
    if (acceptance.uniform() * target.B < target.f(candidate))
      x.push_back(candidate);
  }
  return DensitySample(std::move(x));
}

Noise
Noise::parse(std::string_view text)
{
  if (text == "bernoulli")
    return { NoiseKind::bernoulli, 0.0 };
  constexpr std::string_view prefix = "uniform:";
  double delta = 0.0;
  if (text.substr(0, prefix.size()) == prefix && parse_real(text.substr(prefix.size()), delta) &&
      delta > 0.0 && delta <= 0.5)
    return { NoiseKind::uniform, delta };
  throw Error(ErrorCode::config_invalid,
              "noise must be 'bernoulli' or 'uniform:<delta>' with 0 < delta <= 0.5");
}

std::string
Noise::str() const
{
  return kind == NoiseKind::bernoulli ? "bernoulli" : "uniform:" + format_real(delta);
}

RegressionSample
sample_regression(const TargetFunction& target, long n, const Noise& noise, std::uint64_t seed)
{
  if (n < kMinSampleSize)
    throw Error(ErrorCode::n_too_small, "n=" + std::to_string(n) + " below 16");
  const auto [lo, hi] = audit_range(target);
  const double margin = noise.kind == NoiseKind::uniform ? noise.delta : 0.0;
  if (lo < margin || hi > 1.0 - margin)
    throw Error(ErrorCode::noise_range_violation,
                target.name + " leaves [" + format_real(margin) + ", " +
                  format_real(1.0 - margin) + "]");

  Rng design(derive_seed(seed, 0));
  Rng noise_stream(derive_seed(seed, 1));
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> y(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = design.uniform();
    const double mean = target.f(x[i]);
    const double draw = noise_stream.uniform();
    if (noise.kind == NoiseKind::bernoulli)
      y[i] = draw < mean ? 1.0 : 0.0;
    else
      y[i] = mean + noise.delta * (2.0 * draw - 1.0);
  }
  return RegressionSample(std::move(x), std::move(y));
}

void
write_sample(std::ostream& out, const DensitySample& sample)
{
  for (double x : sample.x())
    out << format_real(x) << '\n';
}

void
write_sample(std::ostream& out, const RegressionSample& sample)
{
  for (std::size_t i = 0; i < sample.size(); ++i)
    out << format_real(sample.x()[i]) << ',' << format_real(sample.y()[i]) << '\n';
}

DensitySample
read_density_sample(std::istream& in)
{
  std::vector<double> x;
  for_each_record(in, [&](long number, std::string_view line) {
    double v = 0.0;
    if (!parse_real(line, v))
      bad_line(number, line, "a real number");
    if (v < 0.0 || v > 1.0)
      bad_line(number, line, "a value in [0,1]");
    x.push_back(v);
  });
  return DensitySample(std::move(x));
}

RegressionSample
read_regression_sample(std::istream& in)
{
  std::vector<double> x;
  std::vector<double> y;
  for_each_record(in, [&](long number, std::string_view line) {
    const auto comma = line.find(',');
    double xv = 0.0;
    double yv = 0.0;
    if (comma == std::string_view::npos || !parse_real(line.substr(0, comma), xv) ||
        !parse_real(line.substr(comma + 1), yv))
      bad_line(number, line, "'x,y'");
    if (xv < 0.0 || xv > 1.0 || yv < 0.0 || yv > 1.0)
      bad_line(number, line, "a pair in the unit square");
    x.push_back(xv);
    y.push_back(yv);
  });
  return RegressionSample(std::move(x), std::move(y));
}

} // namespace multithresh
