#include "multithresh/error.hpp"
#include "multithresh/eval.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
namespace mt = multithresh;

namespace {

std::vector<double>
to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a)
{
  return { a.data(), a.data() + a.size() };
}

py::array_t<double>
to_array(std::span<const double> v)
{
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict
estimate_result(const mt::MultiThresholdResult& r)
{
  const auto& d = r.diagnostics;
  py::list candidates;
  for (const auto& c : r.estimator.candidates())
    candidates.append(to_array(c.grid_values()));
  py::dict out;
  out["values"] = to_array(r.estimator.grid_values());
  out["candidates"] = candidates;
  out["u_grid"] = d.u_grid;
  out["risks"] = to_array(d.risks);
  out["weights"] = to_array(d.aew_weights.w);
  out["erm_u"] = d.u_grid[d.erm_index];
  out["n"] = d.n;
  out["m"] = d.m;
  out["l"] = d.l;
  out["tau"] = d.tau;
  out["j1"] = d.j1;
  out["rho"] = d.rho;
  return out;
}

mt::LossSpec
loss_for(mt::Model model, double B, int grid)
{
  return model == mt::Model::density ? mt::LossSpec::density(B, grid) : mt::LossSpec::regression(grid);
}

} // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Multi-threshold wavelet estimators with exponential-weight aggregation";

  static py::exception<mt::Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p)
        std::rethrow_exception(p);
    } catch (const mt::Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<mt::WaveletFamily>(m, "WaveletFamily")
    .def(py::init(&mt::WaveletFamily::build), py::arg("name"), py::arg("depth") = 12)
    .def_property_readonly("name", &mt::WaveletFamily::name)
    .def_property_readonly("tau", &mt::WaveletFamily::tau)
    .def_property_readonly("support_width", &mt::WaveletFamily::support_width)
    .def_property_readonly("regularity", &mt::WaveletFamily::regularity)
    .def_property_readonly("psi_sup", &mt::WaveletFamily::psi_sup)
    .def_property_readonly("filter",
                           [](const mt::WaveletFamily& f) { return to_array(f.filter()); })
    .def("phi",
         [](const mt::WaveletFamily& f, py::array_t<double> x) {
           return py::vectorize([&f](double v) { return f.phi(v); })(x);
         })
    .def("psi", [](const mt::WaveletFamily& f, py::array_t<double> x) {
      return py::vectorize([&f](double v) { return f.psi(v); })(x);
    });

  m.def("family_names", &mt::family_names);

  m.def(
    "apply_rule",
    [](const std::string& rule, double u, double x) { return mt::apply_rule(mt::parse_rule(rule), u, x); },
    py::arg("rule"), py::arg("u"), py::arg("x"));

  m.def(
    "verify_ongle",
    [](const std::string& rule, std::vector<double> u_grid, double step, double range,
       std::optional<double> c1, std::optional<double> c2) {
      auto r = mt::ThresholdRule::certified(mt::parse_rule(rule));
      if (c1)
        r.c1 = *c1;
      if (c2)
        r.c2 = *c2;
      const auto report = mt::verify_ongle(r, u_grid, step, range);
      py::dict out;
      out["pass"] = report.pass;
      out["points_checked"] = report.points_checked;
      if (report.witness)
        out["witness"] = py::make_tuple(report.witness->x, report.witness->y, report.witness->u);
      return out;
    },
    py::arg("rule"), py::arg("u_grid") = std::vector<double>{ 0.1, 0.5, 1.0, 2.0 },
    py::arg("step") = 0.01, py::arg("range") = 10.0, py::arg("c1") = py::none(),
    py::arg("c2") = py::none());

  m.def("j1_level", &mt::j1_level, py::arg("n"));
  m.def(
    "split_sample",
    [](long n) {
      const auto s = mt::split_sample(n);
      return py::make_tuple(s.m, s.l);
    },
    py::arg("n"));
  m.def(
    "min_rho",
    [](double B, double psi_sup, const std::string& model) { return mt::min_rho(B, psi_sup, mt::parse_model(model)); },
    py::arg("B"), py::arg("psi_sup"), py::arg("model") = "density");
  m.def(
    "beta_constants",
    [](double c, double K) {
      const auto b = mt::beta_constants(c, K);
      return py::make_tuple(b.beta1, b.beta2);
    },
    py::arg("c"), py::arg("K"));

  m.def("target_names", &mt::target_names);
  m.def(
    "target",
    [](const std::string& model, const std::string& name, py::array_t<double> x) {
      const auto t = mt::find_target(mt::parse_model(model), name);
      auto v = to_vector(x);
      for (auto& e : v)
        e = t.f(e);
      return to_array(v);
    },
    py::arg("model"), py::arg("name"), py::arg("x"));

  m.def(
    "sample_density",
    [](const std::string& target, long n, std::uint64_t seed) {
      const auto s = mt::sample_density(mt::find_target(mt::Model::density, target), n, seed);
      return to_array(s.x());
    },
    py::arg("target"), py::arg("n"), py::arg("seed"));
  m.def(
    "sample_regression",
    [](const std::string& target, long n, std::uint64_t seed, const std::string& noise) {
      const auto s = mt::sample_regression(mt::find_target(mt::Model::regression, target), n,
                                           mt::Noise::parse(noise), seed);
      return py::make_tuple(to_array(s.x()), to_array(s.y()));
    },
    py::arg("target"), py::arg("n"), py::arg("seed"), py::arg("noise") = "bernoulli");

  m.def(
    "estimate_density",
    [](py::array_t<double> x, double B, double rho, const std::string& family,
       const std::string& rule, const std::string& scheme, int grid) {
      const mt::DensitySample data(to_vector(x));
      const auto f = mt::WaveletFamily::build(family, 12);
      return estimate_result(mt::multi_threshold_estimate(
        data, f, mt::ThresholdRule::certified(mt::parse_rule(rule)), loss_for(mt::Model::density, B, grid),
        rho, mt::parse_scheme(scheme)));
    },
    py::arg("x"), py::arg("B"), py::arg("rho"), py::arg("family") = "haar", py::arg("rule") = "hard",
    py::arg("scheme") = "AEW", py::arg("grid") = mt::kDefaultGridSize);
  m.def(
    "estimate_regression",
    [](py::array_t<double> x, py::array_t<double> y, double rho, const std::string& family,
       const std::string& rule, const std::string& scheme, int grid) {
      const mt::RegressionSample data(to_vector(x), to_vector(y));
      const auto f = mt::WaveletFamily::build(family, 12);
      return estimate_result(mt::multi_threshold_estimate(
        data, f, mt::ThresholdRule::certified(mt::parse_rule(rule)),
        loss_for(mt::Model::regression, 1.0, grid), rho, mt::parse_scheme(scheme)));
    },
    py::arg("x"), py::arg("y"), py::arg("rho"), py::arg("family") = "haar", py::arg("rule") = "hard",
    py::arg("scheme") = "AEW", py::arg("grid") = mt::kDefaultGridSize);

  m.def(
    "rate_slope",
    [](std::vector<long> ns, std::vector<double> risks) {
      const auto f = mt::rate_slope(ns, risks);
      return py::make_tuple(f.slope, f.std_error);
    },
    py::arg("ns"), py::arg("risks"));

  m.def(
    "monte_carlo",
    [](const std::string& model, const std::string& target, std::vector<long> ns, int reps,
       std::optional<double> rho, std::uint64_t seed, const std::string& family,
       const std::string& rule) {
      mt::ExperimentConfig c;
      c.model = mt::parse_model(model);
      c.target = target;
      c.ns = std::move(ns);
      c.reps = reps;
      c.rho = rho;
      c.root_seed = seed;
      c.family = family;
      c.rule = mt::parse_rule(rule);
      py::list rows;
      for (const auto& r : mt::monte_carlo(c)) {
        py::dict d;
        d["n"] = r.n;
        d["rep"] = r.rep;
        d["seed"] = r.seed;
        d["rho"] = r.rho;
        d["aew_risk"] = r.aew_risk;
        d["erm_risk"] = r.erm_risk;
        d["universal_risk"] = r.universal_risk;
        d["candidate_risks"] = r.candidate_risks;
        d["weights"] = r.weights;
        rows.append(d);
      }
      return rows;
    },
    py::arg("model"), py::arg("target"), py::arg("ns"), py::arg("reps"), py::arg("rho") = py::none(),
    py::arg("seed") = 42, py::arg("family") = "haar", py::arg("rule") = "hard");
}
