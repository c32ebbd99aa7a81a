#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "wcreg/adversary.hpp"
#include "wcreg/differentiator.hpp"
#include "wcreg/error.hpp"
#include "wcreg/experiment.hpp"
#include "wcreg/modulus.hpp"
#include "wcreg/variational.hpp"

namespace py = pybind11;
using namespace wcreg;

namespace {

std::vector<double> to_list(const GridFunction& f) { return {f.values().begin(), f.values().end()}; }

NoiseModel noise_model(const std::string& name) {
  if (name == "uniform") return NoiseModel::UniformIid;
  if (name == "alternating") return NoiseModel::AlternatingWorstCase;
  throw PreconditionError("noise must be 'uniform' or 'alternating', got '" + name + "'");
}

CompactumSpec compactum(const std::string& phi, double c, double a) {
  if (phi == "sup") return CompactumSpec::sup_norm(c);
  if (phi == "holder") return CompactumSpec::holder(a, c);
  throw PreconditionError("phi must be 'sup' or 'holder', got '" + phi + "'");
}

py::dict pair_dict(const AdversarialPair& p) {
  py::dict d;
  d["kind"] = to_string(p.kind);
  d["M"] = p.M;
  d["delta"] = p.delta;
  d["v1"] = to_list(p.v1);
  d["v2"] = to_list(p.v2);
  d["separation"] = p.separation;
  d["feasible"] = p.certificate1.feasible && p.certificate2.feasible;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Worst-case regularization toolkit";

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("integrate", [](std::vector<double> v) { return to_list(integrate(GridFunction(std::move(v)))); },
        py::arg("values"));
  m.def("sup_norm", [](std::vector<double> v) { return sup_norm(GridFunction(std::move(v))); }, py::arg("values"));
  m.def("holder_norm", [](std::vector<double> v, double a) { return discrete_holder_norm(GridFunction(std::move(v)), a); },
        py::arg("values"), py::arg("a"));
  m.def(
      "add_noise",
      [](std::vector<double> g, double delta, const std::string& model, std::uint64_t seed) {
        return to_list(add_noise(GridFunction(std::move(g)), delta, noise_model(model), seed).g_delta);
      },
      py::arg("g"), py::arg("delta"), py::arg("model") = "uniform", py::arg("seed") = 0);

  m.def("step_size", [](double delta, double a, double M, double dx) { return step_size(delta, HolderParams(a, M), dx); },
        py::arg("delta"), py::arg("a"), py::arg("M"), py::arg("grid_spacing"));
  m.def("error_bound", [](double delta, double a, double M, double h) { return error_bound(delta, HolderParams(a, M), h); },
        py::arg("delta"), py::arg("a"), py::arg("M"), py::arg("h"));
  m.def(
      "differentiate",
      [](std::vector<double> g, double delta, double h) {
        return to_list(differentiate(NoisyData(GridFunction(std::move(g)), delta), h));
      },
      py::arg("g"), py::arg("delta"), py::arg("h"));
  m.def(
      "regularize",
      [](std::vector<double> g, double delta, double a, double M) {
        const auto out = regularize(NoisyData(GridFunction(std::move(g)), delta), HolderParams(a, M));
        py::dict d;
        d["u_delta"] = to_list(out.u_delta);
        d["h"] = out.h_used;
        d["eta"] = out.eta;
        return d;
      },
      py::arg("g"), py::arg("delta"), py::arg("a") = 2.0, py::arg("M") = 1.0);

  m.def("sine_pair", [](double M, double delta, std::size_t n) { return pair_dict(sine_pair(M, delta, n)); },
        py::arg("M"), py::arg("delta"), py::arg("n"));
  m.def("bump_pair", [](double M, double delta, std::size_t n) { return pair_dict(bump_pair(M, delta, n)); },
        py::arg("M"), py::arg("delta"), py::arg("n"));

  m.def(
      "minimize",
      [](std::vector<double> g, double delta, const std::string& phi, double c, double a, std::size_t budget,
         std::uint64_t seed) {
        const auto r = minimize(NoisyData(GridFunction(std::move(g)), delta), compactum(phi, c, a),
                                ProblemSpec::integration(), budget, seed);
        py::dict d;
        d["v_delta"] = to_list(r.v_delta);
        d["objective"] = r.objective_value;
        d["misfit"] = r.misfit;
        d["phi"] = r.phi_value;
        d["certificate"] = r.certificate_bound;
        return d;
      },
      py::arg("g"), py::arg("delta"), py::arg("phi") = "sup", py::arg("c") = 2.0, py::arg("a") = 1.0,
      py::arg("budget") = 20000, py::arg("seed") = 0);

  m.def(
      "modulus_constants",
      [](double delta, double c, std::size_t levels) {
        const auto lat = LatticeCompactum::constants(uniform_levels(-c, c, levels), CompactumSpec::sup_norm(c));
        return modulus_bruteforce(lat, delta, ProblemSpec::integration());
      },
      py::arg("delta"), py::arg("c") = 1.0, py::arg("levels") = 21);

  m.def(
      "run",
      [](const std::string& command, const std::string& config_text) {
        auto config = parse_config(config_text);
        config.command = command;
        return run_experiment(config).stdout_text;
      },
      py::arg("command"), py::arg("config") = "");
}
