#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <sstream>

#include "monge/cli.hpp"
#include "monge/convergence.hpp"
#include "monge/duality.hpp"
#include "monge/energy.hpp"
#include "monge/error.hpp"
#include "monge/oracles.hpp"
#include "monge/transport.hpp"

namespace py = pybind11;
using namespace monge;

namespace {

std::shared_ptr<const DensitySolution> solve(const MongeProblemSpec& spec, const ApproxParams& params) {
  return std::make_shared<const DensitySolution>(assemble_density(spec, params));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Regularized dual construction for one-dimensional Monge transport";

  // Messages start with the error code name, e.g. "CapacityError: ...".
  py::register_exception<MongeError>(m, "MongeError", PyExc_RuntimeError);

  py::enum_<Assumption>(m, "Assumption").value("I", Assumption::I).value("II", Assumption::II);
  py::enum_<MapVariant>(m, "MapVariant")
      .value("Increasing", MapVariant::Increasing)
      .value("Decreasing", MapVariant::Decreasing);
  py::enum_<EnergyConvention>(m, "EnergyConvention")
      .value("Support", EnergyConvention::Support)
      .value("FullTarget", EnergyConvention::FullTarget);

  py::class_<Interval>(m, "Interval")
      .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
      .def_readwrite("lo", &Interval::lo)
      .def_readwrite("hi", &Interval::hi)
      .def("length", &Interval::length)
      .def("__repr__", [](const Interval& i) { return "Interval(" + std::to_string(i.lo) + ", " + std::to_string(i.hi) + ")"; });

  py::class_<SourceDensity>(m, "SourceDensity")
      .def_static("uniform", [](double a, double b) { return SourceDensity::uniform({a, b}); })
      .def_static("piecewise_linear", &SourceDensity::piecewise_linear, py::arg("nodes"), py::arg("values"))
      .def_static("tabulated", &SourceDensity::tabulated, py::arg("nodes"), py::arg("values"))
      .def("__call__", &SourceDensity::operator())
      .def("mass", &SourceDensity::mass)
      .def("first_moment", &SourceDensity::first_moment)
      .def_property_readonly("nodes", &SourceDensity::nodes)
      .def_property_readonly("values", &SourceDensity::values);

  py::class_<MongeProblemSpec>(m, "ProblemSpec")
      .def(py::init([](std::pair<double, double> source, std::pair<double, double> target, Assumption assumption,
                       double alpha, std::optional<SourceDensity> density) {
             MongeProblemSpec s;
             s.source = {source.first, source.second};
             s.target = {target.first, target.second};
             s.assumption = assumption;
             s.alpha = alpha;
             s.density = density ? *density : SourceDensity::uniform(s.source);
             return s;
           }),
           py::arg("source"), py::arg("target"), py::arg("assumption") = Assumption::I, py::arg("alpha") = 1.0,
           py::arg("density") = py::none())
      .def_readwrite("source", &MongeProblemSpec::source)
      .def_readwrite("target", &MongeProblemSpec::target)
      .def_readwrite("assumption", &MongeProblemSpec::assumption)
      .def_readwrite("alpha", &MongeProblemSpec::alpha)
      .def_readwrite("density", &MongeProblemSpec::density);

  py::class_<ApproxParams>(m, "Params")
      .def(py::init([](double epsilon, int grid_n, double root_tol, double quad_tol) {
             return ApproxParams{epsilon, grid_n, root_tol, quad_tol};
           }),
           py::arg("epsilon") = 1e-2, py::arg("grid_n") = 2001, py::arg("root_tol") = 1e-12,
           py::arg("quad_tol") = 1e-10)
      .def_readwrite("epsilon", &ApproxParams::epsilon)
      .def_readwrite("grid_n", &ApproxParams::grid_n)
      .def_readwrite("root_tol", &ApproxParams::root_tol)
      .def_readwrite("quad_tol", &ApproxParams::quad_tol);

  m.def("validate_spec", [](const MongeProblemSpec& s) { return validate_spec(s).violations; },
        "List of violated conditions; empty when valid.");
  m.def("check_capacity", &check_capacity);
  m.def("capacity_width", &capacity_width);
  m.def("mirror_transform", &mirror_transform);
  m.def("critical_log_lambda", &critical_log_lambda, py::arg("theta"), py::arg("alpha"), py::arg("epsilon"));
  m.def("critical_slope", &critical_slope, py::arg("theta"), py::arg("alpha"), py::arg("epsilon"));
  m.def("eval_E", &eval_E, py::arg("lam"), py::arg("alpha"), py::arg("epsilon"));
  m.def("taylor_remainder_check", &taylor_remainder_check, py::arg("alpha"), py::arg("epsilon"),
        py::arg("n_grid") = 1000);

  py::class_<DensitySolution, std::shared_ptr<DensitySolution>>(m, "DensitySolution")
      .def_property_readonly("epsilon", &DensitySolution::epsilon)
      .def_property_readonly("alpha", &DensitySolution::alpha)
      .def_property_readonly("support", &DensitySolution::support)
      .def_property_readonly("support_endpoint", &DensitySolution::support_endpoint)
      .def_property_readonly("constant", &DensitySolution::constant)
      .def_property_readonly("mass", &DensitySolution::mass)
      .def_property_readonly("expectation", &DensitySolution::expectation)
      .def_property_readonly("nodes", &DensitySolution::nodes)
      .def_property_readonly("values", &DensitySolution::density_values)
      .def("density", &DensitySolution::density)
      .def("slope", &DensitySolution::slope)
      .def("cdf", &DensitySolution::cdf)
      .def("inverse_cdf", &DensitySolution::inverse_cdf)
      .def("theta", [](const DensitySolution& s, double y) { return s.dual().theta(y); })
      .def("log_lambda", [](const DensitySolution& s, double y) { return s.dual().log_lambda(y); });

  m.def("solve", &solve, py::arg("spec"), py::arg("params"), "Assemble the density for one epsilon.");

  py::class_<EnergyReport>(m, "EnergyReport")
      .def_readonly("primal", &EnergyReport::primal)
      .def_readonly("dual", &EnergyReport::dual)
      .def_readonly("xi_total", &EnergyReport::xi_total)
      .def_readonly("gap_primal_dual", &EnergyReport::gap_primal_dual)
      .def_readonly("gap_primal_xi", &EnergyReport::gap_primal_xi)
      .def_readonly("gap_xi_dual", &EnergyReport::gap_xi_dual)
      .def_readonly("full_target_offset", &EnergyReport::full_target_offset)
      .def_readonly("mass_error", &EnergyReport::mass_error)
      .def("relative_gap", &EnergyReport::relative_gap);
  m.def("duality_gap", [](const std::shared_ptr<const DensitySolution>& s) { return duality_gap(*s); });
  m.def("primal_energy",
        [](const std::shared_ptr<const DensitySolution>& s, EnergyConvention c) { return primal_energy(*s, c); },
        py::arg("solution"), py::arg("convention") = EnergyConvention::Support);

  py::class_<TransportMapSolution>(m, "TransportMap")
      .def("__call__", &TransportMapSolution::operator())
      .def_property_readonly("variant", &TransportMapSolution::variant)
      .def_property_readonly("x", &TransportMapSolution::sample_x)
      .def_property_readonly("s", &TransportMapSolution::sample_s)
      .def_property_readonly("cost", &TransportMapSolution::cost);
  m.def("build_map", &build_map, py::arg("solution"), py::arg("variant"), py::arg("samples") = 2001);
  m.def("pushforward_residual", [](const TransportMapSolution& t, int n) { return pushforward_residual(t, n); },
        py::arg("map"), py::arg("n_probe") = 1000);
  m.def("source_mean", &source_mean);

  py::class_<TentDensity>(m, "TentDensity")
      .def_readonly("support", &TentDensity::support)
      .def_readonly("alpha", &TentDensity::alpha)
      .def("__call__", &TentDensity::operator())
      .def("height", &TentDensity::height)
      .def("mean", &TentDensity::mean);
  m.def("tent_limit_density", &tent_limit_density);

  py::class_<GridDensity>(m, "GridDensity")
      .def_readonly("y", &GridDensity::y)
      .def_readonly("u", &GridDensity::u)
      .def_readonly("alpha", &GridDensity::alpha)
      .def_readonly("epsilon", &GridDensity::epsilon)
      .def_readonly("objective", &GridDensity::objective)
      .def_readonly("iterations", &GridDensity::iterations)
      .def("mass", &GridDensity::mass);
  m.def("discrete_expectation_optimizer", &discrete_expectation_optimizer, py::arg("spec"), py::arg("n"));
  m.def("discrete_primal_minimizer", &discrete_primal_minimizer, py::arg("spec"), py::arg("epsilon"), py::arg("n"));
  m.def("grid_violations", &grid_violations);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("epsilon", &SweepRow::epsilon)
      .def_readonly("status", &SweepRow::status)
      .def_readonly("message", &SweepRow::message)
      .def_readonly("support_endpoint", &SweepRow::support_endpoint)
      .def_readonly("expectation", &SweepRow::expectation)
      .def_readonly("primal", &SweepRow::primal)
      .def_readonly("dual", &SweepRow::dual)
      .def_readonly("gap", &SweepRow::gap)
      .def_readonly("dist_tent", &SweepRow::dist_tent)
      .def("ok", &SweepRow::ok);
  m.def("epsilon_sweep", [](const MongeProblemSpec& spec, const std::vector<double>& eps, const ApproxParams& base) {
    return epsilon_sweep(spec, eps, base);
  });

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::vector<const char*> argv{"monge"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(rc, out.str(), err.str());
  }, "Run the command line with the given arguments; returns (exit_code, stdout, stderr).");
}
