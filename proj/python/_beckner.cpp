#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "beckner/errors.hpp"
#include "beckner/fields.hpp"
#include "beckner/gamma2.hpp"
#include "beckner/inequalities.hpp"
#include "beckner/measures.hpp"
#include "beckner/qtm.hpp"
#include "beckner/sphere.hpp"
#include "beckner/suite.hpp"

namespace py = pybind11;
using namespace beckner;

PYBIND11_MODULE(_beckner, m) {
  m.doc() = "Numerical verification of Beckner-type inequalities";

  static py::exception<Error> base(m, "Error");
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ParamError>(m, "ParamError", base.ptr());
  py::register_exception<NonConvergence>(m, "NonConvergence", base.ptr());
  py::register_exception<IllConditioned>(m, "IllConditioned", base.ptr());
  py::register_exception<AdmissibilityError>(m, "AdmissibilityError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<UnknownCheck>(m, "UnknownCheck", base.ptr());

  py::class_<QuadratureConfig>(m, "QuadratureConfig")
      .def(py::init<>())
      .def_readwrite("abs_tol", &QuadratureConfig::abs_tol)
      .def_readwrite("rel_tol", &QuadratureConfig::rel_tol)
      .def_readwrite("max_evals", &QuadratureConfig::max_evals);

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("value", &Estimate::value)
      .def_readonly("error_bound", &Estimate::error_bound)
      .def_readonly("n_evals", &Estimate::n_evals)
      .def("__repr__", [](const Estimate& e) {
        return "Estimate(" + std::to_string(e.value) + " +- " + std::to_string(e.error_bound) + ")";
      });

  py::class_<DifferentiableField>(m, "Field")
      .def_property_readonly("dim", &DifferentiableField::dim)
      .def_property_readonly("id", &DifferentiableField::id)
      .def("__call__", [](const DifferentiableField& f, const std::vector<double>& y) { return f(y); })
      .def("gradient", [](const DifferentiableField& f, const std::vector<double>& y) { return f.gradient(y); })
      .def("laplacian", [](const DifferentiableField& f, const std::vector<double>& y) { return f.laplacian(y); });

  m.def("constant_field", &constant_field, py::arg("dim"), py::arg("c"));
  m.def("coordinate", &coordinate, py::arg("dim"), py::arg("i"));
  m.def("quadratic", &quadratic, py::arg("dim"));
  m.def("cosine", &cosine, py::arg("k"));
  m.def("gaussian_bump", &gaussian_bump, py::arg("a"), py::arg("c"));
  m.def("positive_bump", &positive_bump, py::arg("a"), py::arg("c"));
  m.def("power_of_rho", &make_power_of_rho, py::arg("alpha"), py::arg("d"));
  m.def("add_constant", &add_constant);
  m.def("scale", &scale);

  m.def("norm_const", &norm_const, py::arg("m"), py::arg("d"));
  m.def("second_moment", &second_moment, py::arg("b"), py::arg("d"));
  m.def(
      "integrate_cauchy",
      [](const DifferentiableField& f, double b, int d, const QuadratureConfig& cfg) {
        return integrate(f, make_cauchy(b, d), cfg);
      },
      py::arg("f"), py::arg("b"), py::arg("d"), py::arg("cfg") = QuadratureConfig{});

  auto qp = [](double mm, int d, double t, std::vector<double> x) { return QtmParams{mm, d, t, std::move(x)}; };
  m.def(
      "qtm_quadrature",
      [qp](const DifferentiableField& f, double mm, double t, std::vector<double> x, const QuadratureConfig& cfg) {
        return qtm_quadrature(f, qp(mm, f.dim(), t, std::move(x)), cfg);
      },
      py::arg("f"), py::arg("m"), py::arg("t"), py::arg("x"), py::arg("cfg") = QuadratureConfig{});
  m.def(
      "qtm_subordinated",
      [qp](const DifferentiableField& f, double mm, double t, std::vector<double> x, const QuadratureConfig& cfg) {
        return qtm_subordinated(f, qp(mm, f.dim(), t, std::move(x)), cfg);
      },
      py::arg("f"), py::arg("m"), py::arg("t"), py::arg("x"), py::arg("cfg") = QuadratureConfig{});

  m.def(
      "qm_residual",
      [](int d, double mm, const std::vector<double>& xt) { return qm_residual(halfspace_operator(d, mm), xt).residual; },
      py::arg("d"), py::arg("m"), py::arg("xt"));

  py::class_<DeficitReport>(m, "DeficitReport")
      .def_readonly("lhs", &DeficitReport::lhs)
      .def_readonly("rhs", &DeficitReport::rhs)
      .def_readonly("deficit", &DeficitReport::deficit)
      .def_readonly("tolerance", &DeficitReport::tolerance)
      .def_readonly("certified", &DeficitReport::certified)
      .def_readonly("saturated", &DeficitReport::saturated);

  m.def(
      "beckner_cauchy_deficit",
      [](const DifferentiableField& f, double b, double p, const QuadratureConfig& cfg, bool probe) {
        return beckner_cauchy_deficit(f, b, p, f.dim(), cfg, RangeMode{probe});
      },
      py::arg("f"), py::arg("b"), py::arg("p"), py::arg("cfg") = QuadratureConfig{}, py::arg("probe") = false);
  m.def(
      "poincare_cauchy_deficit",
      [](const DifferentiableField& f, double b, const QuadratureConfig& cfg) {
        return poincare_cauchy_deficit(f, b, f.dim(), cfg);
      },
      py::arg("f"), py::arg("b"), py::arg("cfg") = QuadratureConfig{});
  m.def(
      "sphere_beckner_deficit",
      [](const DifferentiableField& f, double mm, const QuadratureConfig& cfg) {
        return sphere_beckner_deficit(f, {f.dim(), mm}, cfg);
      },
      py::arg("f"), py::arg("m"), py::arg("cfg") = QuadratureConfig{});
  m.def(
      "sphere_A", [](int d, double mm) { return SphereBecknerParams{d, mm}.A(); }, py::arg("d"), py::arg("m"));
  m.def(
      "optimal_constant_rayleigh",
      [](double b, int d, int basis_size, double growth_margin) {
        return optimal_constant_rayleigh(b, d, basis_size, {growth_margin, 1e12}).constant;
      },
      py::arg("b"), py::arg("d"), py::arg("basis_size") = 6, py::arg("growth_margin") = 0.01);

  m.def(
      "run_suite_json",
      [](const std::string& suite, bool deterministic) {
        SuiteConfig c;
        c.suite = suite;
        c.deterministic_timestamps = deterministic;
        py::gil_scoped_release release;
        return to_json(run_suite(c));
      },
      py::arg("suite"), py::arg("deterministic_timestamps") = true);
  m.def("explain_check", &explain_check, py::arg("id"));
  m.def("check_ids", &check_ids);
}
