#include "beckner/sphere.hpp"

#include <algorithm>
#include <cmath>

#include "beckner/errors.hpp"
#include "beckner/gamma2.hpp"

namespace beckner {

namespace {

void check_dim(int d, const char* who) {
  if (d < 2) throw DomainError(std::string(who) + ": needs d >= 2");
}

/// Components of g integrated against mu_S; each Estimate carries the
/// shared sup-norm bound.
std::vector<Estimate> sphere_integrals(int d, std::size_t n_out,
                                       const std::function<void(std::span<const double>, std::span<double>)>& g,
                                       const QuadratureConfig& cfg) {
  if (d > 3) throw DomainError("sphere integrals: quadrature is available for d <= 3");
  const VectorEstimate v = integrate_measure(g, n_out, sphere_measure(d).radial(), cfg);
  std::vector<Estimate> out(n_out);
  for (std::size_t k = 0; k < n_out; ++k) out[k] = {v.value[k], v.error_bound, v.n_evals, ErrorKind::quadrature_bound};
  return out;
}

double sphere_gamma(const DifferentiableField& f, std::span<const double> y) {
  const std::vector<double> g = f.gradient(y);
  double s = 0.0, r2 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    s += g[i] * g[i];
    r2 += y[i] * y[i];
  }
  return 0.25 * (1.0 + r2) * (1.0 + r2) * s;
}

}  // namespace

SphereGeometry make_sphere(int d) {
  check_dim(d, "make_sphere");
  return {d, norm_const(d, d), sphere_measure(d)};
}

DifferentiableField sphere_eigenfunction(int d) {
  check_dim(d, "sphere_eigenfunction");
  return quotient(add_constant(scale(quadratic(d), -1.0), 1.0), make_power_of_rho(2.0, d));
}

DifferentiableField log_rho_field(int d) { return log_field(make_power_of_rho(1.0, d)); }

EigenfunctionCheck eigenfunction_u(int d, std::span<const double> x) {
  check_dim(d, "eigenfunction_u");
  const DiffusionOperator op = sphere_operator(d);
  const Jet j = sphere_eigenfunction(d).jet(x, 2);
  EigenfunctionCheck r;
  r.u = j.value();
  r.laplacian = apply_operator(op, j, x);
  r.gamma = carre_du_champ(op, j, j, x);
  r.laplacian_residual = std::abs(r.laplacian + d * r.u);
  r.gamma_residual = std::abs(r.gamma - (1.0 - r.u * r.u));
  return r;
}

LogRhoCheck log_rho_identities(int d, std::span<const double> x) {
  check_dim(d, "log_rho_identities");
  const DiffusionOperator op = sphere_operator(d);
  const Jet j = log_rho_field(d).jet(x, 2);
  const double u = sphere_eigenfunction(d)(x);
  LogRhoCheck r;
  r.laplacian = apply_operator(op, j, x);
  r.gamma = carre_du_champ(op, j, j, x);
  r.laplacian_residual = std::abs(r.laplacian - (1.0 + (d - 1) * u) / (2.0 * (1.0 + u)));
  r.gamma_residual = std::abs(r.gamma - (1.0 - u) / (4.0 * (1.0 + u)));
  return r;
}

double k_function(double m, int d, std::span<const double> x) {
  check_dim(d, "k_function");
  if (m == d - 2.0) throw DomainError("k_function: d - m - 2 must be nonzero");
  const DiffusionOperator op = sphere_operator(d);
  const Jet j = log_rho_field(d).jet(x, 2);
  const double lap = apply_operator(op, j, x), gam = carre_du_champ(op, j, j, x);
  return (m - d) * (m - d) * (2.0 * lap / (d - m - 2.0) + gam);
}

double constant_R(double m, int d, std::span<const double> x) {
  check_dim(d, "constant_R");
  if (!(m > d)) throw DomainError("constant_R: needs m > d");
  const double beta = (d + 2.0 - m) / (m - d);
  double r2 = 1.0;
  for (double v : x) r2 += v * v;
  const double coef = 2.0 * (beta + 1.0) * (beta + 2.0) / (m - 2.0) * norm_const_ratio(d, m - 2.0, d);
  return norm_const_ratio(d, m, d) * r2 - coef * k_function(m, d, x);
}

double constant_R_closed_form(double m, int d) {
  check_dim(d, "constant_R_closed_form");
  return norm_const_ratio(d, m, d) * (3.0 * d + m - 2.0) / (d + m - 2.0);
}

void SphereBecknerParams::validate() const {
  if (d < 2) throw ParamError("SphereBecknerParams: needs d >= 2");
  if (!(m >= d + 2.0)) throw ParamError("SphereBecknerParams: needs m >= d + 2");
}

double SphereBecknerParams::p() const { return 1.0 + 2.0 / (m - d); }

double SphereBecknerParams::A() const {
  validate();
  return std::pow(norm_const_ratio(d, m, d), 2.0 / (m - d)) * (m + d - 2.0) / (m + 3.0 * d - 2.0);
}

double SphereBecknerParams::gradient_constant() const { return 16.0 / ((m + 2.0 - d) * (3.0 * d - 2.0 + m)); }

namespace {

/// lhs = int f^2; rhs = a (int |f|^{2/p})^p + c int Gamma_S(f), with the
/// signed mean at p = 2.
DeficitReport beckner_type(const DifferentiableField& f, double p, double a, double c, int d,
                           const QuadratureConfig& cfg, DeficitParams params) {
  if (f.dim() != d) throw ParamError(params.inequality + ": field dimension differs from d");
  const bool signed_mean = p == 2.0;
  const double q = 2.0 / p;
  const auto I = sphere_integrals(
      d, 3,
      [&](std::span<const double> y, std::span<double> out) {
        const double v = f(y);
        out[0] = v * v;
        out[1] = signed_mean ? v : std::pow(std::abs(v), q);
        out[2] = sphere_gamma(f, y);
      },
      cfg);
  const double mean = I[1].value;
  if (!signed_mean && !(mean > 0.0)) throw DomainError(params.inequality + ": int |f|^{2/p} vanishes");
  Estimate rhs;
  rhs.value = a * std::pow(mean, p) + c * I[2].value;
  rhs.error_bound = a * p * std::pow(std::abs(mean), p - 1.0) * I[1].error_bound + c * I[2].error_bound;
  rhs.n_evals = I[0].n_evals;
  return make_deficit(I[0], rhs, std::move(params));
}

}  // namespace

DeficitReport sphere_beckner_deficit(const DifferentiableField& f, const SphereBecknerParams& params,
                                     const QuadratureConfig& cfg) {
  params.validate();
  DeficitParams dp;
  dp.inequality = "sphere_beckner";
  dp.field_id = f.id();
  dp.d = params.d;
  dp.m = params.m;
  dp.p = params.p();
  return beckner_type(f, params.p(), params.A(), params.gradient_constant(), params.d, cfg, std::move(dp));
}

DeficitReport classical_beckner_deficit(const DifferentiableField& f, double p, int d, const QuadratureConfig& cfg) {
  check_dim(d, "classical_beckner_deficit");
  if (!(p > 1.0 && p <= 2.0)) throw ParamError("classical_beckner_deficit: needs p in (1, 2]");
  DeficitParams dp;
  dp.inequality = "classical_sphere_beckner";
  dp.field_id = f.id();
  dp.d = d;
  dp.p = p;
  return beckner_type(f, p, 1.0, 2.0 * (p - 1.0) / (p * d), d, cfg, std::move(dp));
}

SobolevTerms sobolev_terms(const DifferentiableField& f, int d, const QuadratureConfig& cfg) {
  if (d < 3) throw DomainError("sobolev_terms: needs d >= 3");
  if (f.dim() != d) throw ParamError("sobolev_terms: field dimension differs from d");
  const double q = 2.0 * d / (d - 2.0);
  const auto I = sphere_integrals(
      d, 3,
      [&](std::span<const double> y, std::span<double> out) {
        const double v = f(y);
        out[0] = std::pow(std::abs(v), q);
        out[1] = v * v;
        out[2] = sphere_gamma(f, y);
      },
      cfg);
  SobolevTerms t;
  t.field_id = f.id();
  const double s = std::max(I[0].value, 0.0);
  t.sobolev.value = std::pow(s, 2.0 / q);
  t.sobolev.error_bound = s > 0.0 ? (2.0 / q) * std::pow(s, 2.0 / q - 1.0) * I[0].error_bound : 0.0;
  t.l2 = I[1];
  t.energy = I[2];
  if (t.energy.value > t.energy.error_bound) t.ratio = (t.sobolev.value - t.l2.value) / t.energy.value;
  return t;
}

SobolevFit nash_sobolev_probe(const std::vector<DifferentiableField>& family, int d, const QuadratureConfig& cfg) {
  if (d < 3) throw DomainError("nash_sobolev_probe: needs d >= 3");
  SobolevFit fit;
  for (const auto& f : family) {
    fit.members.push_back(sobolev_terms(f, d, cfg));
    fit.C = std::max(fit.C, fit.members.back().ratio);
  }
  return fit;
}

}  // namespace beckner
