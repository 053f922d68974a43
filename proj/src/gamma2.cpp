#include "beckner/gamma2.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "beckner/errors.hpp"
#include "beckner/qtm.hpp"

namespace beckner {

namespace {

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

void check_point(const DiffusionOperator& op, std::span<const double> x) {
  if (static_cast<int>(x.size()) != op.dim) throw ParamError(op.name() + ": point has wrong dimension");
  if (!op.contains(x)) throw DomainError(op.name() + ": point outside the domain");
}

void check_jet(const DiffusionOperator& op, const Jet& f, int min_order) {
  if (f.dim() != op.dim) throw ParamError(op.name() + ": jet has wrong dimension");
  if (f.order() < min_order) throw ParamError(op.name() + ": jet order too low");
}

Jet squared_norm_jet(std::span<const double> x, int order) {
  const int dim = static_cast<int>(x.size());
  Jet r = Jet::constant(dim, order, 0.0);
  for (int i = 0; i < dim; ++i) {
    const Jet v = Jet::variable(dim, order, i, x[i]);
    r += v * v;
  }
  return r;
}

}  // namespace

std::string DiffusionOperator::name() const {
  switch (kind) {
    case OperatorKind::euclidean:
      return "euclidean(" + std::to_string(d) + ")";
    case OperatorKind::halfspace:
      return "halfspace(" + std::to_string(d) + ", m=" + format_g(m) + ")";
    case OperatorKind::sphere_stereo:
      return "sphere_stereo(" + std::to_string(d) + ")";
  }
  return "operator";
}

bool DiffusionOperator::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim) return false;
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return kind != OperatorKind::halfspace || x[dim - 1] > 0.0;
}

double DiffusionOperator::conformal_factor(std::span<const double> x) const {
  if (kind != OperatorKind::sphere_stereo) return 1.0;
  const double q = 1.0 + squared_norm(x);
  return 0.25 * q * q;
}

std::vector<double> DiffusionOperator::drift(std::span<const double> x) const {
  std::vector<double> X(dim, 0.0);
  if (kind == OperatorKind::halfspace) {
    X[dim - 1] = (1.0 - m) / x[dim - 1];
  } else if (kind == OperatorKind::sphere_stereo) {
    const double c = -0.5 * (d - 2) * (1.0 + squared_norm(x));
    for (int i = 0; i < dim; ++i) X[i] = c * x[i];
  }
  return X;
}

Jet DiffusionOperator::conformal_factor_jet(std::span<const double> x, int order) const {
  if (kind != OperatorKind::sphere_stereo) return Jet::constant(dim, order, 1.0);
  const Jet q = squared_norm_jet(x, order) + 1.0;
  return 0.25 * (q * q);
}

std::vector<Jet> DiffusionOperator::drift_jet(std::span<const double> x, int order) const {
  std::vector<Jet> X(dim, Jet::constant(dim, order, 0.0));
  if (kind == OperatorKind::halfspace) {
    X[dim - 1] = (1.0 - m) * pow(Jet::variable(dim, order, dim - 1, x[dim - 1]), -1.0);
  } else if (kind == OperatorKind::sphere_stereo) {
    const Jet q = (squared_norm_jet(x, order) + 1.0) * (-0.5 * (d - 2));
    for (int i = 0; i < dim; ++i) X[i] = q * Jet::variable(dim, order, i, x[i]);
  }
  return X;
}

std::vector<double> DiffusionOperator::ricci(std::span<const double> x) const {
  std::vector<double> R(static_cast<std::size_t>(dim * dim), 0.0);
  if (kind == OperatorKind::halfspace) {
    const double t = x[dim - 1];
    R[dim * dim - 1] = (1.0 - m) / (t * t);
  } else if (kind == OperatorKind::sphere_stereo) {
    const double g = 1.0 / conformal_factor(x);
    for (int i = 0; i < dim; ++i) R[i * dim + i] = (d - 1) * g;
  }
  return R;
}

std::vector<double> DiffusionOperator::drift_square(std::span<const double> x) const {
  std::vector<double> X = drift(x);
  const double g = 1.0 / conformal_factor(x);
  for (double& v : X) v *= g;
  std::vector<double> S(static_cast<std::size_t>(dim * dim));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) S[i * dim + j] = X[i] * X[j];
  return S;
}

DiffusionOperator euclidean_operator(int d) {
  if (d < 1 || d > kMaxJetDim) throw DomainError("euclidean_operator: needs 1 <= d <= 4");
  return {OperatorKind::euclidean, d, d, 0.0};
}

DiffusionOperator halfspace_operator(int d, double m) {
  if (d < 1 || d + 1 > kMaxJetDim) throw DomainError("halfspace_operator: needs 1 <= d <= 3");
  if (!std::isfinite(m)) throw ParamError("halfspace_operator: m must be finite");
  return {OperatorKind::halfspace, d + 1, d, m};
}

DiffusionOperator sphere_operator(int d) {
  if (d < 1 || d > kMaxJetDim) throw DomainError("sphere_operator: needs 1 <= d <= 4");
  return {OperatorKind::sphere_stereo, d, d, 0.0};
}

double apply_operator(const DiffusionOperator& op, const Jet& f, std::span<const double> x) {
  check_point(op, x);
  check_jet(op, f, 2);
  const std::vector<double> X = op.drift(x);
  double s = op.conformal_factor(x) * f.laplacian();
  for (int i = 0; i < op.dim; ++i) s += X[i] * f.grad(i);
  return s;
}

double carre_du_champ(const DiffusionOperator& op, const Jet& f, const Jet& g, std::span<const double> x) {
  check_point(op, x);
  check_jet(op, f, 1);
  check_jet(op, g, 1);
  double s = 0.0;
  for (int i = 0; i < op.dim; ++i) s += f.grad(i) * g.grad(i);
  return op.conformal_factor(x) * s;
}

Jet carre_du_champ_jet(const DiffusionOperator& op, const Jet& f, const Jet& g, std::span<const double> x) {
  check_point(op, x);
  check_jet(op, f, 1);
  check_jet(op, g, 1);
  const int k = std::min(f.order(), g.order()) - 1;
  Jet s = Jet::constant(op.dim, k, 0.0);
  for (int i = 0; i < op.dim; ++i) s += f.diff(i).truncate(k) * g.diff(i).truncate(k);
  return op.conformal_factor_jet(x, k) * s;
}

double gamma2(const DiffusionOperator& op, const Jet& fin, std::span<const double> x) {
  check_point(op, x);
  check_jet(op, fin, 3);
  const Jet f = fin.truncate(3);
  const Jet G = carre_du_champ_jet(op, f, f, x);
  const double LG = apply_operator(op, G, x);

  // L f to first order
  const Jet a1 = op.conformal_factor_jet(x, 1);
  const std::vector<Jet> X1 = op.drift_jet(x, 1);
  Jet lap = Jet::constant(op.dim, 1, 0.0);
  Jet adv = Jet::constant(op.dim, 1, 0.0);
  for (int i = 0; i < op.dim; ++i) {
    const Jet fi = f.diff(i);
    lap += fi.diff(i);
    adv += X1[i] * fi.truncate(1);
  }
  const Jet Lf = a1 * lap + adv;
  return 0.5 * LG - carre_du_champ(op, f, Lf, x);
}

double gamma2_bochner(const DiffusionOperator& op, const Jet& f, std::span<const double> x) {
  check_point(op, x);
  check_jet(op, f, 2);
  const int n = op.dim;
  const double a = op.conformal_factor(x);
  // Levi-Civita correction for the metric g = delta / a, d_i phi = -d_i a / (2a)
  const Jet aj = op.conformal_factor_jet(x, 1);
  std::vector<double> dphi(n), df(n);
  double dphi_df = 0.0;
  for (int i = 0; i < n; ++i) {
    dphi[i] = -0.5 * aj.grad(i) / a;
    df[i] = f.grad(i);
    dphi_df += dphi[i] * df[i];
  }
  double hess = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double h = f.hess(i, j) - dphi[j] * df[i] - dphi[i] * df[j];
      if (i == j) h += dphi_df;
      hess += h * h;
    }
  const std::vector<double> R = op.ricci(x);
  double ric = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ric += R[i * n + j] * df[i] * df[j];
  return a * a * (hess + ric);
}

double apply_operator(const DiffusionOperator& op, const DifferentiableField& f, std::span<const double> x) {
  if (f.dim() != op.dim) throw ParamError("apply_operator: field has wrong dimension");
  check_point(op, x);
  return apply_operator(op, f.jet(x, 2), x);
}

double carre_du_champ(const DiffusionOperator& op, const DifferentiableField& f, const DifferentiableField& g,
                      std::span<const double> x) {
  if (f.dim() != op.dim || g.dim() != op.dim) throw ParamError("carre_du_champ: field has wrong dimension");
  check_point(op, x);
  return carre_du_champ(op, f.jet(x, 1), g.jet(x, 1), x);
}

double gamma2(const DiffusionOperator& op, const DifferentiableField& f, std::span<const double> x) {
  if (f.dim() != op.dim) throw ParamError("gamma2: field has wrong dimension");
  check_point(op, x);
  return gamma2(op, f.jet(x, 3), x);
}

Gamma2Report gamma2_report(const DiffusionOperator& op, const DifferentiableField& f, std::span<const double> x) {
  if (f.dim() != op.dim) throw ParamError("gamma2_report: field has wrong dimension");
  check_point(op, x);
  const Jet j = f.jet(x, 3);
  Gamma2Report r;
  r.definition = gamma2(op, j, x);
  r.bochner = gamma2_bochner(op, j, x);
  r.discrepancy = std::abs(r.definition - r.bochner) / std::max(1.0, std::abs(r.definition));
  return r;
}

double cd_residual(const DiffusionOperator& op, const DifferentiableField& f, std::span<const double> x,
                   const CDParams& cd) {
  if (cd.n == 0.0) throw ParamError("cd_residual: n = 0 has no 1/n term");
  if (f.dim() != op.dim) throw ParamError("cd_residual: field has wrong dimension");
  check_point(op, x);
  const Jet j = f.jet(x, 3);
  const double Lf = apply_operator(op, j, x);
  return gamma2(op, j, x) - cd.rho * carre_du_champ(op, j, j, x) - Lf * Lf / cd.n;
}

QmResidual qm_residual(const DiffusionOperator& op, std::span<const double> x) {
  if (op.kind != OperatorKind::halfspace) throw ParamError("qm_residual: needs a half-space operator");
  check_point(op, x);
  const int n_dim = op.dim;
  const double n = op.d - op.m + 2.0;
  const std::vector<Jet> X = op.drift_jet(x, 1);
  std::vector<double> Xv(n_dim);
  for (int i = 0; i < n_dim; ++i) Xv[i] = X[i].value();
  QmResidual r;
  for (int i = 0; i < n_dim; ++i)
    for (int j = 0; j < n_dim; ++j) {
      const double ric = -0.5 * (X[j].grad(i) + X[i].grad(j));
      const double xx = Xv[i] * Xv[j];
      r.residual = std::max(r.residual, std::abs((n - n_dim) * ric - xx));
      r.scale = std::max(r.scale, std::abs(xx));
    }
  return r;
}

PhiSurface phi_power_z(double beta) {
  return {"y^" + format_g(beta) + " z", [beta](double y, double z) {
            if (!(y > 0.0)) throw DomainError("phi_power_z: needs y > 0");
            const double yb = std::pow(y, beta);
            PhiPartials p;
            p.phi = yb * z;
            p.p1 = beta * yb / y * z;
            p.p2 = yb;
            p.p11 = beta * (beta - 1.0) * yb / (y * y) * z;
            p.p12 = beta * yb / y;
            p.p22 = 0.0;
            return p;
          }};
}

std::string to_string(PhiBranch b) {
  switch (b) {
    case PhiBranch::none:
      return "none";
    case PhiBranch::gradient:
      return "gradient";
    case PhiBranch::degenerate_flat:
      return "degenerate_flat";
    case PhiBranch::degenerate_convex:
      return "degenerate_convex";
  }
  return "none";
}

PhiReport phi_conditions(const PhiSurface& phi, double n, int d, double rho,
                         std::span<const std::array<double, 2>> grid, double tol) {
  PhiReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& [y, z] : grid) {
    const PhiPartials p = phi.eval(y, z);
    PhiPointReport pt;
    pt.y = y;
    pt.z = z;
    const double denom = n * p.p2 + 2.0 * (n - 1.0) * z * p.p22;
    pt.margins[0] = p.p2;
    pt.margins[1] = p.p2 * (n + 1.0 - d) / (n - d) + 2.0 * z * p.p22;
    pt.margins[2] = (n - d) * denom;
    const double cross = denom != 0.0 ? 2.0 * (n - 1.0) * z * p.p12 * p.p12 / denom : 0.0;
    pt.margins[3] = 2.0 * rho * p.p2 + p.p11 - cross;
    const double size3 = std::abs(2.0 * rho * p.p2) + std::abs(p.p11) + std::abs(cross);
    const double size = std::abs(p.p2) + std::abs(z * p.p22) + std::abs(z * p.p12) + std::abs(p.p11);
    const double eq_tol = tol * std::max(size, 1e-300);

    if (pt.margins[0] > 0.0 && pt.margins[1] > 0.0 && pt.margins[2] > 0.0 && pt.margins[3] >= -tol * size3) {
      pt.branch = PhiBranch::gradient;
    } else if (std::abs(p.p2) <= eq_tol) {
      if (std::abs(z * p.p22) <= eq_tol && std::abs(z * p.p12) <= eq_tol && z * p.p11 >= -eq_tol)
        pt.branch = PhiBranch::degenerate_flat;
      else if (z * p.p22 > 0.0 &&
               p.p11 * p.p22 - p.p12 * p.p12 >= -tol * (std::abs(p.p11 * p.p22) + p.p12 * p.p12))
        pt.branch = PhiBranch::degenerate_convex;
    }
    if (pt.branch == PhiBranch::none) rep.pass = false;
    for (double v : pt.margins) rep.worst_margin = std::min(rep.worst_margin, v);
    rep.points.push_back(pt);
  }
  if (grid.empty()) rep.worst_margin = 0.0;
  return rep;
}

ThetaReport theta_admissible(const ThetaFunction& theta, double n, std::span<const double> grid, double tol) {
  if (!(n < 0.0)) throw ParamError("theta_admissible: needs n < 0");
  ThetaReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double c = 2.0 * (n - 1.0) / n;
  for (double u : grid) {
    const auto [th, d1, d2] = theta(u);
    if (!(th > 0.0)) throw DomainError("theta_admissible: theta must be > 0 on the grid");
    const double lhs = c * d1 * d1, rhs = th * d2;
    const double margin = rhs - lhs;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -tol * (std::abs(lhs) + std::abs(rhs))) rep.admissible = false;
  }
  if (grid.empty()) rep.worst_margin = 0.0;
  return rep;
}

SubharmonicResult subharmonic_residual(const DiffusionOperator& op, const Jet& F, double beta,
                                       std::span<const double> xt) {
  check_point(op, xt);
  check_jet(op, F, 3);
  SubharmonicResult r;
  r.F = F.value();
  if (!(r.F > 0.0)) throw DomainError("subharmonic_residual: F must be > 0");
  const Jet G = carre_du_champ_jet(op, F, F, xt);
  r.gamma = G.value();
  r.gamma2 = gamma2(op, F, xt);
  const double gamma_gamma = carre_du_champ(op, F.truncate(2), G, xt);
  const double p2 = std::pow(r.F, beta);
  const double p11 = beta * (beta - 1.0) * p2 / (r.F * r.F) * r.gamma;
  const double p12 = beta * p2 / r.F;
  const double terms[3] = {2.0 * p2 * r.gamma2, p11 * r.gamma, 2.0 * p12 * gamma_gamma};
  for (double v : terms) {
    r.residual += v;
    r.scale += std::abs(v);
  }
  return r;
}

SubharmonicResult subharmonic_residual(const DiffusionOperator& op, const DifferentiableField& f, double beta,
                                       std::span<const double> x, double t, const QuadratureConfig& cfg) {
  if (op.kind != OperatorKind::halfspace) throw ParamError("subharmonic_residual: needs a half-space operator");
  if (static_cast<int>(x.size()) != op.d) throw ParamError("subharmonic_residual: x has wrong dimension");
  const QtmJet qj = qtm_jet(f, {op.m, op.d, t, std::vector<double>(x.begin(), x.end())}, 3, cfg);
  std::vector<double> xt(x.begin(), x.end());
  xt.push_back(t);
  SubharmonicResult r = subharmonic_residual(op, qj.jet, beta, xt);
  r.jet_error = qj.error_bound;
  return r;
}

namespace {

struct EuclideanTerms {
  double f, gamma, gamma2, lap, gamma_gamma;
};

EuclideanTerms euclidean_terms(const DifferentiableField& f, int d, std::span<const double> x) {
  if (f.dim() != d || static_cast<int>(x.size()) != d) throw ParamError("field, point and d must agree");
  const DiffusionOperator op = euclidean_operator(d);
  const Jet j = f.jet(x, 3);
  const Jet G = carre_du_champ_jet(op, j, j, x);
  return {j.value(), G.value(), gamma2(op, j, x), j.laplacian(), carre_du_champ(op, j.truncate(2), G, x)};
}

PointwiseResidual collect(double lhs, std::initializer_list<double> rhs_terms) {
  PointwiseResidual r{lhs, std::abs(lhs)};
  for (double v : rhs_terms) {
    r.residual -= v;
    r.scale += std::abs(v);
  }
  return r;
}

}  // namespace

PointwiseResidual cd1_residual(const DifferentiableField& f, double beta, int d, std::span<const double> x) {
  if (!(beta > -1.0 && beta <= 0.0)) throw ParamError("cd1_residual: needs beta in (-1, 0]");
  const EuclideanTerms e = euclidean_terms(f, d, x);
  if (!(e.f > 0.0)) throw DomainError("cd1_residual: f must be > 0");
  const double a = (beta + 1.0) / (d * (beta + 1.0) - 2.0 * beta);
  return collect(e.gamma2, {a * e.lap * e.lap, -beta * e.gamma_gamma / e.f,
                            -0.5 * beta * (beta - 1.0) * e.gamma * e.gamma / (e.f * e.f)});
}

PointwiseResidual reinforced_cd_residual(const DifferentiableField& f, int d, std::span<const double> x) {
  if (d < 2) throw ParamError("reinforced_cd_residual: needs d >= 2");
  const EuclideanTerms e = euclidean_terms(f, d, x);
  if (e.gamma == 0.0) throw DomainError("reinforced_cd_residual: Gamma(f) vanishes");
  const double dev = e.gamma_gamma / (2.0 * e.gamma) - e.lap / d;
  return collect(e.gamma2, {e.lap * e.lap / d, d / (d - 1.0) * dev * dev});
}

}  // namespace beckner
