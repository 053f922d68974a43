#pragma once

// Carre du champ, iterated carre du champ and curvature-dimension checks for
// operators of the form L = a(x) Delta + X on a chart of R^dim.

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "beckner/fields.hpp"
#include "beckner/jet.hpp"
#include "beckner/numerics.hpp"

namespace beckner {

enum class OperatorKind { euclidean, halfspace, sphere_stereo };

/// Built-in operators.  Coordinates of the half-space are (x_1..x_d, t), t last.
struct DiffusionOperator {
  OperatorKind kind = OperatorKind::euclidean;
  int dim = 1;     // chart dimension
  int d = 1;       // base dimension (dim - 1 for the half-space)
  double m = 0.0;  // half-space only

  std::string name() const;
  bool contains(std::span<const double> x) const;
  double conformal_factor(std::span<const double> x) const;
  std::vector<double> drift(std::span<const double> x) const;
  Jet conformal_factor_jet(std::span<const double> x, int order) const;
  std::vector<Jet> drift_jet(std::span<const double> x, int order) const;
  /// Closed-form Ric(L) as a covariant tensor in chart coordinates, row-major.
  std::vector<double> ricci(std::span<const double> x) const;
  /// X (x) X with X lowered by the metric, row-major.
  std::vector<double> drift_square(std::span<const double> x) const;
};

DiffusionOperator euclidean_operator(int d);
/// Delta_x + d^2/dt^2 + ((1 - m)/t) d/dt on R^d x (0, inf); d + 1 <= 4.
DiffusionOperator halfspace_operator(int d, double m);
/// Sphere Laplacian in stereographic coordinates.
DiffusionOperator sphere_operator(int d);

// Jet routes.  A jet is expanded at x, has dimension op.dim and order >= 2
// (Gamma) or >= 3 (Gamma_2).
double apply_operator(const DiffusionOperator& op, const Jet& f, std::span<const double> x);
double carre_du_champ(const DiffusionOperator& op, const Jet& f, const Jet& g, std::span<const double> x);
/// Jet of Gamma(f, g) one order below min(order f, order g).
Jet carre_du_champ_jet(const DiffusionOperator& op, const Jet& f, const Jet& g, std::span<const double> x);
/// 1/2 L Gamma(f) - Gamma(f, L f)
double gamma2(const DiffusionOperator& op, const Jet& f, std::span<const double> x);
/// Hessian norm plus Ric(L)(grad f, grad f).
double gamma2_bochner(const DiffusionOperator& op, const Jet& f, std::span<const double> x);

// Field routes.
double apply_operator(const DiffusionOperator& op, const DifferentiableField& f, std::span<const double> x);
double carre_du_champ(const DiffusionOperator& op, const DifferentiableField& f, const DifferentiableField& g,
                      std::span<const double> x);
double gamma2(const DiffusionOperator& op, const DifferentiableField& f, std::span<const double> x);

struct Gamma2Report {
  double definition = 0.0;
  double bochner = 0.0;
  double discrepancy = 0.0;  // |definition - bochner| / max(1, |definition|)
};
Gamma2Report gamma2_report(const DiffusionOperator& op, const DifferentiableField& f, std::span<const double> x);

struct CDParams {
  double rho = 0.0;
  double n = 1.0;
};
/// Gamma_2(f) - rho Gamma(f) - (L f)^2 / n.
double cd_residual(const DiffusionOperator& op, const DifferentiableField& f, std::span<const double> x,
                   const CDParams& cd);

/// Largest entry of (n - dim) Ric(L) - X (x) X with n = d - m + 2, where Ric(L)
/// is recomputed from the drift jet as -sym(grad X).
struct QmResidual {
  double residual = 0.0;
  double scale = 0.0;  // largest entry of X (x) X
};
QmResidual qm_residual(const DiffusionOperator& op, std::span<const double> x);

struct PhiPartials {
  double phi = 0.0, p1 = 0.0, p2 = 0.0, p11 = 0.0, p12 = 0.0, p22 = 0.0;
};
struct PhiSurface {
  std::string id;
  std::function<PhiPartials(double y, double z)> eval;
};
/// Phi(y, z) = y^beta z on (0, inf) x [0, inf).
PhiSurface phi_power_z(double beta);

enum class PhiBranch { none, gradient, degenerate_flat, degenerate_convex };
std::string to_string(PhiBranch b);

struct PhiPointReport {
  double y = 0.0, z = 0.0;
  PhiBranch branch = PhiBranch::none;
  std::array<double, 4> margins{};  // the four conditions of the main set
};
struct PhiReport {
  bool pass = true;
  double worst_margin = 0.0;  // smallest margin of the main set over the grid
  std::vector<PhiPointReport> points;
};
/// Equalities and the non-strict inequality are tested to tol times the size
/// of their terms.
PhiReport phi_conditions(const PhiSurface& phi, double n, int d, double rho,
                         std::span<const std::array<double, 2>> grid, double tol = 1e-12);

/// theta, theta', theta''
using ThetaFunction = std::function<std::array<double, 3>(double)>;
struct ThetaReport {
  bool admissible = true;
  double worst_margin = 0.0;  // min of theta theta'' - 2((n-1)/n) theta'^2
};
ThetaReport theta_admissible(const ThetaFunction& theta, double n, std::span<const double> grid, double tol = 1e-12);

struct SubharmonicResult {
  double residual = 0.0;
  double scale = 0.0;  // sum of absolute terms
  double F = 0.0;
  double gamma = 0.0;
  double gamma2 = 0.0;
  double jet_error = 0.0;  // quadrature error bound on the jet of F
};
/// L(F^beta Gamma(F)) assembled as 2 Phi_2 Gamma_2 + Phi_11 Gamma + 2 Phi_12
/// Gamma(F, Gamma F) for a harmonic F given by its jet (order >= 3).
SubharmonicResult subharmonic_residual(const DiffusionOperator& op, const Jet& F, double beta,
                                       std::span<const double> xt);
/// Same with F = Q_t^{(m)} f at (x, t).
SubharmonicResult subharmonic_residual(const DiffusionOperator& op, const DifferentiableField& f, double beta,
                                       std::span<const double> x, double t, const QuadratureConfig& cfg);

struct PointwiseResidual {
  double residual = 0.0;
  double scale = 0.0;  // sum of absolute terms
};
/// Gamma_2(f) - (b+1)/(d(b+1) - 2b) (Delta f)^2 + b Gamma(f, Gamma f)/f
///   + (b(b-1)/2) Gamma(f)^2/f^2 for the Euclidean Laplacian.
PointwiseResidual cd1_residual(const DifferentiableField& f, double beta, int d, std::span<const double> x);
/// Gamma_2(f) - (Delta f)^2/d - (d/(d-1)) (Gamma(f, Gamma f)/(2 Gamma f) - Delta f/d)^2.
PointwiseResidual reinforced_cd_residual(const DifferentiableField& f, int d, std::span<const double> x);

}  // namespace beckner
