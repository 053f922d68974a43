#pragma once

// The harmonic extension operator
//   Q_t f(x) = (1/c(m,d)) \int f(t y + x) (1 + |y|^2)^{-(m+d)/2} dy
// evaluated by direct quadrature, by subordination of the heat semigroup and
// by Monte Carlo, together with its derivatives and the identities it obeys.

#include <vector>

#include "beckner/fields.hpp"
#include "beckner/jet.hpp"
#include "beckner/measures.hpp"
#include "beckner/numerics.hpp"

namespace beckner {

struct QtmParams {
  double m = 6.0;
  int d = 1;
  double t = 1.0;
  std::vector<double> x;  // empty means the origin

  void validate() const;
  std::vector<double> point() const;  // x padded to length d
};

/// Direct quadrature of the defining integral.  t = 0 returns f(x) exactly.
Estimate qtm_quadrature(const DifferentiableField& f, const QtmParams& p, const QuadratureConfig& cfg);

/// \int_0^\infty P_s f(x) sigma_m(s, t) ds after u = t^2 / 4s, which turns
/// sigma_m into the Gamma(m/2) density; P_s f is Gaussian quadrature.
Estimate qtm_subordinated(const DifferentiableField& f, const QtmParams& p, const QuadratureConfig& cfg);

/// Average of f over exact draws of q_t(x, .).
Estimate qtm_mc(const DifferentiableField& f, const QtmParams& p, const MonteCarloConfig& cfg);

/// Taylor jet of (x, t) -> Q_t f(x) in d + 1 variables (t last), obtained by
/// differentiating f(x + t z) under the integral.  d + 1 <= 4.
struct QtmJet {
  Jet jet;
  double error_bound = 0.0;  // sup over Taylor coefficients
};
QtmJet qtm_jet(const DifferentiableField& f, const QtmParams& p, int order, const QuadratureConfig& cfg);

/// |Delta^{(m)} Q f| at (x, t) by central differences of qtm_quadrature.
struct HarmonicityResidual {
  double residual = 0.0;
  double scale = 0.0;  // largest absolute term of the operator
};
HarmonicityResidual harmonicity_residual(const DifferentiableField& f, const QtmParams& p, double step,
                                         const QuadratureConfig& cfg);
/// Delta^{(m)} F for an analytic field F on the half-space R^d x (0, inf).
HarmonicityResidual harmonicity_residual_analytic(const DifferentiableField& F, double m, std::span<const double> xt);

/// E[S^p g(X_S)] against t^{2p} Gamma(m/2 - p) / (4^p Gamma(m/2)) Q_t^{(m-2p)} g(x).
struct MomentIdentity {
  Estimate lhs_quadrature;
  Estimate lhs_mc;
  Estimate rhs;
  double gap_quadrature = 0.0;  // relative to |rhs|
  double gap_mc = 0.0;          // absolute
};
MomentIdentity moment_identity_gap(const DifferentiableField& g, double p_exp, const QtmParams& params,
                                   const QuadratureConfig& cfg, const MonteCarloConfig& mc);

/// Slope of log |R(t)| against log t with
///   R(t) = Q_t f(x) - f(x) - t^2 Df/(2(m-2)) - t^4 D^2 f/(8(m-2)(m-4)).
struct TaylorFit {
  double slope = 0.0;
  std::vector<double> t;
  std::vector<double> remainder;
  std::vector<double> error_bound;
};
TaylorFit taylor_remainder_order(const DifferentiableField& f, double m, std::span<const double> x,
                                 std::span<const double> t_grid, const QuadratureConfig& cfg);

}  // namespace beckner
