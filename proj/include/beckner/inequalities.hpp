#pragma once

// Beckner, Poincare and Phi-entropy inequalities for Q_t^{(m)} and for the
// generalized Cauchy measures nu_b, with an independent Rayleigh-quotient
// estimate of the optimal Poincare constant.

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "beckner/deficit.hpp"
#include "beckner/fields.hpp"
#include "beckner/numerics.hpp"

namespace beckner {

/// Deficit checks refuse p outside the proven range unless probe is set; a
/// probe run is marked in params.inequality with a "probe:" prefix.
struct RangeMode {
  bool probe = false;
};

/// (p/(p-1)) (Q_t^m(f^2) - Q_t^m(f^{2/p})^p) <= (2t^2/(m-2)) Q_t^{m-2}(|grad f|^2).
/// m >= d + 2, p in [1 + 2/(m-d), 2].  At p = 2 the mean is signed.
DeficitReport beckner_qt_deficit(const DifferentiableField& f, double m, double p, double t,
                                 std::span<const double> x, const QuadratureConfig& cfg, RangeMode mode = {});
/// Q_t^m(f^2) - Q_t^m(f)^2 <= (t^2/(m-2)) Q_t^{m-2}(|grad f|^2) for any f.
DeficitReport poincare_qt_deficit(const DifferentiableField& f, double m, double t, std::span<const double> x,
                                  const QuadratureConfig& cfg);

/// (p/(p-1)) [nu_b(f^2) - nu_b(f^{2/p})^p] <= (1/(b-1)) nu_b(|grad f|^2 (1+|y|^2)).
/// b >= d + 1, p in [1 + 1/(b-d), 2].
DeficitReport beckner_cauchy_deficit(const DifferentiableField& f, double b, double p, int d,
                                     const QuadratureConfig& cfg, RangeMode mode = {});
/// nu_b(f^2) - nu_b(f)^2 <= (1/(2(b-1))) nu_b(|grad f|^2 (1+|y|^2)).
DeficitReport poincare_cauchy_deficit(const DifferentiableField& f, double b, int d, const QuadratureConfig& cfg);

/// n evenly spaced points on [lo, 2].
std::vector<double> p_grid(double lo, int n = 9);

/// Phi and its first four derivatives on an interval I = (lo, hi).
struct PhiEntropySpec {
  std::string id;
  std::function<std::array<double, 5>(double)> derivs;
  double lo = -1e300;
  double hi = 1e300;
};
PhiEntropySpec phi_power(double q);  // x^q on (0, inf)
PhiEntropySpec phi_square();         // x^2 on R
PhiEntropySpec phi_exp();            // e^x on R

struct AdmissibilityReport {
  bool admissible = true;
  double worst_margin = 0.0;
  std::vector<double> margins;  // Phi'' Phi'''' - 2((n-1)/n) Phi'''^2 per point
};
/// n < 0: Phi'' > 0 and 2((n-1)/n) Phi'''^2 <= Phi'' Phi''''.  n = 0 is the
/// limit of that condition, Phi''' = 0.  Points outside I are skipped.
AdmissibilityReport admissibility_check(const PhiEntropySpec& spec, double n, std::span<const double> grid,
                                        double tol = 1e-12);

/// Q_t^m Phi(f) - Phi(Q_t^m f) <= (t^2/(2(m-2))) Q_t^{m-2}(Phi''(f) |grad f|^2).
/// Throws AdmissibilityError if Phi is not (d-m+2)-admissible on the range of f
/// met by the quadrature, DomainError if f leaves I.
DeficitReport phi_entropy_deficit(const DifferentiableField& f, const PhiEntropySpec& spec, double m, double t,
                                  std::span<const double> x, const QuadratureConfig& cfg);

struct RayleighOptions {
  double growth_margin = 0.01;  // basis growth stays below b - d/2 by this much
  double max_condition = 1e12;
};
struct RayleighResult {
  double constant = 0.0;    // best C in Var(f) <= C nu_b(|grad f|^2 (1+|y|^2)) over the span
  double lambda_min = 0.0;  // 1 / constant
  double condition = 0.0;   // of the covariance Gram matrix
  std::vector<std::string> basis;
  std::vector<double> element_quotients;  // energy/variance of each basis element
};
/// Smallest generalized eigenvalue of (energy Gram, covariance Gram) over the
/// span of y_1^j rho^e, j in {0, 1}, with growth j + e below b - d/2.  Gram
/// entries are Beta-function moments of nu_b.  Throws IllConditioned above
/// max_condition.
RayleighResult optimal_constant_rayleigh(double b, int d, int basis_size, const RayleighOptions& opt = {});

struct GaussianLimitStep {
  double b = 0.0;
  DeficitReport cauchy;  // for y -> f(sqrt(2b) y)
  double lhs_gap = 0.0;  // |cauchy lhs - gaussian lhs|
  double rhs_gap = 0.0;
};
struct GaussianLimitReport {
  DeficitReport gaussian;  // (p/(p-1)) [gamma(f^2) - gamma(f^{2/p})^p] <= 2 gamma(|grad f|^2)
  std::vector<GaussianLimitStep> steps;
  double slope = 0.0;  // of log(lhs_gap + rhs_gap) against log b
};
GaussianLimitReport gaussian_limit_probe(const DifferentiableField& f, std::span<const double> b_list, double p,
                                         int d, const QuadratureConfig& cfg);

}  // namespace beckner
