#pragma once

// Generalized Cauchy measures, the multivariate-t kernel q_t(x, .), the
// hitting-time law sigma_m(s, t) ds, their constants and exact samplers.

#include <span>
#include <vector>

#include "beckner/fields.hpp"
#include "beckner/numerics.hpp"

namespace beckner {

/// c(m, d) = pi^{d/2} Gamma(m/2) / Gamma((m+d)/2).
double norm_const(double m, int d);
double log_norm_const(double m, int d);
/// c(a, d) / c(b, d).  Exact product of the ratio identity when (b - a)/2 is
/// a non-negative integer, log-Gamma otherwise.
double norm_const_ratio(double a, double b, int d);

/// nu_b(|y|^2) = d / (2b - 2 - d).
double second_moment(double b, int d);

/// dnu_b = (1 + |y|^2)^{-b} dy / c(2b - d, d).
struct CauchyMeasure {
  int d = 1;
  double b = 1.0;
  double log_norm = 0.0;

  double log_density(std::span<const double> y) const;
  double density(std::span<const double> y) const;
  RadialDensity radial() const;
  /// Draw into y (size d); nu_b is q_1(0, .) with m = 2b - d.
  void sample(RandomStream& rs, std::span<double> y) const;
};

CauchyMeasure make_cauchy(double b, int d);
/// Uniform probability on S^d in the stereographic chart: nu_b with b = d.
CauchyMeasure sphere_measure(int d);
/// Standard Gaussian N(0, I_d) as a radial density.
RadialDensity gaussian_density(int d, double variance = 1.0);

/// q_t(x, y) = (1 + |y - x|^2 / t^2)^{-(m+d)/2} / (c(m, d) t^d).
struct TKernel {
  int d = 1;
  double m = 1.0;
  double t = 1.0;
  std::vector<double> x;

  double density(std::span<const double> y) const;
  /// x + t Z / sqrt(2G), Z ~ N(0, I_d), G ~ Gamma(m/2, 1).
  void sample(RandomStream& rs, std::span<double> y) const;
};

TKernel make_tkernel(double m, double t, std::vector<double> x);

/// sigma_m(s, t) = t^m exp(-t^2 / 4s) / (2^m Gamma(m/2) s^{m/2+1}).
struct HittingTimeLaw {
  double m = 1.0;
  double t = 1.0;

  double density(double s) const;
  /// P(S <= s) by adaptive quadrature of the density.
  double cdf(double s) const;
  /// S = t^2 / (4G), G ~ Gamma(m/2, 1).
  double sample(RandomStream& rs) const;
};

HittingTimeLaw make_hitting(double m, double t);

/// Joint draw of (S, X_S): S from the hitting law, X_S = x + sqrt(2S) Z.
struct CoupledDraw {
  double s = 0.0;
  std::vector<double> x_s;
};
void sample_coupled(const HittingTimeLaw& h, std::span<const double> x, RandomStream& rs, CoupledDraw& out);

/// \int f dnu by radial-angular quadrature (d <= 3).
Estimate integrate(const DifferentiableField& f, const CauchyMeasure& nu, const QuadratureConfig& cfg);
/// Monte Carlo average of f over exact draws of nu.
Estimate integrate_mc(const DifferentiableField& f, const CauchyMeasure& nu, const MonteCarloConfig& cfg);

}  // namespace beckner
