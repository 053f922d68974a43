#pragma once

// The sphere S^d in stereographic coordinates: mu_S(dx) = rho^{-2d} dx / c(d, d)
// with rho = sqrt(1 + |x|^2), Gamma_S(f) = (rho^4/4) |grad f|^2, and the
// Beckner-type inequalities obtained from Q_1^{(m)} at the origin.

#include <span>
#include <string>
#include <vector>

#include "beckner/deficit.hpp"
#include "beckner/fields.hpp"
#include "beckner/measures.hpp"
#include "beckner/numerics.hpp"

namespace beckner {

struct SphereGeometry {
  int d = 2;
  double norm_const = 0.0;  // c(d, d)
  CauchyMeasure measure;    // nu_d = mu_S
};
/// d >= 2.
SphereGeometry make_sphere(int d);

/// u = (1 - |x|^2)/(1 + |x|^2), the last coordinate of the sphere.
DifferentiableField sphere_eigenfunction(int d);
/// log rho = log(1 + |x|^2) / 2.
DifferentiableField log_rho_field(int d);

struct EigenfunctionCheck {
  double u = 0.0;
  double laplacian = 0.0;           // Delta_S u
  double gamma = 0.0;               // Gamma_S(u)
  double laplacian_residual = 0.0;  // |Delta_S u + d u|
  double gamma_residual = 0.0;      // |Gamma_S(u) - (1 - u^2)|
};
EigenfunctionCheck eigenfunction_u(int d, std::span<const double> x);

struct LogRhoCheck {
  double laplacian = 0.0;  // Delta_S log rho
  double gamma = 0.0;      // Gamma_S(log rho)
  double laplacian_residual = 0.0;
  double gamma_residual = 0.0;
};
/// Against (1 + (d-1) u)/(2(1+u)) and (1 - u)/(4(1+u)).
LogRhoCheck log_rho_identities(int d, std::span<const double> x);

/// K = (m-d)^2 (2 Delta_S log rho/(d-m-2) + Gamma_S log rho) at x.
double k_function(double m, int d, std::span<const double> x);
/// R = (c(d,d)/c(m,d)) rho^2 - (2(b+1)(b+2)/(m-2)) (c(d,d)/c(m-2,d)) K
/// with b = (d+2-m)/(m-d), evaluated pointwise from the operator.
double constant_R(double m, int d, std::span<const double> x);
/// (c(d,d)/c(m,d)) (3d+m-2)/(d+m-2)
double constant_R_closed_form(double m, int d);

struct SphereBecknerParams {
  int d = 2;
  double m = 4.0;

  void validate() const;  // d >= 2, m >= d + 2
  double p() const;       // 1 + 2/(m-d)
  double A() const;       // (c(d,d)/c(m,d))^{2/(m-d)} (m+d-2)/(m+3d-2)
  double gradient_constant() const;  // 16/((m+2-d)(3d-2+m))
};

/// int f^2 <= A (int f^{2/p})^p + C int Gamma_S(f), all against mu_S.  f > 0.
/// Quadrature is available for d <= 3.
DeficitReport sphere_beckner_deficit(const DifferentiableField& f, const SphereBecknerParams& params,
                                     const QuadratureConfig& cfg);

/// int f^2 <= (int |f|^{2/p})^p + (2(p-1)/(p d)) int Gamma_S(f).  At p = 2 the
/// mean is signed, which is the sphere Poincare inequality for any f.
DeficitReport classical_beckner_deficit(const DifferentiableField& f, double p, int d, const QuadratureConfig& cfg);

/// Terms of (int |f|^{2d/(d-2)})^{(d-2)/d} <= int f^2 + C int Gamma_S(f).
struct SobolevTerms {
  std::string field_id;
  Estimate sobolev;   // (int |f|^q)^{2/q}
  Estimate l2;        // int f^2
  Estimate energy;    // int Gamma_S(f)
  double ratio = 0.0;  // (sobolev - l2)/energy, 0 when energy vanishes
};
SobolevTerms sobolev_terms(const DifferentiableField& f, int d, const QuadratureConfig& cfg);

struct SobolevFit {
  double C = 0.0;  // smallest constant valid on the family
  std::vector<SobolevTerms> members;
};
/// d >= 3; DomainError otherwise.
SobolevFit nash_sobolev_probe(const std::vector<DifferentiableField>& family, int d, const QuadratureConfig& cfg);

}  // namespace beckner
