#include "beckner/inequalities.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "beckner/errors.hpp"
#include "beckner/measures.hpp"

namespace beckner {

namespace {

using Integrand = std::function<void(std::span<const double>, std::span<double>)>;

std::vector<Estimate> nu_integrals(double b, int d, std::size_t n_out, const Integrand& g,
                                   const QuadratureConfig& cfg) {
  const VectorEstimate v = integrate_measure(g, n_out, make_cauchy(b, d).radial(), cfg);
  std::vector<Estimate> out(n_out);
  for (std::size_t k = 0; k < n_out; ++k) out[k] = {v.value[k], v.error_bound, v.n_evals, ErrorKind::quadrature_bound};
  return out;
}

double grad_sq(const DifferentiableField& f, std::span<const double> z) {
  double s = 0.0;
  for (double v : f.gradient(z)) s += v * v;
  return s;
}

/// (p/(p-1)) (sq - mean^p) with first-order error propagation.
Estimate beckner_lhs(double p, const Estimate& sq, const Estimate& mean) {
  const double k = p / (p - 1.0);
  Estimate e;
  e.value = k * (sq.value - std::pow(mean.value, p));
  e.error_bound = k * (sq.error_bound + p * std::pow(std::abs(mean.value), p - 1.0) * mean.error_bound);
  e.n_evals = sq.n_evals;
  return e;
}

Estimate scaled(const Estimate& e, double s) {
  return {s * e.value, std::abs(s) * e.error_bound, e.n_evals, e.kind};
}

double mean_power(double v, double p) { return p == 2.0 ? v : std::pow(std::abs(v), 2.0 / p); }

std::string check_p(double p, double lo, RangeMode mode, const std::string& name) {
  if (!(p > 1.0 && p <= 2.0)) throw ParamError(name + ": needs p in (1, 2]");
  if (p < lo - 1e-12) {
    if (!mode.probe) throw ParamError(name + ": p below the admissible range");
    return "probe:" + name;
  }
  return name;
}

void check_point(std::span<const double> x, int d, double t, const std::string& name) {
  if (static_cast<int>(x.size()) != d) throw ParamError(name + ": x has wrong dimension");
  if (!(t > 0.0)) throw ParamError(name + ": needs t > 0");
}

/// Q_t^{(index)} of the components written by g at z = x + t y.
std::vector<Estimate> qt_integrals(double index, double t, std::span<const double> x, std::size_t n_out,
                                   const std::function<void(std::span<const double>, std::span<double>)>& g,
                                   const QuadratureConfig& cfg) {
  const int d = static_cast<int>(x.size());
  return nu_integrals(
      0.5 * (index + d), d, n_out,
      [&](std::span<const double> y, std::span<double> out) {
        double z[kMaxJetDim];
        for (int i = 0; i < d; ++i) z[i] = x[i] + t * y[i];
        g(std::span<const double>(z, static_cast<std::size_t>(d)), out);
      },
      cfg);
}

DeficitParams base_params(std::string name, std::string field_id, int d) {
  DeficitParams p;
  p.inequality = std::move(name);
  p.field_id = std::move(field_id);
  p.d = d;
  return p;
}

}  // namespace

DeficitReport beckner_qt_deficit(const DifferentiableField& f, double m, double p, double t,
                                 std::span<const double> x, const QuadratureConfig& cfg, RangeMode mode) {
  const int d = f.dim();
  check_point(x, d, t, "beckner_qt");
  if (!(m >= d + 2.0)) throw ParamError("beckner_qt: needs m >= d + 2");
  const std::string name = check_p(p, 1.0 + 2.0 / (m - d), mode, "beckner_qt");
  const auto L = qt_integrals(m, t, x, 2,
                              [&](std::span<const double> z, std::span<double> out) {
                                const double v = f(z);
                                out[0] = v * v;
                                out[1] = mean_power(v, p);
                              },
                              cfg);
  const auto R = qt_integrals(m - 2.0, t, x, 1,
                              [&](std::span<const double> z, std::span<double> out) { out[0] = grad_sq(f, z); }, cfg);
  DeficitParams dp = base_params(name, f.id(), d);
  dp.m = m;
  dp.p = p;
  dp.t = t;
  dp.x.assign(x.begin(), x.end());
  return make_deficit(beckner_lhs(p, L[0], L[1]), scaled(R[0], 2.0 * t * t / (m - 2.0)), std::move(dp));
}

DeficitReport poincare_qt_deficit(const DifferentiableField& f, double m, double t, std::span<const double> x,
                                  const QuadratureConfig& cfg) {
  DeficitReport r = beckner_qt_deficit(f, m, 2.0, t, x, cfg);
  r.lhs = scaled(r.lhs, 0.5);
  r.rhs = scaled(r.rhs, 0.5);
  DeficitParams dp = r.params;
  dp.inequality = "poincare_qt";
  return make_deficit(r.lhs, r.rhs, std::move(dp));
}

DeficitReport beckner_cauchy_deficit(const DifferentiableField& f, double b, double p, int d,
                                     const QuadratureConfig& cfg, RangeMode mode) {
  if (f.dim() != d) throw ParamError("beckner_cauchy: field dimension differs from d");
  if (!(b >= d + 1.0)) throw ParamError("beckner_cauchy: needs b >= d + 1");
  const std::string name = check_p(p, 1.0 + 1.0 / (b - d), mode, "beckner_cauchy");
  const auto I = nu_integrals(b, d, 3,
                              [&](std::span<const double> y, std::span<double> out) {
                                const double v = f(y);
                                double r2 = 0.0;
                                for (double c : y) r2 += c * c;
                                out[0] = v * v;
                                out[1] = mean_power(v, p);
                                out[2] = grad_sq(f, y) * (1.0 + r2);
                              },
                              cfg);
  DeficitParams dp = base_params(name, f.id(), d);
  dp.b = b;
  dp.p = p;
  return make_deficit(beckner_lhs(p, I[0], I[1]), scaled(I[2], 1.0 / (b - 1.0)), std::move(dp));
}

DeficitReport poincare_cauchy_deficit(const DifferentiableField& f, double b, int d, const QuadratureConfig& cfg) {
  DeficitReport r = beckner_cauchy_deficit(f, b, 2.0, d, cfg);
  DeficitParams dp = r.params;
  dp.inequality = "poincare_cauchy";
  return make_deficit(scaled(r.lhs, 0.5), scaled(r.rhs, 0.5), std::move(dp));
}

std::vector<double> p_grid(double lo, int n) {
  if (n < 2) throw ParamError("p_grid: needs n >= 2");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (2.0 - lo) * i / (n - 1);
  g.back() = 2.0;
  return g;
}

PhiEntropySpec phi_power(double q) {
  return {"x^" + std::to_string(q),
          [q](double x) {
            std::array<double, 5> r{};
            double c = 1.0;
            for (int k = 0; k < 5; ++k) {
              r[k] = c * std::pow(x, q - k);
              c *= q - k;
            }
            return r;
          },
          0.0, 1e300};
}

PhiEntropySpec phi_square() {
  return {"x^2", [](double x) { return std::array<double, 5>{x * x, 2.0 * x, 2.0, 0.0, 0.0}; }, -1e300, 1e300};
}

PhiEntropySpec phi_exp() {
  return {"exp", [](double x) {
            const double e = std::exp(x);
            return std::array<double, 5>{e, e, e, e, e};
          },
          -1e300, 1e300};
}

AdmissibilityReport admissibility_check(const PhiEntropySpec& spec, double n, std::span<const double> grid,
                                        double tol) {
  if (n > 0.0) throw ParamError("admissibility_check: needs n <= 0");
  AdmissibilityReport r;
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (double u : grid) {
    if (!(u > spec.lo && u < spec.hi)) continue;
    const auto D = spec.derivs(u);
    double margin, scale;
    if (n == 0.0) {
      margin = -std::abs(D[3]);
      scale = std::abs(D[2]);
    } else {
      const double lhs = 2.0 * (n - 1.0) / n * D[3] * D[3], rhs = D[2] * D[4];
      margin = rhs - lhs;
      scale = std::abs(lhs) + std::abs(rhs);
    }
    r.margins.push_back(margin);
    r.worst_margin = std::min(r.worst_margin, margin);
    if (!(D[2] > 0.0) || margin < -tol * scale) r.admissible = false;
  }
  if (r.margins.empty()) r.worst_margin = 0.0;
  return r;
}

DeficitReport phi_entropy_deficit(const DifferentiableField& f, const PhiEntropySpec& spec, double m, double t,
                                  std::span<const double> x, const QuadratureConfig& cfg) {
  const int d = f.dim();
  check_point(x, d, t, "phi_entropy");
  if (!(m >= d + 2.0)) throw ParamError("phi_entropy: needs m >= d + 2");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  auto value_in_I = [&](std::span<const double> z) {
    const double v = f(z);
    if (!(v > spec.lo && v < spec.hi)) throw DomainError("phi_entropy: f leaves the interval of " + spec.id);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    return v;
  };
  const auto L = qt_integrals(m, t, x, 2,
                              [&](std::span<const double> z, std::span<double> out) {
                                const double v = value_in_I(z);
                                out[0] = spec.derivs(v)[0];
                                out[1] = v;
                              },
                              cfg);
  const auto R = qt_integrals(m - 2.0, t, x, 1,
                              [&](std::span<const double> z, std::span<double> out) {
                                out[0] = spec.derivs(value_in_I(z))[2] * grad_sq(f, z);
                              },
                              cfg);
  std::vector<double> grid(65);
  for (int i = 0; i <= 64; ++i) grid[i] = lo + (hi - lo) * i / 64.0;
  const double n = d - m + 2.0;
  const AdmissibilityReport adm = admissibility_check(spec, n, grid);
  if (!adm.admissible)
    throw AdmissibilityError("phi_entropy: " + spec.id + " is not " + std::to_string(n) +
                             "-admissible on the range of f");
  const auto Dm = spec.derivs(L[1].value);
  Estimate lhs;
  lhs.value = L[0].value - Dm[0];
  lhs.error_bound = L[0].error_bound + std::abs(Dm[1]) * L[1].error_bound;
  lhs.n_evals = L[0].n_evals;
  DeficitParams dp = base_params("phi_entropy:" + spec.id, f.id(), d);
  dp.m = m;
  dp.t = t;
  dp.x.assign(x.begin(), x.end());
  return make_deficit(lhs, scaled(R[0], t * t / (2.0 * (m - 2.0))), std::move(dp));
}

namespace {

/// log of \int_{R^d} y_1^{2n} (1 + |y|^2)^{-alpha} dy
double log_moment(double alpha, int n, int d) {
  const double a = n + 0.5 * d, c = alpha - a;
  if (!(c > 0.0)) throw DomainError("rayleigh: basis moment diverges");
  const double log_angular = std::log(2.0) + std::lgamma(n + 0.5) + 0.5 * (d - 1) * std::log(std::numbers::pi) -
                             std::lgamma(a);
  return log_angular - std::log(2.0) + std::lgamma(a) + std::lgamma(c) - std::lgamma(a + c);
}

struct BasisElement {
  int j;     // power of y_1
  double e;  // power of rho
};

}  // namespace

RayleighResult optimal_constant_rayleigh(double b, int d, int basis_size, const RayleighOptions& opt) {
  if (d < 1) throw ParamError("rayleigh: needs d >= 1");
  if (basis_size < 2) throw ParamError("rayleigh: needs basis_size >= 2");
  const double g_max = b - 0.5 * d - opt.growth_margin;
  if (!(g_max > 0.0)) throw DomainError("rayleigh: needs b - d/2 above the growth margin");

  std::vector<BasisElement> basis;
  const int k_even = (basis_size + 1) / 2, k_odd = basis_size - k_even;
  for (int k = 1; k <= k_even; ++k) basis.push_back({0, g_max * k / k_even});
  const double g_odd = std::min(1.0, g_max);
  for (int k = 1; k <= k_odd; ++k) basis.push_back({1, g_odd * k / k_odd - 1.0});

  const int n = static_cast<int>(basis.size());
  const double log_c = log_moment(b, 0, d);
  auto mom = [&](double alpha, int J) {
    // nu_b(y_1^J rho^{2(b - alpha)}), zero for odd J
    if (J % 2 != 0 || J < 0) return 0.0;
    return std::exp(log_moment(alpha, J / 2, d) - log_c);
  };
  Eigen::MatrixXd A(n, n), B(n, n);
  std::vector<double> mean(n);
  for (int i = 0; i < n; ++i) mean[i] = mom(b - 0.5 * basis[i].e, basis[i].j);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const auto& P = basis[i];
      const auto& Q = basis[k];
      const int J = P.j + Q.j;
      const double E = P.e + Q.e;
      B(i, k) = mom(b - 0.5 * E, J) - mean[i] * mean[k];
      // grad(y_1^j rho^e) = j y_1^{j-1} rho^e e_1 + e y_1^j rho^{e-2} y, weight 1 + |y|^2 = rho^2
      double a = (P.j * Q.e + Q.j * P.e + P.e * Q.e) * mom(b - 0.5 * E, J) - P.e * Q.e * mom(b - 0.5 * E + 1.0, J);
      if (P.j * Q.j != 0) a += P.j * Q.j * mom(b - 0.5 * E - 1.0, J - 2);
      A(i, k) = a;
    }
  // unit-variance scaling before the eigenproblem
  Eigen::VectorXd s = B.diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd As = s.asDiagonal() * A * s.asDiagonal();
  const Eigen::MatrixXd Bs = s.asDiagonal() * B * s.asDiagonal();

  RayleighResult r;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(Bs, Eigen::EigenvaluesOnly);
  const double bmin = eb.eigenvalues().minCoeff(), bmax = eb.eigenvalues().maxCoeff();
  r.condition = bmin > 0.0 ? bmax / bmin : std::numeric_limits<double>::infinity();
  if (r.condition > opt.max_condition)
    throw IllConditioned("rayleigh: covariance Gram condition number " + std::to_string(r.condition) +
                         " exceeds the threshold; reduce the basis");
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ge(As, Bs, Eigen::EigenvaluesOnly);
  if (ge.info() != Eigen::Success) throw IllConditioned("rayleigh: generalized eigensolver failed");
  r.lambda_min = ge.eigenvalues().minCoeff();
  r.constant = 1.0 / r.lambda_min;
  for (int i = 0; i < n; ++i) {
    r.basis.push_back((basis[i].j ? std::string("y1*") : std::string()) + "rho^" + std::to_string(basis[i].e));
    r.element_quotients.push_back(A(i, i) / B(i, i));
  }
  return r;
}

GaussianLimitReport gaussian_limit_probe(const DifferentiableField& f, std::span<const double> b_list, double p,
                                         int d, const QuadratureConfig& cfg) {
  if (f.dim() != d) throw ParamError("gaussian_limit: field dimension differs from d");
  if (!(p > 1.0 && p <= 2.0)) throw ParamError("gaussian_limit: needs p in (1, 2]");
  for (std::size_t i = 0; i < b_list.size(); ++i) {
    if (!(b_list[i] >= d + 1.0)) throw ParamError("gaussian_limit: every b must be >= d + 1");
    if (i > 0 && !(b_list[i] > b_list[i - 1])) throw ParamError("gaussian_limit: b_list must increase");
  }
  GaussianLimitReport rep;
  const VectorEstimate g = integrate_measure(
      [&](std::span<const double> y, std::span<double> out) {
        const double v = f(y);
        out[0] = v * v;
        out[1] = mean_power(v, p);
        out[2] = grad_sq(f, y);
      },
      3, gaussian_density(d, 1.0), cfg);
  const Estimate sq{g.value[0], g.error_bound, g.n_evals}, mean{g.value[1], g.error_bound, g.n_evals},
      energy{g.value[2], g.error_bound, g.n_evals};
  DeficitParams gp = base_params("gaussian_beckner", f.id(), d);
  gp.p = p;
  rep.gaussian = make_deficit(beckner_lhs(p, sq, mean), scaled(energy, 2.0), gp);

  std::vector<double> bs, gaps;
  for (double b : b_list) {
    GaussianLimitStep s;
    s.b = b;
    const DifferentiableField fb = affine_precompose(f, std::sqrt(2.0 * b), std::vector<double>(d, 0.0));
    s.cauchy = beckner_cauchy_deficit(fb, b, p, d, cfg, RangeMode{true});
    s.lhs_gap = std::abs(s.cauchy.lhs.value - rep.gaussian.lhs.value);
    s.rhs_gap = std::abs(s.cauchy.rhs.value - rep.gaussian.rhs.value);
    bs.push_back(b);
    gaps.push_back(s.lhs_gap + s.rhs_gap);
    rep.steps.push_back(std::move(s));
  }
  if (bs.size() >= 2 && std::all_of(gaps.begin(), gaps.end(), [](double v) { return v > 0.0; }))
    rep.slope = loglog_slope(bs, gaps);
  return rep;
}

}  // namespace beckner
