#include "beckner/qtm.hpp"

#include <cmath>
#include <limits>

#include "beckner/errors.hpp"

namespace beckner {

void QtmParams::validate() const {
  if (!(m > 0.0)) throw ParamError("QtmParams: m must be > 0");
  if (d < 1 || d > kMaxJetDim) throw ParamError("QtmParams: d must be in [1, 4]");
  if (!(t >= 0.0)) throw ParamError("QtmParams: t must be >= 0");
  if (!x.empty() && static_cast<int>(x.size()) != d) throw ParamError("QtmParams: x has wrong dimension");
}

std::vector<double> QtmParams::point() const { return x.empty() ? std::vector<double>(d, 0.0) : x; }

namespace {

void check_dims(const DifferentiableField& f, const QtmParams& p) {
  p.validate();
  if (f.dim() != p.d) throw ParamError("field " + f.id() + " has dimension " + std::to_string(f.dim()) +
                                       ", expected " + std::to_string(p.d));
}

// \int_0^\infty (t^2/4u)^p [P_{t^2/4u} g](x) gamma_{m/2}(u) du, i.e.
// E[S^p g(x + sqrt(2S) Z)] with S = t^2 / 4G.
Estimate subordinate(const DifferentiableField& g, std::span<const double> x, double t, double m, double p_exp,
                     const QuadratureConfig& cfg) {
  const int d = static_cast<int>(x.size());
  const double a = 0.5 * m;
  const double lg = std::lgamma(a);
  const RadialDensity gauss = gaussian_density(d);
  std::vector<double> z(d);
  long inner_evals = 0;

  const VectorIntegrand outer = [&](double u, std::span<double> out) {
    out[0] = out[1] = 0.0;
    if (!(u > 0.0)) return;
    const double s = t * t / (4.0 * u);
    const double lw = (a - 1.0) * std::log(u) - u - lg + (p_exp != 0.0 ? p_exp * std::log(s) : 0.0);
    const double w = std::exp(lw);
    if (w == 0.0) return;
    const double sd = std::sqrt(2.0 * s);
    QuadratureConfig inner = cfg;
    // Loose where the weight is negligible; the inner error is carried along.
    inner.abs_tol = std::clamp(0.1 * cfg.abs_tol / w, cfg.abs_tol, 1e-2);
    inner.max_evals = std::max<long>(100, cfg.max_evals / 50);
    bool ok = true;
    const auto value = [&](std::span<const double> zz, std::span<double> o) {
      for (int i = 0; i < d; ++i) z[i] = x[i] + sd * zz[i];
      o[0] = g(z);
    };
    VectorEstimate e = integrate_measure(value, 1, gauss, inner, &ok);
    inner_evals += e.n_evals;
    out[0] = w * e.value[0];
    out[1] = w * e.error_bound;
  };
  bool ok = true;
  VectorEstimate res = integrate_radial(outer, 2, cfg, 1, &ok);
  if (!ok) throw NonConvergence("subordinated quadrature did not reach tolerance");
  return {res.value[0], res.error_bound + res.value[1], res.n_evals + inner_evals, ErrorKind::quadrature_bound};
}

}  // namespace

Estimate qtm_quadrature(const DifferentiableField& f, const QtmParams& p, const QuadratureConfig& cfg) {
  check_dims(f, p);
  const std::vector<double> x = p.point();
  if (p.t == 0.0) return {f(x), 0.0, 1, ErrorKind::exact};
  const CauchyMeasure nu = make_cauchy(0.5 * (p.m + p.d), p.d);
  std::vector<double> z(p.d);
  return integrate_measure(
      [&](std::span<const double> y) {
        for (int i = 0; i < p.d; ++i) z[i] = p.t * y[i] + x[i];
        return f(z);
      },
      nu.radial(), cfg);
}

Estimate qtm_subordinated(const DifferentiableField& f, const QtmParams& p, const QuadratureConfig& cfg) {
  check_dims(f, p);
  const std::vector<double> x = p.point();
  if (p.t == 0.0) return {f(x), 0.0, 1, ErrorKind::exact};
  return subordinate(f, x, p.t, p.m, 0.0, cfg);
}

Estimate qtm_mc(const DifferentiableField& f, const QtmParams& p, const MonteCarloConfig& cfg) {
  check_dims(f, p);
  const std::vector<double> x = p.point();
  if (p.t == 0.0) return {f(x), 0.0, 1, ErrorKind::exact};
  const TKernel k = make_tkernel(p.m, p.t, x);
  return mc_mean(cfg, [&](RandomStream& rs) {
    double y[kMaxJetDim];
    std::span<double> ys(y, static_cast<std::size_t>(p.d));
    k.sample(rs, ys);
    return f(ys);
  });
}

namespace {

// Contribution table for the coefficient of dx^alpha dt^j:
//   sum_{|gamma| = j} binom(alpha + gamma, gamma) z^gamma c_{alpha + gamma}.
struct JetTerm {
  int out, in, zpow;
  double coef;
};

std::vector<JetTerm> jet_terms(int d, int order) {
  const JetLayout& in = jet_layout(d, order);
  const JetLayout& out = jet_layout(d + 1, order);
  std::vector<JetTerm> terms;
  for (int k = 0; k < out.size(); ++k) {
    const MultiIndex& e = out.exponents[k];
    const int j = e[d];
    int alpha_deg = 0;
    for (int i = 0; i < d; ++i) alpha_deg += e[i];
    for (int g = 0; g < in.size(); ++g) {
      if (in.degree[g] != j) continue;
      MultiIndex sum{};
      double coef = 1.0;
      for (int i = 0; i < d; ++i) {
        const int gi = in.exponents[g][i], ai = e[i];
        sum[i] = static_cast<std::uint8_t>(ai + gi);
        for (int r = 1; r <= gi; ++r) coef *= static_cast<double>(ai + r) / r;
      }
      if (alpha_deg + j > order) continue;
      terms.push_back({k, in.index(sum), g, coef});
    }
  }
  return terms;
}

}  // namespace

QtmJet qtm_jet(const DifferentiableField& f, const QtmParams& p, int order, const QuadratureConfig& cfg) {
  check_dims(f, p);
  if (p.d + 1 > kMaxJetDim) throw ParamError("qtm_jet: needs d + 1 <= 4");
  if (!(p.t > 0.0)) throw DomainError("qtm_jet: needs t > 0");
  if (order < 0 || order > kMaxJetOrder) throw ParamError("qtm_jet: order must be in [0, 4]");
  const int d = p.d;
  const std::vector<double> x = p.point();
  const JetLayout& in = jet_layout(d, order);
  const JetLayout& outl = jet_layout(d + 1, order);
  const std::vector<JetTerm> terms = jet_terms(d, order);
  const CauchyMeasure nu = make_cauchy(0.5 * (p.m + d), d);
  std::vector<double> z(d), zp(in.size());

  const auto integrand = [&](std::span<const double> y, std::span<double> out) {
    for (int i = 0; i < d; ++i) z[i] = x[i] + p.t * y[i];
    const Jet fj = f.jet(z, order);
    for (int g = 0; g < in.size(); ++g) {
      double v = 1.0;
      for (int i = 0; i < d; ++i)
        for (int r = 0; r < in.exponents[g][i]; ++r) v *= y[i];
      zp[g] = v;
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& tm : terms) out[tm.out] += tm.coef * zp[tm.zpow] * fj.coeff(tm.in);
  };
  VectorEstimate e = integrate_measure(integrand, outl.size(), nu.radial(), cfg);
  QtmJet result{Jet(d + 1, order), e.error_bound};
  for (int k = 0; k < outl.size(); ++k) result.jet.coeff(k) = e.value[k];
  // Coefficients are Taylor coefficients in (x, t) at the base point.
  return result;
}

HarmonicityResidual harmonicity_residual(const DifferentiableField& f, const QtmParams& p, double step,
                                         const QuadratureConfig& cfg) {
  check_dims(f, p);
  if (!(p.t > 0.0)) throw DomainError("harmonicity_residual: needs t > 0");
  const int d = p.d;
  std::vector<double> xt = p.point();
  xt.push_back(p.t);
  const PointFunction q = [&](std::span<const double> pt) {
    QtmParams pp{p.m, d, pt[d], std::vector<double>(pt.begin(), pt.begin() + d)};
    return qtm_quadrature(f, pp, cfg).value;
  };
  const DomainPredicate half = [d](std::span<const double> pt) { return pt[d] > 0.0; };
  std::vector<int> a(d + 1, 0);
  double lap = 0.0;
  for (int i = 0; i < d; ++i) {
    a.assign(d + 1, 0);
    a[i] = 2;
    lap += fd_derivative(q, xt, a, step, half);
  }
  a.assign(d + 1, 0);
  a[d] = 2;
  const double qtt = fd_derivative(q, xt, a, step, half);
  a[d] = 1;
  const double drift = (1.0 - p.m) / p.t * fd_derivative(q, xt, a, step, half);
  return {std::abs(lap + qtt + drift), std::abs(lap) + std::abs(qtt) + std::abs(drift)};
}

HarmonicityResidual harmonicity_residual_analytic(const DifferentiableField& F, double m,
                                                  std::span<const double> xt) {
  const int n = F.dim();
  if (static_cast<int>(xt.size()) != n) throw ParamError("harmonicity_residual_analytic: point dimension");
  if (!(xt[n - 1] > 0.0)) throw DomainError("harmonicity_residual_analytic: needs t > 0");
  const Jet j = F.jet(xt, 2);
  double lap = 0.0;
  for (int i = 0; i < n - 1; ++i) lap += j.hess(i, i);
  const double qtt = j.hess(n - 1, n - 1);
  const double drift = (1.0 - m) / xt[n - 1] * j.grad(n - 1);
  return {std::abs(lap + qtt + drift), std::abs(lap) + std::abs(qtt) + std::abs(drift)};
}

MomentIdentity moment_identity_gap(const DifferentiableField& g, double p_exp, const QtmParams& params,
                                   const QuadratureConfig& cfg, const MonteCarloConfig& mc) {
  check_dims(g, params);
  if (!(p_exp > 0.0)) throw DomainError("moment_identity_gap: needs p > 0");
  if (!(p_exp < 0.5 * params.m)) throw DomainError("moment_identity_gap: needs p < m/2 (Gamma pole)");
  if (!(params.t > 0.0)) throw DomainError("moment_identity_gap: needs t > 0");
  const std::vector<double> x = params.point();
  const double m = params.m, t = params.t;

  MomentIdentity r;
  r.lhs_quadrature = subordinate(g, x, t, m, p_exp, cfg);

  const HittingTimeLaw h = make_hitting(m, t);
  r.lhs_mc = mc_mean(mc, [&](RandomStream& rs) {
    CoupledDraw c;
    sample_coupled(h, x, rs, c);
    return std::pow(c.s, p_exp) * g(c.x_s);
  });

  const double factor =
      std::pow(t, 2.0 * p_exp) * std::exp(std::lgamma(0.5 * m - p_exp) - std::lgamma(0.5 * m)) / std::pow(4.0, p_exp);
  QtmParams lower = params;
  lower.m = m - 2.0 * p_exp;
  Estimate q = qtm_quadrature(g, lower, cfg);
  r.rhs = {factor * q.value, factor * q.error_bound, q.n_evals, q.kind};
  const double denom = std::max(std::abs(r.rhs.value), std::numeric_limits<double>::min());
  r.gap_quadrature = std::abs(r.lhs_quadrature.value - r.rhs.value) / denom;
  r.gap_mc = std::abs(r.lhs_mc.value - r.rhs.value);
  return r;
}

TaylorFit taylor_remainder_order(const DifferentiableField& f, double m, std::span<const double> x,
                                 std::span<const double> t_grid, const QuadratureConfig& cfg) {
  if (!(m > 4.0)) throw ParamError("taylor_remainder_order: needs m > 4");
  if (t_grid.size() < 3) throw ParamError("taylor_remainder_order: needs at least 3 t values");
  const int d = f.dim();
  if (static_cast<int>(x.size()) != d) throw ParamError("taylor_remainder_order: x has wrong dimension");
  const Jet j = f.jet(x, 4);
  const double f0 = j.value();
  double lap = 0.0, bilap = 0.0;
  for (int i = 0; i < d; ++i) {
    lap += j.hess(i, i);
    for (int k = 0; k < d; ++k) bilap += j.fourth(i, i, k, k);
  }
  const CauchyMeasure nu = make_cauchy(0.5 * (m + d), d);
  TaylorFit fit;
  std::vector<double> z(d);
  for (double t : t_grid) {
    if (!(t > 0.0)) throw ParamError("taylor_remainder_order: t values must be > 0");
    // Integrate f(x + t y) - f(x) so the quadrature works at the scale of the increment.
    Estimate inc = integrate_measure(
        [&](std::span<const double> y) {
          for (int i = 0; i < d; ++i) z[i] = x[i] + t * y[i];
          return f(z) - f0;
        },
        nu.radial(), cfg);
    const double t2 = t * t;
    const double r = inc.value - t2 * lap / (2.0 * (m - 2.0)) - t2 * t2 * bilap / (8.0 * (m - 2.0) * (m - 4.0));
    fit.t.push_back(t);
    fit.remainder.push_back(r);
    fit.error_bound.push_back(inc.error_bound);
  }
  std::vector<double> ts, rs;
  for (std::size_t i = 0; i < fit.t.size(); ++i) {
    if (std::abs(fit.remainder[i]) > 10.0 * fit.error_bound[i]) {
      ts.push_back(fit.t[i]);
      rs.push_back(fit.remainder[i]);
    }
  }
  if (ts.size() < 3)
    throw DegenerateFit("remainder below quadrature noise at all but " + std::to_string(ts.size()) +
                        " points; consistent with o(t^4)");
  fit.slope = loglog_slope(ts, rs);
  return fit;
}

}  // namespace beckner
