#include "beckner/measures.hpp"

#include <cmath>
#include <numbers>

#include "beckner/errors.hpp"

namespace beckner {

double log_norm_const(double m, int d) {
  if (!(m > 0.0)) throw DomainError("norm_const: m must be > 0");
  if (d < 1) throw DomainError("norm_const: d must be >= 1");
  return 0.5 * d * std::log(std::numbers::pi) + std::lgamma(0.5 * m) - std::lgamma(0.5 * (m + d));
}

double norm_const(double m, int d) { return std::exp(log_norm_const(m, d)); }

double norm_const_ratio(double a, double b, int d) {
  const double half_gap = 0.5 * (b - a);
  if (half_gap >= 0.0 && half_gap == std::floor(half_gap) && half_gap <= 1000.0) {
    if (!(a > 0.0)) throw DomainError("norm_const_ratio: index must be > 0");
    // c(a)/c(a+2) = (a + d)/a, applied k times
    double r = 1.0;
    for (int j = 0; j < static_cast<int>(half_gap); ++j) {
      const double m = a + 2.0 * j;
      r *= (m + d) / m;
    }
    return r;
  }
  return std::exp(log_norm_const(a, d) - log_norm_const(b, d));
}

double second_moment(double b, int d) {
  const double denom = 2.0 * b - 2.0 - d;
  if (!(denom > 0.0)) throw DomainError("second_moment: needs 2b - 2 - d > 0");
  return d / denom;
}

namespace {

double squared_norm(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return s;
}

void student_direction(RandomStream& rs, double m, std::span<double> w) {
  const double g = rs.gamma(0.5 * m);
  const double inv = 1.0 / std::sqrt(2.0 * g);
  for (double& v : w) v = rs.normal() * inv;
}

}  // namespace

CauchyMeasure make_cauchy(double b, int d) {
  if (d < 1) throw DomainError("CauchyMeasure: d must be >= 1");
  if (!(b > 0.5 * d)) throw DomainError("CauchyMeasure: needs b > d/2");
  return {d, b, log_norm_const(2.0 * b - d, d)};
}

CauchyMeasure sphere_measure(int d) { return make_cauchy(static_cast<double>(d), d); }

double CauchyMeasure::log_density(std::span<const double> y) const {
  return -b * std::log1p(squared_norm(y)) - log_norm;
}

double CauchyMeasure::density(std::span<const double> y) const { return std::exp(log_density(y)); }

RadialDensity CauchyMeasure::radial() const {
  const double bb = b, ln = log_norm;
  return {d, [bb, ln](double r) { return -bb * std::log1p(r * r) - ln; }, "cauchy"};
}

void CauchyMeasure::sample(RandomStream& rs, std::span<double> y) const { student_direction(rs, 2.0 * b - d, y); }

RadialDensity gaussian_density(int d, double variance) {
  const double lc = -0.5 * d * std::log(2.0 * std::numbers::pi * variance);
  return {d, [lc, variance](double r) { return lc - 0.5 * r * r / variance; }, "gaussian"};
}

TKernel make_tkernel(double m, double t, std::vector<double> x) {
  if (!(m > 0.0)) throw DomainError("TKernel: m must be > 0");
  if (!(t > 0.0)) throw DomainError("TKernel: t must be > 0");
  if (x.empty()) throw DomainError("TKernel: empty base point");
  const int d = static_cast<int>(x.size());
  return {d, m, t, std::move(x)};
}

double TKernel::density(std::span<const double> y) const {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += (y[i] - x[i]) * (y[i] - x[i]);
  return std::exp(-0.5 * (m + d) * std::log1p(s / (t * t)) - log_norm_const(m, d) - d * std::log(t));
}

void TKernel::sample(RandomStream& rs, std::span<double> y) const {
  student_direction(rs, m, y);
  for (int i = 0; i < d; ++i) y[i] = x[i] + t * y[i];
}

HittingTimeLaw make_hitting(double m, double t) {
  if (!(m > 0.0)) throw DomainError("HittingTimeLaw: m must be > 0");
  if (!(t > 0.0)) throw DomainError("HittingTimeLaw: t must be > 0");
  return {m, t};
}

double HittingTimeLaw::density(double s) const {
  if (!(s > 0.0)) return 0.0;
  const double ls = m * std::log(t) - t * t / (4.0 * s) - m * std::log(2.0) - std::lgamma(0.5 * m) -
                    (0.5 * m + 1.0) * std::log(s);
  return std::exp(ls);
}

double HittingTimeLaw::cdf(double s) const {
  if (!(s > 0.0)) return 0.0;
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-13;
  cfg.rel_tol = 1e-12;
  return std::min(1.0, integrate_interval([this](double u) { return density(u); }, 0.0, s, cfg).value);
}

double HittingTimeLaw::sample(RandomStream& rs) const { return t * t / (4.0 * rs.gamma(0.5 * m)); }

void sample_coupled(const HittingTimeLaw& h, std::span<const double> x, RandomStream& rs, CoupledDraw& out) {
  out.s = h.sample(rs);
  out.x_s.resize(x.size());
  const double sd = std::sqrt(2.0 * out.s);
  for (std::size_t i = 0; i < x.size(); ++i) out.x_s[i] = x[i] + sd * rs.normal();
}

Estimate integrate(const DifferentiableField& f, const CauchyMeasure& nu, const QuadratureConfig& cfg) {
  if (f.dim() != nu.d) throw ParamError("integrate: field and measure dimensions differ");
  return integrate_measure([&f](std::span<const double> y) { return f(y); }, nu.radial(), cfg);
}

Estimate integrate_mc(const DifferentiableField& f, const CauchyMeasure& nu, const MonteCarloConfig& cfg) {
  if (f.dim() != nu.d) throw ParamError("integrate_mc: field and measure dimensions differ");
  return mc_mean(cfg, [&](RandomStream& rs) {
    double y[kMaxJetDim];
    std::span<double> ys(y, static_cast<std::size_t>(nu.d));
    nu.sample(rs, ys);
    return f(ys);
  });
}

}  // namespace beckner
