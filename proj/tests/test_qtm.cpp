#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "beckner/errors.hpp"
#include "beckner/qtm.hpp"
#include "oracles.hpp"

using namespace beckner;

namespace {

// |x|^2 + t^2 d/(m-2) on R^d x (0, inf), t last
DifferentiableField harmonic_quadratic(int d, double m) {
  DifferentiableField F = scale(power(coordinate(d + 1, d), 2.0), d / (m - 2.0));
  for (int i = 0; i < d; ++i) F = sum(F, power(coordinate(d + 1, i), 2.0));
  return F;
}

QuadratureConfig tight() {
  QuadratureConfig c;
  c.abs_tol = 1e-12;
  c.rel_tol = 1e-12;
  return c;
}

}  // namespace

TEST_CASE("quadrature path basics") {
  QuadratureConfig cfg;
  CHECK(qtm_quadrature(constant_field(2, 1.0), {6.0, 2, 1.0, {0.3, 0.1}}, cfg).value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(qtm_quadrature(quadratic(2), {6.0, 2, 1.0, {}}, cfg).value == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(qtm_quadrature(quadratic(2), {6.0, 2, 1.0, {1.0, 0.0}}, cfg).value == doctest::Approx(1.5).epsilon(1e-9));
  Estimate at0 = qtm_quadrature(cosine({1.0}), {6.0, 1, 0.0, {0.4}}, cfg);
  CHECK(at0.value == std::cos(0.4));
  CHECK(at0.kind == ErrorKind::exact);
  CHECK_THROWS_AS(qtm_quadrature(quadratic(2), {6.0, 1, 1.0, {}}, cfg), ParamError);
  CHECK_THROWS_AS(qtm_quadrature(quadratic(1), {-1.0, 1, 1.0, {}}, cfg), ParamError);
}

TEST_CASE("subordinated path for cosine") {
  const double m = 6.0, t = 1.0;
  for (double x : {0.0, 0.7}) {
    Estimate sub = qtm_subordinated(cosine({1.0}), {m, 1, t, {x}}, QuadratureConfig{});
    Estimate quad = qtm_quadrature(cosine({1.0}), {m, 1, t, {x}}, QuadratureConfig{});
    // P_s cos = e^{-s} cos, so the answer is cos(x) E[exp(-t^2 / 4G)]
    const double h = oracle::half_line([&](double u) {
      return std::exp(-t * t / (4 * u)) * std::pow(u, m / 2 - 1) * std::exp(-u) / std::tgamma(m / 2);
    });
    CHECK(std::abs(sub.value - std::cos(x) * h) <= sub.error_bound + 1e-12);
    CHECK(std::abs(sub.value - quad.value) <= sub.error_bound + quad.error_bound);
  }
  CHECK(qtm_subordinated(constant_field(2, 1.0), {5.0, 2, 0.8, {}}, QuadratureConfig{}).value ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("cross-path agreement on the library") {
  QuadratureConfig cfg;
  MonteCarloConfig mc;
  mc.n_samples = 200000;
  for (int d = 1; d <= 2; ++d) {
    for (const auto& f : field_library(d)) {
      QtmParams p{5.0 + d, d, 0.7, std::vector<double>(d, 0.2)};
      Estimate a = qtm_quadrature(f, p, cfg), b = qtm_subordinated(f, p, cfg), c = qtm_mc(f, p, mc);
      INFO(f.id());
      CHECK(std::abs(a.value - b.value) <= a.error_bound + b.error_bound);
      CHECK(std::abs(a.value - c.value) <= 3 * c.error_bound + a.error_bound);
    }
  }
}

TEST_CASE("monte carlo path") {
  MonteCarloConfig mc;
  mc.n_samples = 1000000;
  Estimate one = qtm_mc(constant_field(2, 1.0), {6.0, 2, 1.0, {}}, mc);
  CHECK(one.value == 1.0);
  CHECK(one.error_bound == 0.0);
  Estimate q = qtm_mc(quadratic(2), {6.0, 2, 1.0, {}}, mc);
  CHECK(std::abs(q.value - 0.5) < 3 * q.error_bound);
}

TEST_CASE("translation and dilation covariance") {
  QuadratureConfig cfg;
  DifferentiableField f = positive_bump(1.0, {0.3, -0.2});
  const double t = 0.6;
  const std::vector<double> x{0.5, 0.1};
  Estimate a = qtm_quadrature(f, {7.0, 2, t, x}, cfg);
  Estimate b = qtm_quadrature(affine_precompose(f, t, x), {7.0, 2, 1.0, {}}, cfg);
  CHECK(std::abs(a.value - b.value) <= a.error_bound + b.error_bound);
}

TEST_CASE("positivity and eigen-decay") {
  QuadratureConfig cfg;
  CHECK(qtm_quadrature(gaussian_bump(2.0, {3.0}), {3.0, 1, 0.1, {-3.0}}, cfg).value >= 0.0);
  const std::vector<double> k{1.3, -0.4};
  double H = 0.0;
  for (const auto& x : std::vector<std::vector<double>>{{0.0, 0.0}, {0.3, 0.9}, {-1.2, 0.4}}) {
    const double fx = std::cos(k[0] * x[0] + k[1] * x[1]);
    const double q = qtm_quadrature(cosine(k), {6.0, 2, 0.8, x}, cfg).value;
    const double h = q / fx;
    if (H == 0.0) H = h;
    CHECK(h == doctest::Approx(H).epsilon(1e-8));
  }
}

TEST_CASE("harmonicity") {
  for (auto [m, d, t] : {std::tuple{6.0, 2, 1.0}, std::tuple{8.0, 1, 0.5}, std::tuple{5.5, 3, 0.3}}) {
    std::vector<double> xt(d, 0.3);
    xt.push_back(t);
    HarmonicityResidual r = harmonicity_residual_analytic(harmonic_quadratic(d, m), m, xt);
    CHECK(r.residual < 1e-12);
    CHECK(r.scale > 1.0);
  }
  HarmonicityResidual c = harmonicity_residual(cosine({1.0}), {6.0, 1, 1.0, {0.2}}, 5e-3, tight());
  CHECK(c.residual < 1e-4);
  HarmonicityResidual one = harmonicity_residual(constant_field(1, 1.0), {6.0, 1, 1.0, {0.2}}, 5e-3, tight());
  CHECK(one.residual < 1e-8);
  CHECK_THROWS_AS(harmonicity_residual(cosine({1.0}), {6.0, 1, 0.01, {0.2}}, 0.02, tight()), DomainError);
}

TEST_CASE("jets of Q agree with finite differences and are harmonic") {
  QuadratureConfig cfg = tight();
  DifferentiableField f = positive_bump(1.0, {0.2, -0.3});
  const double m = 6.0, t = 0.8;
  const std::vector<double> x{0.1, 0.4};
  QtmJet qj = qtm_jet(f, {m, 2, t, x}, 3, cfg);
  const Jet& J = qj.jet;
  CHECK(J.value() == doctest::Approx(qtm_quadrature(f, {m, 2, t, x}, cfg).value).epsilon(1e-11));
  const PointFunction q = [&](std::span<const double> p) {
    return qtm_quadrature(f, {m, 2, p[2], {p[0], p[1]}}, cfg).value;
  };
  const double xt[] = {x[0], x[1], t};
  const std::array<int, 3> idx[] = {{1, 0, 0}, {0, 0, 1}, {1, 1, 0}, {0, 0, 2}, {2, 0, 1}, {0, 1, 2}};
  for (const auto& a : idx) {
    int order = a[0] + a[1] + a[2];
    MultiIndex mi{static_cast<uint8_t>(a[0]), static_cast<uint8_t>(a[1]), static_cast<uint8_t>(a[2]), 0};
    // Richardson-extrapolated central differences
    const double h = order <= 2 ? 2e-3 : 2e-2;
    const double fd = (4 * fd_derivative(q, xt, a, h / 2) - fd_derivative(q, xt, a, h)) / 3;
    CHECK(J.partial(mi) == doctest::Approx(fd).epsilon(1e-5).scale(1e-3));
  }
  const double res = J.hess(0, 0) + J.hess(1, 1) + J.hess(2, 2) + (1 - m) / t * J.grad(2);
  CHECK(std::abs(res) < 1e-9);
  // the t-derivative of the harmonic equation holds as well
  const int d3[][3] = {{0, 0, 2}, {1, 1, 2}, {2, 2, 2}};
  const double res_t = J.derivative(d3[0]) + J.derivative(d3[1]) + J.derivative(d3[2]) +
                       (1 - m) / t * J.hess(2, 2) - (1 - m) / (t * t) * J.grad(2);
  CHECK(std::abs(res_t) < 1e-8);
  CHECK_THROWS_AS(qtm_jet(f, {m, 2, 0.0, x}, 2, cfg), DomainError);
}

TEST_CASE("moment identity") {
  MonteCarloConfig mc;
  mc.n_samples = 1000000;
  QuadratureConfig cfg;
  MomentIdentity one = moment_identity_gap(constant_field(1, 1.0), 1.0, {6.0, 1, 1.0, {}}, cfg, mc);
  CHECK(one.rhs.value == doctest::Approx(0.125).epsilon(1e-10));
  CHECK(one.lhs_quadrature.value == doctest::Approx(0.125).epsilon(1e-9));
  CHECK(one.gap_mc < 3 * one.lhs_mc.error_bound);

  MomentIdentity q = moment_identity_gap(quadratic(2), 1.0, {8.0, 2, 1.0, {}}, cfg, mc);
  CHECK(q.rhs.value == doctest::Approx(1.0 / 24.0).epsilon(1e-9));
  CHECK(q.gap_quadrature < 1e-6);
  CHECK(q.gap_mc < 3 * q.lhs_mc.error_bound);

  // a non-integer exponent exercises the Gamma factor
  MomentIdentity h = moment_identity_gap(positive_bump(1.0, {0.3}), 0.5, {6.0, 1, 0.9, {0.1}}, cfg, mc);
  CHECK(h.gap_quadrature < 1e-6);
  CHECK(h.gap_mc < 3 * h.lhs_mc.error_bound);

  CHECK_THROWS_AS(moment_identity_gap(quadratic(1), 3.0, {6.0, 1, 1.0, {}}, cfg, mc), DomainError);
}

TEST_CASE("taylor remainder order") {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-15;
  cfg.rel_tol = 1e-15;
  const double x0[] = {0.0};
  const double ts[] = {0.05, 0.1, 0.15, 0.2, 0.3, 0.4};
  TaylorFit fit = taylor_remainder_order(cosine({1.0}), 10.0, x0, ts, cfg);
  CHECK(fit.slope == doctest::Approx(6.0).epsilon(0.05));
  // next coefficient of the series: c_3 = -1/9216 for m = 10
  CHECK(fit.remainder[0] == doctest::Approx(-std::pow(0.05, 6) / 9216.0).epsilon(1e-2));
  CHECK_THROWS_AS(taylor_remainder_order(constant_field(1, 1.0), 10.0, x0, ts, cfg), DegenerateFit);
  CHECK_THROWS_AS(taylor_remainder_order(quadratic(1), 10.0, x0, ts, cfg), DegenerateFit);
}
