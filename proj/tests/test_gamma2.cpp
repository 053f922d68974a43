#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "beckner/errors.hpp"
#include "beckner/gamma2.hpp"
#include "beckner/qtm.hpp"

using namespace beckner;

namespace {

DifferentiableField sphere_u(int d) {
  return quotient(add_constant(scale(quadratic(d), -1.0), 1.0), make_power_of_rho(2.0, d));
}

std::vector<std::vector<double>> random_points(int dim, int n, double lo, double hi, unsigned seed,
                                               bool last_positive = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi), tpos(0.3, 2.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& p : pts) {
    for (double& v : p) v = u(rng);
    if (last_positive) p.back() = tpos(rng);
  }
  return pts;
}

// 1/2 L Gamma(f) - Gamma(f, L f) with L a Delta + X applied by central
// differences to Gamma(f) and L f built from the field's gradient and Laplacian
double gamma2_fd(const DiffusionOperator& op, const DifferentiableField& f, std::vector<double> x, double h) {
  const int n = op.dim;
  auto Gamma = [&](const std::vector<double>& y) {
    const auto g = f.gradient(y);
    double s = 0.0;
    for (double v : g) s += v * v;
    return op.conformal_factor(y) * s;
  };
  auto Lf = [&](const std::vector<double>& y) {
    const auto g = f.gradient(y);
    const auto X = op.drift(y);
    double s = op.conformal_factor(y) * f.laplacian(y);
    for (int i = 0; i < n; ++i) s += X[i] * g[i];
    return s;
  };
  const double G0 = Gamma(x);
  const auto X = op.drift(x);
  const auto g = f.gradient(x);
  double lap = 0.0, adv = 0.0, cross = 0.0;
  for (int i = 0; i < n; ++i) {
    auto xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double Gp = Gamma(xp), Gm = Gamma(xm);
    lap += (Gp - 2.0 * G0 + Gm) / (h * h);
    adv += X[i] * (Gp - Gm) / (2.0 * h);
    cross += g[i] * (Lf(xp) - Lf(xm)) / (2.0 * h);
  }
  return 0.5 * (op.conformal_factor(x) * lap + adv) - op.conformal_factor(x) * cross;
}

}  // namespace

TEST_CASE("carre du champ") {
  const std::vector<double> e1{1.0, 0.0};
  CHECK(carre_du_champ(euclidean_operator(2), quadratic(2), quadratic(2), e1) == doctest::Approx(4.0));
  const std::vector<double> zero{0.0, 0.0};
  const auto u = sphere_u(2);
  CHECK(std::abs(carre_du_champ(sphere_operator(2), u, u, zero)) < 1e-15);
  const auto t2 = power(coordinate(2, 1), 2.0);
  CHECK(carre_du_champ(halfspace_operator(1, 6.0), t2, t2, std::vector<double>{0.3, 1.0}) == doctest::Approx(4.0));
  CHECK_THROWS_AS(carre_du_champ(halfspace_operator(1, 6.0), t2, t2, std::vector<double>{0.3, -1.0}), DomainError);
  // sphere: Gamma(u) = 1 - u^2 off the pole too
  for (const auto& x : random_points(3, 20, -2.0, 2.0, 5)) {
    const auto u3 = sphere_u(3);
    const double uv = u3(x);
    CHECK(carre_du_champ(sphere_operator(3), u3, u3, x) == doctest::Approx(1.0 - uv * uv).epsilon(1e-12));
  }
}

TEST_CASE("gamma2 examples and finite-difference oracle") {
  for (const auto& x : random_points(2, 5, -2.0, 2.0, 1))
    CHECK(gamma2(euclidean_operator(2), quadratic(2), x) == doctest::Approx(8.0).epsilon(1e-13));
  const auto cube = power(coordinate(1, 0), 3.0);
  const std::vector<double> one{1.0};
  CHECK(gamma2(euclidean_operator(1), cube, one) == doctest::Approx(36.0).epsilon(1e-13));
  CHECK(gamma2_fd(euclidean_operator(1), cube, one, 1e-3) == doctest::Approx(36.0).epsilon(1e-6));

  const std::vector<DiffusionOperator> ops{euclidean_operator(2), halfspace_operator(1, 6.0), sphere_operator(2)};
  for (const auto& op : ops)
    for (const auto& f : field_library(op.dim))
      for (const auto& x : random_points(op.dim, 4, -1.0, 1.0, 7, op.kind == OperatorKind::halfspace)) {
        const double exact = gamma2(op, f, x);
        const double fd = gamma2_fd(op, f, x, 1e-4);
        CHECK_MESSAGE(std::abs(exact - fd) <= 1e-5 * std::max(1.0, std::abs(exact)), op.name(), " ", f.id());
      }
}

TEST_CASE("bochner consistency") {
  std::vector<DiffusionOperator> ops;
  for (int d = 1; d <= 3; ++d) {
    ops.push_back(euclidean_operator(d));
    ops.push_back(sphere_operator(d));
    ops.push_back(halfspace_operator(d, 6.0));
    ops.push_back(halfspace_operator(d, 2.5));
  }
  ops.push_back(euclidean_operator(4));
  ops.push_back(sphere_operator(4));
  for (const auto& op : ops)
    for (const auto& f : field_library(op.dim))
      for (const auto& x : random_points(op.dim, 6, -1.5, 1.5, 11, op.kind == OperatorKind::halfspace)) {
        const Gamma2Report r = gamma2_report(op, f, x);
        CHECK_MESSAGE(r.discrepancy < 1e-9, op.name(), " ", f.id(), " ", r.definition, " vs ", r.bochner);
      }
  const std::vector<double> pt{0.2, 0.7};
  const auto t2 = power(coordinate(2, 1), 2.0);
  const Gamma2Report h = gamma2_report(halfspace_operator(1, 6.0), t2, pt);
  CHECK(h.definition == doctest::Approx(h.bochner).epsilon(1e-12));
  // Hessian 2, Ric (1-m)/t^2 times (2t)^2
  CHECK(h.definition == doctest::Approx(4.0 + 4.0 * (1.0 - 6.0)).epsilon(1e-12));
}

TEST_CASE("cd residual") {
  for (int d = 1; d <= 4; ++d) {
    const auto x = random_points(d, 1, -1.0, 1.0, 3)[0];
    CHECK(std::abs(cd_residual(euclidean_operator(d), quadratic(d), x, {0.0, double(d)})) < 1e-12);
  }
  const auto x1sq = power(coordinate(2, 0), 2.0);
  CHECK(cd_residual(euclidean_operator(2), x1sq, std::vector<double>{0.4, -0.3}, {0.0, 2.0}) ==
        doctest::Approx(2.0).epsilon(1e-13));
  const std::vector<double> zero{0.0, 0.0};
  CHECK(cd_residual(sphere_operator(2), sphere_u(2), zero, {1.0, 2.0}) >= -1e-12);
  // the sphere satisfies CD(d - 1, d) everywhere; u is an equality case
  for (int d = 2; d <= 3; ++d) {
    const auto op = sphere_operator(d);
    for (const auto& x : random_points(d, 20, -2.0, 2.0, 13 + d)) {
      CHECK(std::abs(cd_residual(op, sphere_u(d), x, {d - 1.0, double(d)})) < 1e-9);
      for (const auto& f : field_library(d)) {
        const double g2 = gamma2(op, f, x);
        CHECK(cd_residual(op, f, x, {d - 1.0, double(d)}) >= -1e-9 * std::max(1.0, std::abs(g2)));
      }
    }
  }
  CHECK_THROWS_AS(cd_residual(euclidean_operator(2), x1sq, zero, {0.0, 0.0}), ParamError);
}

TEST_CASE("quasi-model identity") {
  for (double m : {1.0, 2.5, 3.0, 6.0, 9.0})
    for (int d = 1; d <= 3; ++d)
      for (double t : {0.05, 0.5, 1.0, 3.0}) {
        std::vector<double> x(d + 1, 0.3);
        x.back() = t;
        const auto op = halfspace_operator(d, m);
        const QmResidual r = qm_residual(op, x);
        CHECK(r.residual <= 1e-12 * std::max(1.0, r.scale));
        // the drift-derived Ricci tensor agrees with the closed form
        const auto R = op.ricci(x);
        const auto XX = op.drift_square(x);
        const double n = d - m + 2.0;
        CHECK(std::abs((n - d - 1) * R.back() - XX.back()) <= 1e-12 * std::max(1.0, XX.back()));
      }
  const QmResidual r1 = qm_residual(halfspace_operator(2, 1.0), std::vector<double>{0.0, 0.0, 0.7});
  CHECK(r1.residual == 0.0);
  CHECK(r1.scale == 0.0);
  CHECK_THROWS_AS(qm_residual(halfspace_operator(2, 6.0), std::vector<double>{0.0, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(qm_residual(euclidean_operator(2), std::vector<double>{0.0, 0.0}), ParamError);
}

TEST_CASE("phi condition sets") {
  std::vector<std::array<double, 2>> grid;
  for (double y : {0.1, 0.5, 1.0, 2.0, 5.0})
    for (double z : {0.0, 0.1, 1.0, 4.0}) grid.push_back({y, z});
  const int d = 3;
  const double n = -2.0;
  const double beta_star = n / (2.0 - n);
  for (double beta : {beta_star, 0.75 * beta_star, 0.5 * beta_star, 0.0}) {
    const PhiReport r = phi_conditions(phi_power_z(beta), n, d, 0.0, grid);
    CHECK_MESSAGE(r.pass, beta);
    for (const auto& p : r.points) CHECK(p.branch == PhiBranch::gradient);
  }
  double prev = 0.0;
  for (double delta : {0.05, 0.1, 0.2}) {
    const PhiReport r = phi_conditions(phi_power_z(beta_star - delta), n, d, 0.0, grid);
    CHECK_FALSE(r.pass);
    CHECK(r.worst_margin < prev);
    prev = r.worst_margin;
  }
  CHECK_FALSE(phi_conditions(phi_power_z(0.3), n, d, 0.0, grid).pass);

  const PhiSurface flat{"y^2", [](double y, double) { return PhiPartials{y * y, 2.0 * y, 0.0, 2.0, 0.0, 0.0}; }};
  const PhiReport rf = phi_conditions(flat, n, d, 0.0, grid);
  CHECK(rf.pass);
  CHECK(rf.points[5].branch == PhiBranch::degenerate_flat);
  const PhiSurface bowl{"(z-1)^2", [](double, double z) {
                          return PhiPartials{(z - 1) * (z - 1), 0.0, 2.0 * (z - 1), 0.0, 0.0, 2.0};
                        }};
  const std::array<double, 2> at1{0.5, 1.0};
  CHECK(phi_conditions(bowl, n, d, 0.0, std::span(&at1, 1)).points[0].branch == PhiBranch::degenerate_convex);
  CHECK(to_string(PhiBranch::degenerate_convex) == "degenerate_convex");
}

TEST_CASE("theta admissibility") {
  std::vector<double> grid;
  for (int i = 1; i <= 40; ++i) grid.push_back(0.1 * i);
  const double n = -2.0, q = n / (2.0 - n);
  const ThetaReport extremal = theta_admissible(
      [q](double x) {
        return std::array<double, 3>{std::pow(x, q), q * std::pow(x, q - 1), q * (q - 1) * std::pow(x, q - 2)};
      },
      n, grid);
  CHECK(extremal.admissible);
  CHECK(std::abs(extremal.worst_margin) < 1e-12);
  CHECK(theta_admissible([](double) { return std::array<double, 3>{1.0, 0.0, 0.0}; }, n, grid).admissible);
  const ThetaReport inv = theta_admissible(
      [](double x) { return std::array<double, 3>{1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)}; }, n, grid);
  CHECK_FALSE(inv.admissible);
  CHECK_THROWS_AS(theta_admissible([](double x) { return std::array<double, 3>{x - 1.0, 1.0, 0.0}; }, n, grid),
                  DomainError);
  CHECK_THROWS_AS(theta_admissible([](double) { return std::array<double, 3>{1.0, 0.0, 0.0}; }, 1.0, grid),
                  ParamError);
}

TEST_CASE("sub-harmonic functional of Q_t f") {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-11;
  cfg.rel_tol = 1e-10;
  const int d = 2;
  {
    const auto op = halfspace_operator(d, d + 2.0);
    const std::vector<double> x{0.2, -0.1};
    const auto f = positive_bump(1.0, {0.4, 0.0});
    const SubharmonicResult r = subharmonic_residual(op, f, 0.0, x, 0.7, cfg);
    CHECK(r.residual == doctest::Approx(2.0 * r.gamma2).epsilon(1e-14));
    CHECK(r.residual >= 0.0);
  }
  {
    const auto op = halfspace_operator(d, 4.0);
    const auto one = subharmonic_residual(op, constant_field(d, 1.0), -0.5, std::vector<double>{0.3, 0.3}, 0.5, cfg);
    CHECK(std::abs(one.residual) < 1e-12);
  }
  const double m = d + 4.0, beta = -1.0 + 2.0 / (m - d);
  const auto op = halfspace_operator(d, m);
  const auto f = add_constant(gaussian_bump(1.0, {0.0, 0.0}), 1.0);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ux(-1.5, 1.5), ut(0.1, 2.0);
  for (int k = 0; k < 8; ++k) {
    const std::vector<double> x{ux(rng), ux(rng)};
    const double t = ut(rng);
    const QtmJet qj = qtm_jet(f, {m, d, t, x}, 3, cfg);
    std::vector<double> xt{x[0], x[1], t};
    const SubharmonicResult r = subharmonic_residual(op, qj.jet, beta, xt);
    CHECK(r.residual >= -1e-8 * r.scale);
    // oracle: apply L to the composed jet of F^beta Gamma(F)
    const Jet F2 = qj.jet.truncate(2);
    const Jet assembled = pow(F2, beta) * carre_du_champ_jet(op, qj.jet, qj.jet, xt);
    const double direct = apply_operator(op, assembled, xt);
    // the two differ by Phi_1 L F and Gamma(F, L F), both zero for harmonic F
    CHECK(std::abs(direct - r.residual) <= 1e-6 * r.scale + 1e-9);
  }
  CHECK_THROWS_AS(subharmonic_residual(op, constant_field(d, -1.0), beta, std::vector<double>{0.0, 0.0}, 1.0, cfg),
                  DomainError);
}

TEST_CASE("pointwise Euclidean inequalities") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int d = 2; d <= 3; ++d) {
    const auto f = positive_bump(1.0, std::vector<double>(d, 0.0));
    const auto g = gaussian_bump(0.7, std::vector<double>(d, 0.2));
    for (int k = 0; k < 50; ++k) {
      std::vector<double> x(d);
      for (double& v : x) v = u(rng);
      for (double beta : {-0.9, -0.5, -0.1, 0.0}) {
        const PointwiseResidual r = cd1_residual(f, beta, d, x);
        CHECK(r.residual >= -1e-9 * r.scale);
      }
      const PointwiseResidual rr = reinforced_cd_residual(g, d, x);
      CHECK(rr.residual >= -1e-9 * rr.scale);
      CHECK(std::abs(cd1_residual(quadratic(d), 0.0, d, std::vector<double>(d, 0.5)).residual) < 1e-10);
      CHECK(std::abs(reinforced_cd_residual(quadratic(d), d, x).residual) < 1e-10);
    }
  }
  // constants and linear fields are trivial equality cases
  CHECK(cd1_residual(constant_field(2, 3.0), -0.5, 2, std::vector<double>{0.1, 0.2}).residual == 0.0);
  CHECK(reinforced_cd_residual(coordinate(2, 0), 2, std::vector<double>{0.1, 0.2}).residual == 0.0);
  CHECK_THROWS_AS(cd1_residual(constant_field(2, -1.0), -0.5, 2, std::vector<double>{0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(reinforced_cd_residual(constant_field(2, 1.0), 2, std::vector<double>{0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(cd1_residual(quadratic(2), -1.0, 2, std::vector<double>{1.0, 0.0}), ParamError);
}
