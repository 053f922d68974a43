#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "beckner/errors.hpp"
#include "beckner/fields.hpp"
#include "beckner/numerics.hpp"

using namespace beckner;

namespace {

// FD error model for an order-k central stencil at step h: C h^2 with a
// generous constant; steps are chosen per order to keep roundoff small.
double fd_step(int order) { return order <= 2 ? 1e-3 : 1e-2; }
double fd_tol(int order, double scale) { return (order <= 2 ? 1e-5 : 5e-3) * std::max(1.0, scale); }

void check_against_fd(const DifferentiableField& f, std::span<const double> y) {
  Jet j = f.jet(y, 4);
  const JetLayout& L = j.layout();
  const PointFunction fn = [&](std::span<const double> p) { return f(p); };
  for (int k = 1; k < L.size(); ++k) {
    std::vector<int> a(f.dim());
    for (int i = 0; i < f.dim(); ++i) a[i] = L.exponents[k][i];
    const double exact = j.partial(L.exponents[k]);
    const double fd = fd_derivative(fn, y, a, fd_step(L.degree[k]));
    INFO(f.id(), " order ", L.degree[k]);
    CHECK(std::abs(exact - fd) <= fd_tol(L.degree[k], std::abs(exact)));
  }
}

}  // namespace

TEST_CASE("power of rho") {
  DifferentiableField one = make_power_of_rho(0.0, 2);
  const double y0[] = {0.3, -0.7};
  Jet j = one.jet(y0, 4);
  CHECK(j.value() == doctest::Approx(1.0));
  for (int k = 1; k < j.size(); ++k) CHECK(j.coeff(k) == 0.0);

  DifferentiableField r2 = make_power_of_rho(2.0, 2);
  const double e1[] = {1.0, 0.0};
  CHECK(r2(e1) == doctest::Approx(2.0));
  auto g = r2.gradient(e1);
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(0.0));

  DifferentiableField rm4 = make_power_of_rho(-4.0, 2);
  const double origin[] = {0.0, 0.0};
  const PointFunction fn = [&](std::span<const double> p) { return rm4(p); };
  const int dxx[] = {2, 0}, dyy[] = {0, 2};
  const double fd = fd_derivative(fn, origin, dxx, 1e-4) + fd_derivative(fn, origin, dyy, 1e-4);
  CHECK(rm4(origin) == 1.0);
  CHECK(rm4.laplacian(origin) == doctest::Approx(fd).epsilon(1e-6));
  CHECK(rm4.laplacian(origin) == doctest::Approx(-8.0));
}

TEST_CASE("affine precompose") {
  DifferentiableField f = cosine({1.0});
  DifferentiableField id = affine_precompose(f, 1.0, {0.0});
  const double y[] = {0.37};
  Jet a = f.jet(y, 4), b = id.jet(y, 4);
  for (int k = 0; k < a.size(); ++k) CHECK(a.coeff(k) == b.coeff(k));

  DifferentiableField g = affine_precompose(f, 2.0, {0.0});
  const double zero[] = {0.0};
  const int two[] = {0, 0};
  CHECK(g.jet(zero, 2).derivative(two) == doctest::Approx(-4.0));

  DifferentiableField q = affine_precompose(quadratic(2), 3.0, {1.0, 0.0});
  const double o[] = {0.0, 0.0};
  CHECK(q(o) == doctest::Approx(1.0));
  auto grad = q.gradient(o);
  const PointFunction fn = [&](std::span<const double> p) { return q(p); };
  const int d0[] = {1, 0};
  CHECK(grad[0] == doctest::Approx(6.0));
  CHECK(grad[0] == doctest::Approx(fd_derivative(fn, o, d0, 1e-4)).epsilon(1e-8));
  CHECK(grad[1] == doctest::Approx(0.0));
  CHECK_THROWS_AS(affine_precompose(f, 0.0, {0.0}), ParamError);
}

TEST_CASE("library derivatives agree with finite differences") {
  for (int d = 1; d <= 3; ++d) {
    std::vector<DifferentiableField> fields = field_library(d);
    fields.push_back(quadratic(d));
    fields.push_back(coordinate(d, d - 1));
    fields.push_back(power(positive_bump(0.7, std::vector<double>(d, 0.2)), -0.5));
    fields.push_back(log_field(make_power_of_rho(1.0, d)));
    fields.push_back(affine_precompose(positive_bump(1.0, std::vector<double>(d, 0.0)), 0.8, std::vector<double>(d, 0.1)));
    fields.push_back(quotient(cosine(std::vector<double>(d, 0.6)), make_power_of_rho(2.0, d)));
    fields.push_back(exp_field(scale(quadratic(d), -0.3)));
    std::vector<double> y(d);
    for (int i = 0; i < d; ++i) y[i] = 0.2 + 0.15 * i - 0.1 * d;
    for (const auto& f : fields) {
      CHECK(f.analytic());
      check_against_fd(f, y);
    }
  }
}

TEST_CASE("mixed partials are symmetric") {
  DifferentiableField f = product(positive_bump(0.5, {0.1, 0.2, 0.3}), cosine({0.3, 0.7, -0.4}));
  const double y[] = {0.2, -0.1, 0.5};
  Jet j = f.jet(y, 4);
  const double h01 = j.hess(0, 1), h10 = j.hess(1, 0);
  CHECK(std::abs(h01 - h10) <= 1e-10 * std::abs(h01));
}

TEST_CASE("power guard") {
  CHECK_THROWS_AS(power(cosine({1.0}), -1.0), DomainError);
  CHECK_THROWS_AS(power(coordinate(1, 0), 0.5), DomainError);
  CHECK_NOTHROW(power(positive_bump(1.0, {0.0}), -0.5));
  DifferentiableField cube = power(coordinate(1, 0), 3.0);
  const double zero[] = {0.0};
  const int three[] = {0, 0, 0};
  CHECK(cube.jet(zero, 3).derivative(three) == doctest::Approx(6.0));
  CHECK(cube.jet(zero, 4).coeff(4) == 0.0);
}

TEST_CASE("finite-difference fallback is flagged and consistent") {
  DifferentiableField analytic = positive_bump(1.0, {0.2, -0.1});
  DifferentiableField fallback =
      from_callable(2, [analytic](std::span<const double> y) { return analytic(y); }, "bump-fd");
  CHECK_FALSE(fallback.analytic());
  const double y[] = {0.3, 0.4};
  Jet a = analytic.jet(y, 2), b = fallback.jet(y, 2);
  for (int k = 0; k < a.size(); ++k) CHECK(a.coeff(k) == doctest::Approx(b.coeff(k)).epsilon(1e-6).scale(1.0));
}

TEST_CASE("half-space fields reject points below the boundary") {
  DifferentiableField t2 = from_callable(2, [](std::span<const double> p) { return p[1] * p[1]; }, "t^2",
                                         FieldDomain::half_space);
  const double inside[] = {0.0, 0.5}, outside[] = {0.0, -0.5};
  CHECK(t2(inside) == 0.25);
  CHECK_THROWS_AS(t2(outside), DomainError);
  CHECK(t2.jet(inside, 2).hess(1, 1) == doctest::Approx(2.0).epsilon(1e-6));
}
