#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "beckner/errors.hpp"
#include "beckner/jet.hpp"
#include "beckner/numerics.hpp"

using namespace beckner;

TEST_CASE("layout sizes") {
  CHECK(jet_layout(1, 4).size() == 5);
  CHECK(jet_layout(2, 4).size() == 15);
  CHECK(jet_layout(3, 4).size() == 35);
  CHECK(jet_layout(4, 4).size() == 70);
  CHECK(jet_layout(3, 2).size() == 10);
  CHECK_THROWS_AS(jet_layout(5, 1), ParamError);
}

TEST_CASE("product of variables") {
  Jet x = Jet::variable(2, 4, 0, 1.5);
  Jet y = Jet::variable(2, 4, 1, -0.5);
  Jet f = x * x * y;  // x^2 y
  CHECK(f.value() == doctest::Approx(1.5 * 1.5 * -0.5));
  CHECK(f.grad(0) == doctest::Approx(2 * 1.5 * -0.5));
  CHECK(f.grad(1) == doctest::Approx(1.5 * 1.5));
  CHECK(f.hess(0, 0) == doctest::Approx(2 * -0.5));
  CHECK(f.hess(0, 1) == doctest::Approx(3.0));
  CHECK(f.third(0, 0, 1) == doctest::Approx(2.0));
  CHECK(f.fourth(0, 0, 1, 1) == doctest::Approx(0.0));
}

TEST_CASE("composition matches finite differences") {
  const double p[] = {0.3, -0.2, 0.7};
  auto build = [&](int order) {
    Jet r2 = Jet::constant(3, order, 0.0);
    for (int i = 0; i < 3; ++i) {
      Jet xi = Jet::variable(3, order, i, p[i]);
      r2 += xi * xi;
    }
    return exp(Jet::variable(3, order, 0, p[0]) * -1.0) * pow(r2 + 1.0, -1.5) + cos(Jet::variable(3, order, 1, p[1]) * 2.0);
  };
  const PointFunction f = [](std::span<const double> y) {
    const double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    return std::exp(-y[0]) * std::pow(1 + r2, -1.5) + std::cos(2 * y[1]);
  };
  Jet j = build(4);
  CHECK(j.value() == doctest::Approx(f(p)).epsilon(1e-14));
  const JetLayout& L = j.layout();
  for (int k = 1; k < L.size(); ++k) {
    std::array<int, 3> a{L.exponents[k][0], L.exponents[k][1], L.exponents[k][2]};
    const double fd = fd_derivative(f, p, a, L.degree[k] <= 2 ? 1e-3 : 1e-2);
    CHECK(j.partial(L.exponents[k]) == doctest::Approx(fd).epsilon(1e-3).scale(1.0));
  }
}

TEST_CASE("log and diff") {
  Jet x = Jet::variable(1, 4, 0, 2.0);
  Jet l = log(x);
  CHECK(l.value() == doctest::Approx(std::log(2.0)));
  const int a3[] = {0, 0, 0};
  CHECK(l.derivative(a3) == doctest::Approx(2.0 / 8.0));
  Jet dl = l.diff(0);
  CHECK(dl.order() == 3);
  CHECK(dl.value() == doctest::Approx(0.5));
  CHECK(dl.grad(0) == doctest::Approx(-0.25));
}

TEST_CASE("mixed order addition truncates") {
  Jet a = Jet::variable(2, 4, 0, 1.0);
  Jet b = Jet::variable(2, 2, 1, 1.0);
  Jet c = a + b;
  CHECK(c.order() == 2);
  CHECK(c.value() == 2.0);
  CHECK_THROWS_AS(c.third(0, 0, 0), DomainError);
}

TEST_CASE("mixed partials are symmetric") {
  Jet x = Jet::variable(3, 4, 0, 0.1), y = Jet::variable(3, 4, 1, 0.2), z = Jet::variable(3, 4, 2, 0.3);
  Jet f = exp(x * y) * cos(z * x + y);
  CHECK(f.hess(0, 1) == f.hess(1, 0));
  CHECK(f.third(0, 1, 2) == f.third(2, 1, 0));
  CHECK(f.fourth(0, 1, 1, 2) == f.fourth(2, 1, 0, 1));
}
