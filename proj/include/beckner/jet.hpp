#pragma once

// Truncated multivariate Taylor polynomials ("jets").
//
// A Jet of order k in D variables stores the Taylor coefficients
// c_a = (d^a f)(p) / a! for every multi-index |a| <= k at a base point p.
// Arithmetic on jets is exact polynomial arithmetic truncated at order k,
// which gives analytic derivatives of composite expressions to order 4.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace beckner {

inline constexpr int kMaxJetDim = 4;
inline constexpr int kMaxJetOrder = 4;
/// C(kMaxJetDim + kMaxJetOrder, kMaxJetOrder)
inline constexpr int kMaxJetTerms = 70;

using MultiIndex = std::array<std::uint8_t, kMaxJetDim>;

/// Monomial enumeration and product table for one (dim, order) pair.
struct JetLayout {
  int dim = 0;
  int order = 0;
  std::vector<MultiIndex> exponents;  // graded order: degree 0, 1, ...
  std::vector<int> degree;
  std::vector<double> factorial;  // a! per monomial
  std::array<int, 625> lookup{};  // base-5 code -> index, -1 if absent
  struct Product {
    int lhs, rhs, out;
  };
  std::vector<Product> products;  // all pairs with deg(lhs)+deg(rhs) <= order

  int size() const { return static_cast<int>(exponents.size()); }
  int index(const MultiIndex& a) const;
};

const JetLayout& jet_layout(int dim, int order);

class Jet {
 public:
  Jet() = default;
  Jet(int dim, int order);

  static Jet constant(int dim, int order, double value);
  /// The coordinate function x_i expanded at base value x0.
  static Jet variable(int dim, int order, int i, double x0);

  int dim() const { return layout_->dim; }
  int order() const { return layout_->order; }
  int size() const { return layout_->size(); }
  const JetLayout& layout() const { return *layout_; }

  double value() const { return c_[0]; }
  double coeff(int idx) const { return c_[idx]; }
  double& coeff(int idx) { return c_[idx]; }
  std::span<const double> coeffs() const { return {c_.data(), static_cast<std::size_t>(size())}; }
  std::span<double> coeffs() { return {c_.data(), static_cast<std::size_t>(size())}; }

  /// Partial derivative d^a f(p); a given as counts per coordinate.
  double partial(const MultiIndex& a) const;
  /// Partial derivative along the listed axes, e.g. {0, 0, 1} = d_00 d_1.
  double derivative(std::span<const int> axes) const;
  double grad(int i) const;
  double hess(int i, int j) const;
  double third(int i, int j, int k) const;
  double fourth(int i, int j, int k, int l) const;
  double laplacian() const;

  /// Jet of d_i f, one order lower.
  Jet diff(int i) const;
  /// Same expansion truncated to a lower order.
  Jet truncate(int order) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator*(const Jet& a, const Jet& b);

 private:
  const JetLayout* layout_ = nullptr;
  std::array<double, kMaxJetTerms> c_{};
};

/// g(u) where derivs[k] = g^{(k)}(u.value()) for k = 0..u.order().
Jet compose(const Jet& u, std::span<const double> derivs);

/// Closed-form univariate derivatives used with compose().
std::array<double, kMaxJetOrder + 1> pow_derivs(double x, double exponent);
std::array<double, kMaxJetOrder + 1> exp_derivs(double x);
std::array<double, kMaxJetOrder + 1> log_derivs(double x);
std::array<double, kMaxJetOrder + 1> cos_derivs(double x);

inline Jet pow(const Jet& u, double exponent) { return compose(u, pow_derivs(u.value(), exponent)); }
inline Jet exp(const Jet& u) { return compose(u, exp_derivs(u.value())); }
inline Jet log(const Jet& u) { return compose(u, log_derivs(u.value())); }
inline Jet cos(const Jet& u) { return compose(u, cos_derivs(u.value())); }

}  // namespace beckner
