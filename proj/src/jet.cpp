#include "beckner/jet.hpp"

#include <cmath>
#include <string>

#include "beckner/errors.hpp"

namespace beckner {
namespace {

int encode(const MultiIndex& a) {
  int code = 0;
  for (int i = kMaxJetDim - 1; i >= 0; --i) code = code * 5 + a[i];
  return code;
}

JetLayout build_layout(int dim, int order) {
  JetLayout L;
  L.dim = dim;
  L.order = order;
  L.lookup.fill(-1);
  for (int deg = 0; deg <= order; ++deg) {
    // Enumerate exponents of total degree deg, lexicographically descending.
    MultiIndex a{};
    auto rec = [&](auto&& self, int pos, int left) -> void {
      if (pos == dim - 1) {
        a[pos] = static_cast<std::uint8_t>(left);
        L.lookup[encode(a)] = L.size();
        L.exponents.push_back(a);
        L.degree.push_back(deg);
        return;
      }
      for (int v = left; v >= 0; --v) {
        a[pos] = static_cast<std::uint8_t>(v);
        self(self, pos + 1, left - v);
      }
      a[pos] = 0;
    };
    if (dim == 0) {
      if (deg == 0) {
        L.lookup[0] = 0;
        L.exponents.push_back(a);
        L.degree.push_back(0);
      }
    } else {
      rec(rec, 0, deg);
    }
  }
  for (const auto& e : L.exponents) {
    double f = 1.0;
    for (int i = 0; i < dim; ++i)
      for (int k = 2; k <= e[i]; ++k) f *= k;
    L.factorial.push_back(f);
  }
  for (int i = 0; i < L.size(); ++i) {
    for (int j = 0; j < L.size(); ++j) {
      if (L.degree[i] + L.degree[j] > order) continue;
      MultiIndex s{};
      for (int k = 0; k < kMaxJetDim; ++k) s[k] = static_cast<std::uint8_t>(L.exponents[i][k] + L.exponents[j][k]);
      L.products.push_back({i, j, L.lookup[encode(s)]});
    }
  }
  return L;
}

struct LayoutTable {
  std::array<std::array<JetLayout, kMaxJetOrder + 1>, kMaxJetDim + 1> table;
  LayoutTable() {
    for (int d = 1; d <= kMaxJetDim; ++d)
      for (int k = 0; k <= kMaxJetOrder; ++k) table[d][k] = build_layout(d, k);
  }
};

}  // namespace

int JetLayout::index(const MultiIndex& a) const {
  int deg = 0;
  for (int i = 0; i < kMaxJetDim; ++i) {
    if (a[i] > 4) return -1;
    if (i >= dim && a[i] != 0) return -1;
    deg += a[i];
  }
  if (deg > order) return -1;
  return lookup[encode(a)];
}

const JetLayout& jet_layout(int dim, int order) {
  static const LayoutTable tables;
  if (dim < 1 || dim > kMaxJetDim || order < 0 || order > kMaxJetOrder)
    throw ParamError("jet layout out of range: dim=" + std::to_string(dim) + " order=" + std::to_string(order));
  return tables.table[dim][order];
}

Jet::Jet(int dim, int order) : layout_(&jet_layout(dim, order)) {}

Jet Jet::constant(int dim, int order, double value) {
  Jet j(dim, order);
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(int dim, int order, int i, double x0) {
  Jet j(dim, order);
  j.c_[0] = x0;
  if (order >= 1) {
    MultiIndex e{};
    e[i] = 1;
    j.c_[j.layout_->index(e)] = 1.0;
  }
  return j;
}

double Jet::partial(const MultiIndex& a) const {
  const int idx = layout_->index(a);
  if (idx < 0) throw DomainError("partial derivative beyond jet order");
  return c_[idx] * layout_->factorial[idx];
}

double Jet::derivative(std::span<const int> axes) const {
  MultiIndex a{};
  for (int ax : axes) ++a[ax];
  return partial(a);
}

double Jet::grad(int i) const {
  const int ax[] = {i};
  return derivative(ax);
}
double Jet::hess(int i, int j) const {
  const int ax[] = {i, j};
  return derivative(ax);
}
double Jet::third(int i, int j, int k) const {
  const int ax[] = {i, j, k};
  return derivative(ax);
}
double Jet::fourth(int i, int j, int k, int l) const {
  const int ax[] = {i, j, k, l};
  return derivative(ax);
}

double Jet::laplacian() const {
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) s += hess(i, i);
  return s;
}

Jet Jet::diff(int i) const {
  if (order() < 1) throw DomainError("cannot differentiate an order-0 jet");
  Jet out(dim(), order() - 1);
  const JetLayout& lo = *out.layout_;
  for (int k = 0; k < lo.size(); ++k) {
    MultiIndex a = lo.exponents[k];
    const double mult = a[i] + 1.0;
    ++a[i];
    out.c_[k] = mult * c_[layout_->index(a)];
  }
  return out;
}

Jet Jet::truncate(int new_order) const {
  if (new_order >= order()) return *this;
  Jet out(dim(), new_order);
  for (int k = 0; k < out.size(); ++k) out.c_[k] = c_[k];  // graded order makes this a prefix
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.order() < order()) *this = truncate(o.order());
  for (int k = 0; k < size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.order() < order()) *this = truncate(o.order());
  for (int k = 0; k < size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (int k = 0; k < size(); ++k) c_[k] *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  const int order = std::min(a.order(), b.order());
  Jet out(a.dim(), order);
  for (const auto& p : out.layout_->products) out.c_[p.out] += a.c_[p.lhs] * b.c_[p.rhs];
  return out;
}

Jet compose(const Jet& u, std::span<const double> derivs) {
  const int n = u.order();
  Jet delta = u;
  delta.coeff(0) = 0.0;
  // Horner in delta with coefficients g^{(k)}/k!
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  Jet acc = Jet::constant(u.dim(), n, derivs[n] / fact);
  for (int k = n - 1; k >= 0; --k) {
    fact /= (k + 1);
    acc = acc * delta;
    acc += derivs[k] / fact;
  }
  return acc;
}

std::array<double, kMaxJetOrder + 1> pow_derivs(double x, double exponent) {
  std::array<double, kMaxJetOrder + 1> d{};
  double coef = 1.0;
  for (int k = 0; k <= kMaxJetOrder; ++k) {
    d[k] = coef == 0.0 ? 0.0 : coef * std::pow(x, exponent - k);
    coef *= (exponent - k);
  }
  return d;
}

std::array<double, kMaxJetOrder + 1> exp_derivs(double x) {
  std::array<double, kMaxJetOrder + 1> d;
  d.fill(std::exp(x));
  return d;
}

std::array<double, kMaxJetOrder + 1> log_derivs(double x) {
  std::array<double, kMaxJetOrder + 1> d{};
  d[0] = std::log(x);
  double coef = 1.0;
  for (int k = 1; k <= kMaxJetOrder; ++k) {
    d[k] = coef / std::pow(x, k);
    coef *= -static_cast<double>(k);
  }
  return d;
}

std::array<double, kMaxJetOrder + 1> cos_derivs(double x) {
  const double c = std::cos(x), s = std::sin(x);
  return {c, -s, -c, s, c};
}

}  // namespace beckner
