#include "beckner/fields.hpp"

#include <cmath>
#include <sstream>

#include "beckner/errors.hpp"
#include "beckner/numerics.hpp"

namespace beckner {

DifferentiableField::DifferentiableField(std::shared_ptr<const FieldNode> node, int dim, std::string id,
                                         bool analytic, bool positive, FieldDomain domain)
    : node_(std::move(node)), dim_(dim), id_(std::move(id)), analytic_(analytic), positive_(positive), domain_(domain) {
  if (dim < 1 || dim > kMaxJetDim) throw ParamError("field dimension must be in [1, 4]");
}

bool DifferentiableField::contains(std::span<const double> y) const {
  if (domain_ == FieldDomain::half_space) return y[dim_ - 1] > 0.0;
  return true;
}

double DifferentiableField::operator()(std::span<const double> y) const {
  if (static_cast<int>(y.size()) != dim_) throw DomainError("field " + id_ + ": point has wrong dimension");
  if (!contains(y)) throw DomainError("field " + id_ + ": point outside the half-space");
  return node_->value(y);
}

double DifferentiableField::operator()(std::initializer_list<double> y) const {
  return (*this)(std::span<const double>(y.begin(), y.size()));
}

Jet DifferentiableField::jet(std::span<const double> y, int order) const {
  if (static_cast<int>(y.size()) != dim_) throw DomainError("field " + id_ + ": point has wrong dimension");
  if (!contains(y)) throw DomainError("field " + id_ + ": point outside the half-space");
  return node_->jet(y, order);
}

std::vector<double> DifferentiableField::gradient(std::span<const double> y) const {
  Jet j = jet(y, 1);
  std::vector<double> g(dim_);
  for (int i = 0; i < dim_; ++i) g[i] = j.grad(i);
  return g;
}

std::vector<double> DifferentiableField::hessian(std::span<const double> y) const {
  Jet j = jet(y, 2);
  std::vector<double> h(dim_ * dim_);
  for (int i = 0; i < dim_; ++i)
    for (int k = 0; k < dim_; ++k) h[i * dim_ + k] = j.hess(i, k);
  return h;
}

double DifferentiableField::laplacian(std::span<const double> y) const { return jet(y, 2).laplacian(); }

double DifferentiableField::partial(std::span<const double> y, const MultiIndex& a) const {
  int order = 0;
  for (auto v : a) order += v;
  return jet(y, order).partial(a);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string fmt(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s + "]";
}

Jet variable(std::span<const double> y, int order, int i) {
  return Jet::variable(static_cast<int>(y.size()), order, i, y[i]);
}

double squared_norm(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return s;
}

Jet squared_norm_jet(std::span<const double> y, int order) {
  Jet s = Jet::constant(static_cast<int>(y.size()), order, 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    Jet x = variable(y, order, static_cast<int>(i));
    s += x * x;
  }
  return s;
}

class ConstantNode final : public FieldNode {
 public:
  explicit ConstantNode(double c) : c_(c) {}
  double value(std::span<const double>) const override { return c_; }
  Jet jet(std::span<const double> y, int order) const override {
    return Jet::constant(static_cast<int>(y.size()), order, c_);
  }

 private:
  double c_;
};

class CoordinateNode final : public FieldNode {
 public:
  explicit CoordinateNode(int i) : i_(i) {}
  double value(std::span<const double> y) const override { return y[i_]; }
  Jet jet(std::span<const double> y, int order) const override { return variable(y, order, i_); }

 private:
  int i_;
};

class QuadraticNode final : public FieldNode {
 public:
  double value(std::span<const double> y) const override { return squared_norm(y); }
  Jet jet(std::span<const double> y, int order) const override { return squared_norm_jet(y, order); }
};

class CosineNode final : public FieldNode {
 public:
  explicit CosineNode(std::vector<double> k) : k_(std::move(k)) {}
  double value(std::span<const double> y) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < k_.size(); ++i) s += k_[i] * y[i];
    return std::cos(s);
  }
  Jet jet(std::span<const double> y, int order) const override {
    Jet s = Jet::constant(static_cast<int>(y.size()), order, 0.0);
    for (std::size_t i = 0; i < k_.size(); ++i) s += k_[i] * variable(y, order, static_cast<int>(i));
    return cos(s);
  }

 private:
  std::vector<double> k_;
};

class BumpNode final : public FieldNode {
 public:
  BumpNode(double a, std::vector<double> c) : a_(a), c_(std::move(c)) {}
  double value(std::span<const double> y) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i) s += (y[i] - c_[i]) * (y[i] - c_[i]);
    return std::exp(-a_ * s);
  }
  Jet jet(std::span<const double> y, int order) const override {
    Jet s = Jet::constant(static_cast<int>(y.size()), order, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) {
      Jet x = variable(y, order, static_cast<int>(i)) + (-c_[i]);
      s += x * x;
    }
    return exp(s * -a_);
  }

 private:
  double a_;
  std::vector<double> c_;
};

class PowerOfRhoNode final : public FieldNode {
 public:
  explicit PowerOfRhoNode(double alpha) : alpha_(alpha) {}
  double value(std::span<const double> y) const override { return std::pow(1.0 + squared_norm(y), 0.5 * alpha_); }
  Jet jet(std::span<const double> y, int order) const override {
    return pow(squared_norm_jet(y, order) + 1.0, 0.5 * alpha_);
  }

 private:
  double alpha_;
};

class SumNode final : public FieldNode {
 public:
  SumNode(DifferentiableField f, DifferentiableField g) : f_(std::move(f)), g_(std::move(g)) {}
  double value(std::span<const double> y) const override { return f_.node()->value(y) + g_.node()->value(y); }
  Jet jet(std::span<const double> y, int order) const override {
    return f_.node()->jet(y, order) + g_.node()->jet(y, order);
  }

 private:
  DifferentiableField f_, g_;
};

class AffineValueNode final : public FieldNode {
 public:
  AffineValueNode(DifferentiableField f, double s, double c) : f_(std::move(f)), s_(s), c_(c) {}
  double value(std::span<const double> y) const override { return s_ * f_.node()->value(y) + c_; }
  Jet jet(std::span<const double> y, int order) const override { return f_.node()->jet(y, order) * s_ + c_; }

 private:
  DifferentiableField f_;
  double s_, c_;
};

class ProductNode final : public FieldNode {
 public:
  ProductNode(DifferentiableField f, DifferentiableField g) : f_(std::move(f)), g_(std::move(g)) {}
  double value(std::span<const double> y) const override { return f_.node()->value(y) * g_.node()->value(y); }
  Jet jet(std::span<const double> y, int order) const override {
    return f_.node()->jet(y, order) * g_.node()->jet(y, order);
  }

 private:
  DifferentiableField f_, g_;
};

class UnaryNode final : public FieldNode {
 public:
  enum class Kind { power, exp, log };
  UnaryNode(DifferentiableField f, Kind kind, double beta) : f_(std::move(f)), kind_(kind), beta_(beta) {}
  double value(std::span<const double> y) const override { return apply(f_.node()->value(y)); }
  Jet jet(std::span<const double> y, int order) const override {
    Jet u = f_.node()->jet(y, order);
    check(u.value());
    switch (kind_) {
      case Kind::power:
        return pow(u, beta_);
      case Kind::exp:
        return exp(u);
      case Kind::log:
        return log(u);
    }
    return u;
  }

 private:
  void check(double v) const {
    if (kind_ == Kind::log && !(v > 0.0)) throw DomainError("log of a non-positive field value");
    if (kind_ == Kind::power && integer_power() < 0 && !(v > 0.0))
      throw DomainError("non-integer or negative power of a non-positive field value");
  }
  int integer_power() const {
    return (beta_ >= 0.0 && beta_ == std::floor(beta_) && beta_ <= 64.0) ? static_cast<int>(beta_) : -1;
  }
  double apply(double v) const {
    check(v);
    switch (kind_) {
      case Kind::power:
        return std::pow(v, beta_);
      case Kind::exp:
        return std::exp(v);
      case Kind::log:
        return std::log(v);
    }
    return v;
  }

  DifferentiableField f_;
  Kind kind_;
  double beta_;
};

class AffinePrecomposeNode final : public FieldNode {
 public:
  AffinePrecomposeNode(DifferentiableField f, double t, std::vector<double> x)
      : f_(std::move(f)), t_(t), x_(std::move(x)) {}
  double value(std::span<const double> y) const override {
    double z[kMaxJetDim];
    map(y, z);
    return f_.node()->value(std::span<const double>(z, y.size()));
  }
  Jet jet(std::span<const double> y, int order) const override {
    double z[kMaxJetDim];
    map(y, z);
    Jet j = f_.node()->jet(std::span<const double>(z, y.size()), order);
    const JetLayout& L = j.layout();
    for (int k = 0; k < L.size(); ++k) j.coeff(k) *= std::pow(t_, L.degree[k]);
    return j;
  }

 private:
  void map(std::span<const double> y, double* z) const {
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = t_ * y[i] + x_[i];
  }
  DifferentiableField f_;
  double t_;
  std::vector<double> x_;
};

class CallableNode final : public FieldNode {
 public:
  CallableNode(std::function<double(std::span<const double>)> fn, FieldDomain domain)
      : fn_(std::move(fn)), domain_(domain) {}
  double value(std::span<const double> y) const override { return fn_(y); }
  Jet jet(std::span<const double> y, int order) const override {
    const int dim = static_cast<int>(y.size());
    Jet j(dim, order);
    const JetLayout& L = j.layout();
    j.coeff(0) = fn_(y);
    DomainPredicate inside;
    if (domain_ == FieldDomain::half_space) inside = [dim](std::span<const double> p) { return p[dim - 1] > 0.0; };
    for (int k = 1; k < L.size(); ++k) {
      std::vector<int> a(dim);
      for (int i = 0; i < dim; ++i) a[i] = L.exponents[k][i];
      j.coeff(k) = fd_derivative(fn_, y, a, 0.0, inside) / L.factorial[k];
    }
    return j;
  }

 private:
  std::function<double(std::span<const double>)> fn_;
  FieldDomain domain_;
};

void require_same_dim(const DifferentiableField& f, const DifferentiableField& g) {
  if (f.dim() != g.dim()) throw ParamError("fields " + f.id() + " and " + g.id() + " differ in dimension");
}

FieldDomain combine(const DifferentiableField& f, const DifferentiableField& g) {
  return (f.domain() == FieldDomain::half_space || g.domain() == FieldDomain::half_space) ? FieldDomain::half_space
                                                                                          : f.domain();
}

}  // namespace

DifferentiableField constant_field(int dim, double c) {
  return {std::make_shared<ConstantNode>(c), dim, fmt(c), true, c > 0.0};
}

DifferentiableField coordinate(int dim, int i) {
  if (i < 0 || i >= dim) throw ParamError("coordinate index out of range");
  return {std::make_shared<CoordinateNode>(i), dim, "y" + std::to_string(i + 1), true, false};
}

DifferentiableField quadratic(int dim) { return {std::make_shared<QuadraticNode>(), dim, "|y|^2", true, false}; }

DifferentiableField cosine(std::vector<double> k) {
  const int dim = static_cast<int>(k.size());
  std::string id = "cos(" + fmt(k) + ".y)";
  return {std::make_shared<CosineNode>(std::move(k)), dim, id, true, false};
}

DifferentiableField gaussian_bump(double a, std::vector<double> c) {
  if (!(a > 0.0)) throw ParamError("gaussian_bump: a must be > 0");
  const int dim = static_cast<int>(c.size());
  std::string id = "exp(-" + fmt(a) + "|y-" + fmt(c) + "|^2)";
  return {std::make_shared<BumpNode>(a, std::move(c)), dim, id, true, true};
}

DifferentiableField positive_bump(double a, std::vector<double> c) {
  DifferentiableField b = gaussian_bump(a, std::move(c));
  DifferentiableField f = add_constant(b, 1.0);
  return {f.node(), f.dim(), "1+" + b.id(), true, true};
}

DifferentiableField make_power_of_rho(double alpha, int d) {
  return {std::make_shared<PowerOfRhoNode>(alpha), d, "rho^" + fmt(alpha), true, true};
}

DifferentiableField sum(const DifferentiableField& f, const DifferentiableField& g) {
  require_same_dim(f, g);
  return {std::make_shared<SumNode>(f, g), f.dim(), "(" + f.id() + "+" + g.id() + ")", f.analytic() && g.analytic(),
          f.positive() && g.positive(), combine(f, g)};
}

DifferentiableField add_constant(const DifferentiableField& f, double c) {
  return {std::make_shared<AffineValueNode>(f, 1.0, c), f.dim(), "(" + f.id() + "+" + fmt(c) + ")", f.analytic(),
          f.positive() && c >= 0.0, f.domain()};
}

DifferentiableField scale(const DifferentiableField& f, double s) {
  return {std::make_shared<AffineValueNode>(f, s, 0.0), f.dim(), fmt(s) + "*" + f.id(), f.analytic(),
          f.positive() && s > 0.0, f.domain()};
}

DifferentiableField product(const DifferentiableField& f, const DifferentiableField& g) {
  require_same_dim(f, g);
  return {std::make_shared<ProductNode>(f, g), f.dim(), f.id() + "*" + g.id(), f.analytic() && g.analytic(),
          f.positive() && g.positive(), combine(f, g)};
}

DifferentiableField power(const DifferentiableField& f, double beta) {
  const bool integer = beta >= 0.0 && beta == std::floor(beta);
  if (!integer && !f.positive())
    throw DomainError("power(" + f.id() + ", " + fmt(beta) + "): field must be flagged strictly positive");
  return {std::make_shared<UnaryNode>(f, UnaryNode::Kind::power, beta), f.dim(), f.id() + "^" + fmt(beta),
          f.analytic(), f.positive(), f.domain()};
}

DifferentiableField quotient(const DifferentiableField& f, const DifferentiableField& g) {
  if (!g.positive()) throw DomainError("quotient: denominator " + g.id() + " must be flagged strictly positive");
  DifferentiableField q = product(f, power(g, -1.0));
  return {q.node(), q.dim(), f.id() + "/" + g.id(), q.analytic(), f.positive(), q.domain()};
}

DifferentiableField exp_field(const DifferentiableField& f) {
  return {std::make_shared<UnaryNode>(f, UnaryNode::Kind::exp, 0.0), f.dim(), "exp(" + f.id() + ")", f.analytic(),
          true, f.domain()};
}

DifferentiableField log_field(const DifferentiableField& f) {
  if (!f.positive()) throw DomainError("log_field: " + f.id() + " must be flagged strictly positive");
  return {std::make_shared<UnaryNode>(f, UnaryNode::Kind::log, 0.0), f.dim(), "log(" + f.id() + ")", f.analytic(),
          false, f.domain()};
}

DifferentiableField affine_precompose(const DifferentiableField& f, double t, std::vector<double> x) {
  if (!(t > 0.0)) throw ParamError("affine_precompose: t must be > 0");
  if (static_cast<int>(x.size()) != f.dim()) throw ParamError("affine_precompose: shift has wrong dimension");
  std::string id = f.id() + "(" + fmt(t) + "y+" + fmt(x) + ")";
  return {std::make_shared<AffinePrecomposeNode>(f, t, std::move(x)), f.dim(), id, f.analytic(), f.positive(),
          f.domain()};
}

DifferentiableField from_callable(int dim, std::function<double(std::span<const double>)> fn, std::string id,
                                  FieldDomain domain, bool positive) {
  return {std::make_shared<CallableNode>(std::move(fn), domain), dim, std::move(id), false, positive, domain};
}

std::vector<DifferentiableField> field_library(int d) {
  std::vector<double> k(d, 0.5), c(d, 0.0), c_off(d, 0.0);
  k[0] = 1.0;
  c_off[0] = 0.4;
  return {
      positive_bump(1.0, c_off),
      cosine(k),
      gaussian_bump(0.5, c),
      make_power_of_rho(-1.0, d),
      product(coordinate(d, 0), gaussian_bump(0.5, c)),
  };
}

}  // namespace beckner
