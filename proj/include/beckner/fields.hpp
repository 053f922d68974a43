#pragma once

// Scalar test fields with analytic derivatives to order 4.
//
// A DifferentiableField is an immutable expression tree.  Every node gives a
// fast value path and a Jet path; library members and combinators are exact,
// while from_callable() falls back to finite differences and is flagged.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "beckner/jet.hpp"

namespace beckner {

enum class FieldDomain { full_space, half_space, positive_values_required };

class FieldNode {
 public:
  virtual ~FieldNode() = default;
  virtual double value(std::span<const double> y) const = 0;
  virtual Jet jet(std::span<const double> y, int order) const = 0;
};

class DifferentiableField {
 public:
  DifferentiableField() = default;
  DifferentiableField(std::shared_ptr<const FieldNode> node, int dim, std::string id, bool analytic, bool positive,
                      FieldDomain domain = FieldDomain::full_space);

  int dim() const { return dim_; }
  FieldDomain domain() const { return domain_; }
  const std::string& id() const { return id_; }
  /// False when derivatives come from the finite-difference fallback.
  bool analytic() const { return analytic_; }
  /// True when the field is known to be strictly positive everywhere.
  bool positive() const { return positive_; }

  double operator()(std::span<const double> y) const;
  double operator()(std::initializer_list<double> y) const;
  /// Taylor expansion at y to the given order (<= 4).
  Jet jet(std::span<const double> y, int order) const;

  std::vector<double> gradient(std::span<const double> y) const;
  /// Row-major dim x dim.
  std::vector<double> hessian(std::span<const double> y) const;
  double laplacian(std::span<const double> y) const;
  double partial(std::span<const double> y, const MultiIndex& a) const;

  /// True if y lies in the domain (t > 0 for half-space fields).
  bool contains(std::span<const double> y) const;

  const std::shared_ptr<const FieldNode>& node() const { return node_; }

 private:
  std::shared_ptr<const FieldNode> node_;
  int dim_ = 0;
  std::string id_;
  bool analytic_ = true;
  bool positive_ = false;
  FieldDomain domain_ = FieldDomain::full_space;
};

// Library members.
DifferentiableField constant_field(int dim, double c);
DifferentiableField coordinate(int dim, int i);
DifferentiableField quadratic(int dim);
/// cos(k . y)
DifferentiableField cosine(std::vector<double> k);
/// exp(-a |y - c|^2)
DifferentiableField gaussian_bump(double a, std::vector<double> c);
/// 1 + exp(-a |y - c|^2)
DifferentiableField positive_bump(double a, std::vector<double> c);
/// (1 + |y|^2)^{alpha/2}
DifferentiableField make_power_of_rho(double alpha, int d);

// Combinators.
DifferentiableField sum(const DifferentiableField& f, const DifferentiableField& g);
DifferentiableField add_constant(const DifferentiableField& f, double c);
DifferentiableField scale(const DifferentiableField& f, double s);
DifferentiableField product(const DifferentiableField& f, const DifferentiableField& g);
/// f^beta.  Non-integer or negative beta needs a field flagged positive.
DifferentiableField power(const DifferentiableField& f, double beta);
DifferentiableField quotient(const DifferentiableField& f, const DifferentiableField& g);
DifferentiableField exp_field(const DifferentiableField& f);
DifferentiableField log_field(const DifferentiableField& f);
/// y -> f(t y + x)
DifferentiableField affine_precompose(const DifferentiableField& f, double t, std::vector<double> x);
/// Field from a plain function; derivatives by finite differences.
DifferentiableField from_callable(int dim, std::function<double(std::span<const double>)> fn, std::string id,
                                  FieldDomain domain = FieldDomain::full_space, bool positive = false);

/// Same-dimension product of library fields used across the test grids.
std::vector<DifferentiableField> field_library(int d);

}  // namespace beckner
