#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "rgflow/tensor.hpp"

namespace rgflow {

/// Multivariate polynomial on V with a finite coefficient table keyed by
/// multi-index. Zero coefficients are never stored.
class Polynomial {
 public:
  using Exponents = std::vector<int>;
  using Terms = std::map<Exponents, double>;

  explicit Polynomial(std::size_t dim);
  Polynomial(std::size_t dim, const Terms& terms);

  static Polynomial constant(std::size_t dim, double value);
  static Polynomial monomial(const Exponents& exponents, double coeff);
  /// constant + linear(x) + 1/2 x^T hessian x
  static Polynomial quadratic(double constant, const Vector& linear, const Matrix& hessian);

  std::size_t dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  /// Total degree; 0 for constants including the zero polynomial.
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  double coeff(const Exponents& exponents) const;

  double operator()(const Vec& x) const;

  /// Homogeneous part of top degree.
  Polynomial leading_form() const;

  /// x -> p(Mx + v)
  Polynomial compose_affine(const Matrix& m, const Vector& v) const;
  Polynomial compose_linear(const Matrix& m) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& a);

  struct QuadraticParts {
    double constant = 0.0;
    Vector linear;
    Matrix hessian;
  };
  /// Constant, gradient at 0 and Hessian, when degree <= 2.
  std::optional<QuadraticParts> quadratic_parts() const;

 private:
  void add_term(const Exponents& e, double c);

  std::size_t dim_;
  Terms terms_;
};

/// Leading form of `p` is strictly negative on 2^n * 100 pseudo-random unit
/// directions (fixed seed) and the degree is even and at least 2.
bool has_negative_leading_form(const Polynomial& p);

}  // namespace rgflow
