#pragma once

// Dense linear algebra on field space V = R^n.
//
// Conventions: vectors in V (field configurations, shifts) are Vec, dual
// vectors in V* (sources, momenta) are DualVec. Symmetric 2-tensors are
// stored as symmetric n x n matrices and a linear map M acts on them by
// C -> M C M^T (row-major orientation). A dual vector acts on the left of a
// matrix: (kM)_j = sum_i k_i M_ij.

#include <cstddef>
#include <initializer_list>

#include <Eigen/Core>

#include "rgflow/errors.hpp"

namespace rgflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest field-space dimension accepted by tensor-core.
inline constexpr std::size_t kMaxTensorDim = 8;
/// Largest dimension for anything that integrates over V.
inline constexpr std::size_t kMaxQuadratureDim = 4;

namespace detail {

template <class Derived>
class VecBase {
 public:
  VecBase() = default;
  explicit VecBase(Vector entries);
  VecBase(std::initializer_list<double> entries);

  static Derived zero(std::size_t n) { return Derived(Vector::Zero(static_cast<Eigen::Index>(n))); }

  std::size_t size() const { return static_cast<std::size_t>(entries_.size()); }
  const Vector& values() const { return entries_; }
  double operator[](std::size_t i) const { return entries_[static_cast<Eigen::Index>(i)]; }

  friend Derived operator+(const Derived& a, const Derived& b) { return Derived(a.checked(b) + b.entries_); }
  friend Derived operator-(const Derived& a, const Derived& b) { return Derived(a.checked(b) - b.entries_); }
  friend Derived operator-(const Derived& a) { return Derived(-a.entries_); }
  friend Derived operator*(double s, const Derived& a) { return Derived(s * a.entries_); }

 protected:
  const Vector& checked(const Derived& other) const;

  Vector entries_;
};

template <class Derived>
VecBase<Derived>::VecBase(Vector entries) : entries_(std::move(entries)) {
  if (entries_.size() == 0) throw InvalidArgument("vector dimension must be at least 1");
  if (!entries_.allFinite()) throw InvalidArgument("vector entries must be finite");
}

template <class Derived>
VecBase<Derived>::VecBase(std::initializer_list<double> entries)
    : VecBase(Eigen::Map<const Vector>(entries.begin(), static_cast<Eigen::Index>(entries.size()))) {}

template <class Derived>
const Vector& VecBase<Derived>::checked(const Derived& other) const {
  if (other.entries_.size() != entries_.size()) throw DimensionMismatch("vector dimensions differ");
  return entries_;
}

}  // namespace detail

/// Element of V.
class Vec : public detail::VecBase<Vec> {
 public:
  using VecBase::VecBase;
};

/// Element of V*.
class DualVec : public detail::VecBase<DualVec> {
 public:
  using VecBase::VecBase;

  /// Pairing k(v).
  double operator()(const Vec& v) const;
};

/// Symmetric 2-tensor on V. Symmetry is exact after construction.
class Sym2Tensor {
 public:
  /// Symmetrizes `matrix`; rejects asymmetry above 1e-10 * max|entry|.
  explicit Sym2Tensor(const Matrix& matrix);
  Sym2Tensor(std::initializer_list<std::initializer_list<double>> rows);

  static Sym2Tensor zero(std::size_t n);
  static Sym2Tensor identity(std::size_t n);
  static Sym2Tensor diagonal(const Vector& diag);

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const Matrix& matrix() const { return matrix_; }
  double operator()(std::size_t i, std::size_t j) const {
    return matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  bool is_zero() const { return (matrix_.array() == 0.0).all(); }
  /// max |entry|
  double max_abs() const;

  friend Sym2Tensor operator+(const Sym2Tensor& a, const Sym2Tensor& b);
  friend Sym2Tensor operator-(const Sym2Tensor& a, const Sym2Tensor& b);
  friend Sym2Tensor operator-(const Sym2Tensor& a);
  friend Sym2Tensor operator*(double s, const Sym2Tensor& a);

 private:
  struct Trusted {};
  Sym2Tensor(Matrix matrix, Trusted) : matrix_(std::move(matrix)) {}

  Matrix matrix_;
};

/// Invertible linear map of V. The inverse is computed once, at construction.
class GlElement {
 public:
  /// Rejects matrices whose smallest singular value is below 1e-12 * largest.
  explicit GlElement(const Matrix& matrix);
  GlElement(std::initializer_list<std::initializer_list<double>> rows);

  static GlElement identity(std::size_t n);
  static GlElement scalar(std::size_t n, double s);
  static GlElement diagonal(const Vector& diag);

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const Matrix& matrix() const { return matrix_; }
  const Matrix& inverse_matrix() const { return inverse_; }
  double det() const { return det_; }

  GlElement inverse() const;

  friend GlElement operator*(const GlElement& a, const GlElement& b);
  /// Mv
  friend Vec operator*(const GlElement& m, const Vec& v);
  /// kM, the dual vector x -> k(Mx)
  friend DualVec operator*(const DualVec& k, const GlElement& m);

 private:
  GlElement(Matrix matrix, Matrix inverse, double det)
      : matrix_(std::move(matrix)), inverse_(std::move(inverse)), det_(det) {}

  Matrix matrix_;
  Matrix inverse_;
  double det_ = 1.0;
};

/// Ck. Equal to contract_left(k, C) bit for bit because C is exactly symmetric.
Vec contract(const Sym2Tensor& c, const DualVec& k);
/// kC, contraction on the first slot.
Vec contract_left(const DualVec& k, const Sym2Tensor& c);
/// kCk
double quad_form(const DualVec& k, const Sym2Tensor& c);

/// C^{-1} as a form on V. Throws SingularTensor when
/// min |eigenvalue| < 1e-12 * max |eigenvalue|.
Sym2Tensor invert_form(const Sym2Tensor& c);

/// (M (x) M) C = M C M^T.
Sym2Tensor act_sym(const GlElement& m, const Sym2Tensor& c);

double min_eigenvalue(const Sym2Tensor& c);
double max_abs_eigenvalue(const Sym2Tensor& c);

/// min eigenvalue > tolerance; the default tolerance is 1e-12 * ||C||_2.
bool is_positive_definite(const Sym2Tensor& c);
bool is_positive_definite(const Sym2Tensor& c, double tolerance);

/// min eigenvalue >= -tolerance.
bool is_positive_semidefinite(const Sym2Tensor& c, double tolerance = 1e-10);

/// Lower-triangular L with L L^T = C. Throws NotPositiveDefinite.
Matrix cholesky(const Sym2Tensor& c);

void require_same_dim(std::size_t a, std::size_t b, const char* what);

}  // namespace rgflow
