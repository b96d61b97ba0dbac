#include "rgflow/tensor.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace rgflow {

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) throw InvalidArgument("matrix must have at least one row");
  const auto cols = static_cast<Eigen::Index>(rows.begin()->size());
  Matrix m(n, cols);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != cols) throw InvalidArgument("ragged matrix rows");
    Eigen::Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

void check_square(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw InvalidArgument(std::string(what) + " must be a non-empty square matrix");
  if (static_cast<std::size_t>(m.rows()) > kMaxTensorDim)
    throw InvalidArgument(std::string(what) + " dimension exceeds " + std::to_string(kMaxTensorDim));
  if (!m.allFinite()) throw InvalidArgument(std::string(what) + " entries must be finite");
}

Vector eigenvalues(const Sym2Tensor& c) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(c.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

}  // namespace

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(a) + " vs " +
                            std::to_string(b));
}

double DualVec::operator()(const Vec& v) const {
  require_same_dim(size(), v.size(), "dual pairing");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < entries_.size(); ++i) sum += entries_[i] * v.values()[i];
  return sum;
}

// ---------------------------------------------------------------------------
// Sym2Tensor

Sym2Tensor::Sym2Tensor(const Matrix& matrix) {
  check_square(matrix, "symmetric tensor");
  const double scale = matrix.cwiseAbs().maxCoeff();
  const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw InvalidArgument("symmetric tensor: asymmetry " + std::to_string(asym) + " exceeds tolerance");
  matrix_ = 0.5 * (matrix + matrix.transpose());
}

Sym2Tensor::Sym2Tensor(std::initializer_list<std::initializer_list<double>> rows)
    : Sym2Tensor(from_rows(rows)) {}

Sym2Tensor Sym2Tensor::zero(std::size_t n) {
  return Sym2Tensor(Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
}

Sym2Tensor Sym2Tensor::identity(std::size_t n) {
  return Sym2Tensor(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
}

Sym2Tensor Sym2Tensor::diagonal(const Vector& diag) { return Sym2Tensor(Matrix(diag.asDiagonal())); }

double Sym2Tensor::max_abs() const { return matrix_.cwiseAbs().maxCoeff(); }

Sym2Tensor operator+(const Sym2Tensor& a, const Sym2Tensor& b) {
  require_same_dim(a.dim(), b.dim(), "tensor sum");
  return Sym2Tensor(a.matrix_ + b.matrix_, Sym2Tensor::Trusted{});
}

Sym2Tensor operator-(const Sym2Tensor& a, const Sym2Tensor& b) {
  require_same_dim(a.dim(), b.dim(), "tensor difference");
  return Sym2Tensor(a.matrix_ - b.matrix_, Sym2Tensor::Trusted{});
}

Sym2Tensor operator-(const Sym2Tensor& a) { return Sym2Tensor(-a.matrix_, Sym2Tensor::Trusted{}); }

Sym2Tensor operator*(double s, const Sym2Tensor& a) {
  if (!std::isfinite(s)) throw InvalidArgument("tensor scale must be finite");
  return Sym2Tensor(s * a.matrix_, Sym2Tensor::Trusted{});
}

// ---------------------------------------------------------------------------
// GlElement

GlElement::GlElement(const Matrix& matrix) : matrix_(matrix) {
  check_square(matrix, "linear map");
  Eigen::JacobiSVD<Matrix> svd(matrix);
  const Vector& sv = svd.singularValues();
  if (!(sv.minCoeff() >= 1e-12 * sv.maxCoeff()) || sv.maxCoeff() == 0.0)
    throw SingularTensor("linear map is not invertible (condition threshold 1e-12)");
  Eigen::PartialPivLU<Matrix> lu(matrix);
  inverse_ = lu.inverse();
  det_ = lu.determinant();
}

GlElement::GlElement(std::initializer_list<std::initializer_list<double>> rows)
    : GlElement(from_rows(rows)) {}

GlElement GlElement::identity(std::size_t n) {
  const auto id = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  return GlElement(Matrix(id), Matrix(id), 1.0);
}

GlElement GlElement::scalar(std::size_t n, double s) {
  return GlElement(Matrix(s * Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))));
}

GlElement GlElement::diagonal(const Vector& diag) { return GlElement(Matrix(diag.asDiagonal())); }

GlElement GlElement::inverse() const { return GlElement(inverse_, matrix_, 1.0 / det_); }

GlElement operator*(const GlElement& a, const GlElement& b) {
  require_same_dim(a.dim(), b.dim(), "GL product");
  return GlElement(Matrix(a.matrix_ * b.matrix_), Matrix(b.inverse_ * a.inverse_), a.det_ * b.det_);
}

Vec operator*(const GlElement& m, const Vec& v) {
  require_same_dim(m.dim(), v.size(), "GL action on V");
  return Vec(Vector(m.matrix_ * v.values()));
}

DualVec operator*(const DualVec& k, const GlElement& m) {
  require_same_dim(m.dim(), k.size(), "GL action on V*");
  return DualVec(Vector(m.matrix_.transpose() * k.values()));
}

// ---------------------------------------------------------------------------
// Contractions

// Both contractions run the same loop over the second index, so for an
// exactly symmetric C they agree bit for bit.
Vec contract(const Sym2Tensor& c, const DualVec& k) {
  require_same_dim(c.dim(), k.size(), "contract");
  const Matrix& m = c.matrix();
  Vector out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += m(i, j) * k.values()[j];
    out[i] = s;
  }
  return Vec(std::move(out));
}

Vec contract_left(const DualVec& k, const Sym2Tensor& c) {
  require_same_dim(c.dim(), k.size(), "contract");
  const Matrix& m = c.matrix();
  Vector out(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += k.values()[i] * m(i, j);
    out[j] = s;
  }
  return Vec(std::move(out));
}

double quad_form(const DualVec& k, const Sym2Tensor& c) { return k(contract(c, k)); }

Sym2Tensor invert_form(const Sym2Tensor& c) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(c.matrix());
  const Vector abs_ev = solver.eigenvalues().cwiseAbs();
  if (!(abs_ev.minCoeff() >= 1e-12 * abs_ev.maxCoeff()) || abs_ev.maxCoeff() == 0.0)
    throw SingularTensor("symmetric tensor is singular (condition threshold 1e-12)");
  const Matrix& q = solver.eigenvectors();
  return Sym2Tensor(Matrix(q * solver.eigenvalues().cwiseInverse().asDiagonal() * q.transpose()));
}

Sym2Tensor act_sym(const GlElement& m, const Sym2Tensor& c) {
  require_same_dim(m.dim(), c.dim(), "act_sym");
  return Sym2Tensor(Matrix(m.matrix() * c.matrix() * m.matrix().transpose()));
}

double min_eigenvalue(const Sym2Tensor& c) { return eigenvalues(c).minCoeff(); }

double max_abs_eigenvalue(const Sym2Tensor& c) { return eigenvalues(c).cwiseAbs().maxCoeff(); }

bool is_positive_definite(const Sym2Tensor& c) {
  const Vector ev = eigenvalues(c);
  return ev.minCoeff() > 1e-12 * ev.cwiseAbs().maxCoeff();
}

bool is_positive_definite(const Sym2Tensor& c, double tolerance) { return min_eigenvalue(c) > tolerance; }

bool is_positive_semidefinite(const Sym2Tensor& c, double tolerance) {
  return min_eigenvalue(c) >= -tolerance;
}

Matrix cholesky(const Sym2Tensor& c) {
  if (!is_positive_definite(c)) throw NotPositiveDefinite("cholesky: tensor is not positive definite");
  Eigen::LLT<Matrix> llt(c.matrix());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("cholesky: factorization failed");
  return llt.matrixL();
}

}  // namespace rgflow
