#include "rgflow/polynomial.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace rgflow {

Polynomial::Polynomial(std::size_t dim) : dim_(dim) {
  if (dim_ == 0 || dim_ > kMaxTensorDim) throw InvalidArgument("polynomial dimension out of range");
}

Polynomial::Polynomial(std::size_t dim, const Terms& terms) : Polynomial(dim) {
  for (const auto& [e, c] : terms) add_term(e, c);
}

void Polynomial::add_term(const Exponents& e, double c) {
  if (e.size() != dim_)
    throw DimensionMismatch("polynomial term has " + std::to_string(e.size()) + " exponents, expected " +
                            std::to_string(dim_));
  for (int p : e)
    if (p < 0) throw InvalidArgument("polynomial exponents must be non-negative");
  if (!std::isfinite(c)) throw InvalidArgument("polynomial coefficients must be finite");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial Polynomial::constant(std::size_t dim, double value) {
  Polynomial p(dim);
  p.add_term(Exponents(dim, 0), value);
  return p;
}

Polynomial Polynomial::monomial(const Exponents& exponents, double coeff) {
  Polynomial p(exponents.size());
  p.add_term(exponents, coeff);
  return p;
}

Polynomial Polynomial::quadratic(double constant, const Vector& linear, const Matrix& hessian) {
  const auto n = static_cast<std::size_t>(linear.size());
  if (hessian.rows() != linear.size() || hessian.cols() != linear.size())
    throw DimensionMismatch("quadratic polynomial: Hessian shape");
  Polynomial p = Polynomial::constant(n, constant);
  for (std::size_t i = 0; i < n; ++i) {
    Exponents e(n, 0);
    e[i] = 1;
    p.add_term(e, linear[static_cast<Eigen::Index>(i)]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Exponents e(n, 0);
      ++e[i];
      ++e[j];
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      const double c = i == j ? 0.5 * hessian(ii, ii) : 0.5 * (hessian(ii, jj) + hessian(jj, ii));
      p.add_term(e, c);
    }
  }
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

double Polynomial::coeff(const Exponents& exponents) const {
  auto it = terms_.find(exponents);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::operator()(const Vec& x) const {
  require_same_dim(dim_, x.size(), "polynomial evaluation");
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = c;
    for (std::size_t i = 0; i < dim_; ++i)
      for (int p = 0; p < e[i]; ++p) term *= x[i];
    sum += term;
  }
  return sum;
}

Polynomial Polynomial::leading_form() const {
  const int d = degree();
  Polynomial out(dim_);
  for (const auto& [e, c] : terms_)
    if (std::accumulate(e.begin(), e.end(), 0) == d) out.add_term(e, c);
  return out;
}

Polynomial Polynomial::compose_affine(const Matrix& m, const Vector& v) const {
  const auto n = static_cast<Eigen::Index>(dim_);
  if (m.rows() != n || m.cols() != n || v.size() != n) throw DimensionMismatch("compose_affine: shapes");
  // y_i = sum_j m_ij x_j + v_i as linear polynomials.
  std::vector<Polynomial> y;
  y.reserve(dim_);
  for (Eigen::Index i = 0; i < n; ++i) {
    Polynomial yi = Polynomial::constant(dim_, v[i]);
    for (Eigen::Index j = 0; j < n; ++j) {
      Exponents e(dim_, 0);
      e[static_cast<std::size_t>(j)] = 1;
      yi.add_term(e, m(i, j));
    }
    y.push_back(std::move(yi));
  }
  Polynomial out(dim_);
  for (const auto& [e, c] : terms_) {
    Polynomial term = Polynomial::constant(dim_, c);
    for (std::size_t i = 0; i < dim_; ++i)
      for (int p = 0; p < e[i]; ++p) term = term * y[i];
    out = out + term;
  }
  return out;
}

Polynomial Polynomial::compose_linear(const Matrix& m) const {
  return compose_affine(m, Vector::Zero(static_cast<Eigen::Index>(dim_)));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  require_same_dim(a.dim_, b.dim_, "polynomial sum");
  Polynomial out = a;
  for (const auto& [e, c] : b.terms_) out.add_term(e, c);
  return out;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  require_same_dim(a.dim_, b.dim_, "polynomial product");
  Polynomial out(a.dim_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Polynomial::Exponents e(a.dim_);
      for (std::size_t i = 0; i < a.dim_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Polynomial operator*(double s, const Polynomial& a) {
  Polynomial out(a.dim_);
  for (const auto& [e, c] : a.terms_) out.add_term(e, s * c);
  return out;
}

std::optional<Polynomial::QuadraticParts> Polynomial::quadratic_parts() const {
  if (degree() > 2) return std::nullopt;
  const auto n = static_cast<Eigen::Index>(dim_);
  QuadraticParts parts;
  parts.linear = Vector::Zero(n);
  parts.hessian = Matrix::Zero(n, n);
  for (const auto& [e, c] : terms_) {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < dim_; ++i)
      for (int p = 0; p < e[i]; ++p) idx.push_back(static_cast<Eigen::Index>(i));
    if (idx.empty()) {
      parts.constant = c;
    } else if (idx.size() == 1) {
      parts.linear[idx[0]] = c;
    } else if (idx[0] == idx[1]) {
      parts.hessian(idx[0], idx[0]) = 2.0 * c;
    } else {
      parts.hessian(idx[0], idx[1]) = c;
      parts.hessian(idx[1], idx[0]) = c;
    }
  }
  return parts;
}

bool has_negative_leading_form(const Polynomial& p) {
  const int d = p.degree();
  if (d < 2 || d % 2 != 0) return false;
  const Polynomial lead = p.leading_form();
  const std::size_t n = p.dim();
  const std::size_t samples = (std::size_t{1} << n) * 100;
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal;
  Vector u(static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& x : u) x = normal(rng);
    const double norm = u.norm();
    if (norm == 0.0) continue;
    if (!(lead(Vec(Vector(u / norm))) < 0.0)) return false;
  }
  // Coordinate axes are always sampled.
  for (std::size_t i = 0; i < n; ++i) {
    Vector e = Vector::Zero(static_cast<Eigen::Index>(n));
    e[static_cast<Eigen::Index>(i)] = 1.0;
    if (!(lead(Vec(e)) < 0.0)) return false;
  }
  return true;
}

}  // namespace rgflow
