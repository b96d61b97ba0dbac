#pragma once

// Random inputs for the verify suites.

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "rgflow/osc_group.hpp"
#include "rgflow/tensor.hpp"

namespace rgflow::cli {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double normal(double sigma = 1.0) { return std::normal_distribution<double>(0.0, sigma)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Vector vector(std::size_t n, double sigma = 1.0) {
    Vector v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = normal(sigma);
    return v;
  }
  Vec vec(std::size_t n, double sigma = 1.0) { return Vec(vector(n, sigma)); }
  DualVec dual(std::size_t n, double sigma = 1.0) { return DualVec(vector(n, sigma)); }

  Matrix matrix(std::size_t n, double sigma = 1.0) {
    const auto k = static_cast<Eigen::Index>(n);
    Matrix m(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) m(i, j) = normal(sigma);
    return m;
  }

  Sym2Tensor sym(std::size_t n, double sigma = 1.0) {
    const Matrix m = matrix(n, sigma);
    return Sym2Tensor(Matrix(0.5 * (m + m.transpose())));
  }

  /// Eigenvalues in [lo, hi].
  Sym2Tensor spd(std::size_t n, double lo = 0.5, double hi = 2.0) {
    const Eigen::HouseholderQR<Matrix> qr(matrix(n));
    const Matrix q = qr.householderQ();
    Vector d(static_cast<Eigen::Index>(n));
    for (auto& x : d) x = uniform(lo, hi);
    const Matrix c = q * d.asDiagonal() * q.transpose();
    return Sym2Tensor(Matrix(0.5 * (c + c.transpose())));
  }

  /// Identity plus noise, condition number below 10.
  GlElement gl(std::size_t n, double spread = 0.3) {
    const auto k = static_cast<Eigen::Index>(n);
    for (;;) {
      const Matrix m = Matrix::Identity(k, k) + matrix(n, spread);
      const Eigen::JacobiSVD<Matrix> svd(m);
      const auto& s = svd.singularValues();
      if (s(k - 1) > 0.1 && s(0) / s(k - 1) < 10.0) return GlElement(m);
    }
  }

  GlElement gl_plus(std::size_t n, double spread = 0.3) {
    for (;;) {
      GlElement m = gl(n, spread);
      if (m.det() > 0.0) return m;
    }
  }

  OscElement osc(std::size_t n, double sigma = 1.0) {
    GlElement m = gl(n);
    DualVec k = dual(n, sigma);
    Vec v = vec(n, sigma);
    const double c = normal(sigma);
    return OscElement(std::move(m), std::move(k), std::move(v), c);
  }

 private:
  std::mt19937_64 rng_;
};

/// |a - b| / max(|b|, floor)
inline double rel_err(double a, double b, double floor = 1e-300) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

}  // namespace rgflow::cli
