#include "rgflow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace rgflow {

namespace {

constexpr int kMaxOrder = 256;

// Starting points from the symmetric tridiagonal Jacobi matrix, then Newton
// polish on the orthonormal Hermite recurrence for the weight exp(-x^2).
HermiteRule1D compute_rule(int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  const int m = (n + 1) / 2;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(0.5 * k);
  Eigen::VectorXd guesses = diag;
  if (n > 1) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    guesses = solver.eigenvalues();
  }
  for (int i = 0; i < m; ++i) {
    double z = guesses(n - 1 - i);
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    x[static_cast<std::size_t>(n - 1 - i)] = -z;
    w[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
    w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;

  // Convert to the standard normal weight and sort ascending.
  HermiteRule1D rule;
  rule.nodes.resize(x.size());
  rule.weights.resize(w.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t dst = x.size() - 1 - i;
    rule.nodes[dst] = std::numbers::sqrt2 * x[i];
    rule.weights[dst] = w[i] / std::sqrt(std::numbers::pi);
  }
  return rule;
}

}  // namespace

const HermiteRule1D& gauss_hermite(int order) {
  if (order < 1 || order > kMaxOrder)
    throw InvalidArgument("Gauss-Hermite order must be in [1, " + std::to_string(kMaxOrder) + "]");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<HermiteRule1D>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<HermiteRule1D>(compute_rule(order));
  return *slot;
}

int default_order(std::size_t dim) {
  switch (dim) {
    case 1: return 40;
    case 2: return 20;
    case 3: return 12;
    case 4: return 8;
    default: throw InvalidArgument("quadrature dimension must be in [1, 4]");
  }
}

QuadratureRule::QuadratureRule(std::size_t dim, int order)
    : QuadratureRule(Sym2Tensor::identity(dim), Vec::zero(dim), order) {}

QuadratureRule::QuadratureRule(const Sym2Tensor& covariance, int order)
    : QuadratureRule(covariance, Vec::zero(covariance.dim()), order) {}

QuadratureRule::QuadratureRule(const Sym2Tensor& covariance, const Vec& mean, int order)
    : covariance_(covariance), mean_(mean), order_(order) {
  require_same_dim(covariance.dim(), mean.size(), "quadrature mean");
  if (covariance.dim() > kMaxQuadratureDim)
    throw InvalidArgument("quadrature dimension exceeds " + std::to_string(kMaxQuadratureDim));
  factor_ = cholesky(covariance_);
  build();
}

QuadratureRule QuadratureRule::recentered(const Sym2Tensor& covariance, const Vec& mean) const {
  return QuadratureRule(covariance, mean, order_);
}

void QuadratureRule::build() {
  const HermiteRule1D& base = gauss_hermite(order_);
  const std::size_t n = dim();
  const std::size_t q = base.nodes.size();
  std::size_t total = 1;
  for (std::size_t d = 0; d < n; ++d) total *= q;

  nodes_.clear();
  weights_.clear();
  nodes_.reserve(total);
  weights_.reserve(total);

  std::vector<std::size_t> index(n, 0);
  Vector z(static_cast<Eigen::Index>(n));
  for (std::size_t count = 0; count < total; ++count) {
    double w = 1.0;
    for (std::size_t d = 0; d < n; ++d) {
      z[static_cast<Eigen::Index>(d)] = base.nodes[index[d]];
      w *= base.weights[index[d]];
    }
    nodes_.emplace_back(Vector(mean_.values() + factor_ * z));
    weights_.push_back(w);
    for (std::size_t d = n; d-- > 0;) {
      if (++index[d] < q) break;
      index[d] = 0;
    }
  }
}

double log_weighted_sum_exp(const std::vector<double>& log_terms, const std::vector<double>& weights) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double a : log_terms) peak = std::max(peak, a);
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (std::size_t i = 0; i < log_terms.size(); ++i) sum += weights[i] * std::exp(log_terms[i] - peak);
  return peak + std::log(sum);
}

}  // namespace rgflow
