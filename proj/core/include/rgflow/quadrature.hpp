#pragma once

// Tensor-product Gauss-Hermite quadrature against a Gaussian weight.

#include <cstddef>
#include <vector>

#include "rgflow/tensor.hpp"

namespace rgflow {

/// One-dimensional rule for E[f(Z)], Z ~ N(0, 1): nodes ascending, weights
/// positive and summing to one.
struct HermiteRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Jacobi-matrix eigenvalues polished by Newton on the Hermite recurrence,
/// cached per order. Thread-safe.
const HermiteRule1D& gauss_hermite(int order);

/// Default order per dimension: 40, 20, 12, 8 for n = 1..4.
int default_order(std::size_t dim);

/// Tensor-product rule for E[f(Y)], Y ~ N(mean, covariance).
///
/// Nodes are mean + L z where L = cholesky(covariance) and z runs over the
/// product grid in lexicographic order (last index fastest). Every reduction
/// uses that order, so sums are reproducible.
class QuadratureRule {
 public:
  /// Standard normal weight in dimension `dim`.
  QuadratureRule(std::size_t dim, int order);
  QuadratureRule(const Sym2Tensor& covariance, int order);
  QuadratureRule(const Sym2Tensor& covariance, const Vec& mean, int order);

  std::size_t dim() const { return covariance_.dim(); }
  int order() const { return order_; }
  std::size_t size() const { return weights_.size(); }
  const Sym2Tensor& weight_covariance() const { return covariance_; }
  const Vec& mean() const { return mean_; }
  const Matrix& cholesky_factor() const { return factor_; }

  const Vec& node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<Vec>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Same order, different Gaussian weight.
  QuadratureRule recentered(const Sym2Tensor& covariance, const Vec& mean) const;

  template <class F>
  double expectation(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(nodes_[i]);
    return sum;
  }

 private:
  void build();

  Sym2Tensor covariance_;
  Vec mean_;
  int order_;
  Matrix factor_;
  std::vector<Vec> nodes_;
  std::vector<double> weights_;
};

/// log sum_i w_i exp(a_i), evaluated stably. `log_terms` and `weights` align.
double log_weighted_sum_exp(const std::vector<double>& log_terms, const std::vector<double>& weights);

}  // namespace rgflow
