#pragma once

// Centered normalized Gaussians N[C] and their algebra: the convolution
// semigroup N(A) * N(B) = N(A + B), the GL(V) action, and the fixed-point
// characterization under the annihilation sections An(C).

#include <cstdint>
#include <functional>

#include "rgflow/osc_group.hpp"
#include "rgflow/tensor.hpp"

namespace rgflow {

class GaussianMeasure {
 public:
  /// Throws NotPositiveDefinite unless `covariance` is positive definite.
  explicit GaussianMeasure(Sym2Tensor covariance);

  std::size_t dim() const { return covariance_.dim(); }
  const Sym2Tensor& covariance() const { return covariance_; }
  const Sym2Tensor& precision() const { return precision_; }
  const Matrix& cholesky_factor() const { return factor_; }
  /// -1/2 (n log 2 pi + log det C)
  double log_normalizer() const { return log_normalizer_; }

  double log_eval(const Vec& x) const;
  double operator()(const Vec& x) const;

 private:
  Sym2Tensor covariance_;
  Sym2Tensor precision_;
  Matrix factor_;
  double log_normalizer_;
};

double gaussian_eval(const GaussianMeasure& g, const Vec& x);

/// Exact convolution: covariances add.
GaussianMeasure gaussian_convolve(const GaussianMeasure& g1, const GaussianMeasure& g2);

/// det(M) N(C) o M = N(ActSym(M^-1, C)). Throws NonPositiveDeterminant if det(M) <= 0.
GaussianMeasure act_fun_gaussian(const GlElement& m, const GaussianMeasure& g);

/// log of sigma(N, g)(x) = k(x) + c + log N(Mx + v).
double log_sigma_gaussian(const GaussianMeasure& f, const OscElement& g, const Vec& x);

struct GaussCharReport {
  bool fixed_point = false;   ///< sigma(f, An(C)(k)) = f at every sample
  bool normalized = false;    ///< f * 1 = 1
  double max_fixed_point_error = 0.0;  ///< max relative deviation
  double normalization_error = 0.0;
  bool passed() const { return fixed_point && normalized; }
};

/// Evaluates both conditions of the Gaussian characterization for an
/// arbitrary positive function given in log form. k and x are drawn from
/// standard normals with the given seed; f * 1 is integrated by Gauss-Hermite
/// quadrature against N(C) with importance ratio f / N(C).
GaussCharReport gauss_char_report(const std::function<double(const Vec&)>& log_f, const Sym2Tensor& c,
                                  int trials, std::uint64_t seed, int order = 0);

/// True iff sigma(g, An(C)(k)) = g to 1e-10 (relative) at `trials` random
/// (k, x) and g * 1 = 1 to 1e-8.
bool check_gauss_char(const GaussianMeasure& g, const Sym2Tensor& c, int trials, std::uint64_t seed = 0);

}  // namespace rgflow
