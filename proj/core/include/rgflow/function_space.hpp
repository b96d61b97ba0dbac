#pragma once

// The sigma action of Osc(V) on functions, the ActFun action of GL(V),
// convolution, and the Gaussian convolution of exp(I).

#include <cstddef>

#include "rgflow/field_function.hpp"
#include "rgflow/osc_group.hpp"
#include "rgflow/quadrature.hpp"

namespace rgflow {

/// x -> exp(k(x) + c) f(Mx + v). A right action: sigma(sigma(f, g), h) = sigma(f, g h).
FieldFunction sigma_act(const FieldFunction& f, const OscElement& g);

/// x -> f(Mx)
FieldFunction compose_linear(const FieldFunction& f, const GlElement& m);

/// x -> det(M) f(Mx). Throws NonPositiveDeterminant unless det(M) > 0.
FieldFunction act_fun(const GlElement& m, const FieldFunction& f);

/// f(y) = exp(log_scale) N(mean, covariance)(y), when f is a Gaussian or an
/// exp-quadratic with negative-definite Hessian.
struct GaussianForm {
  double log_scale = 0.0;
  Vec mean;
  Sym2Tensor covariance;
};
std::optional<GaussianForm> gaussian_form(const FieldFunction& f);

/// Quadrature estimate of (f * g)(x) = integral f(y) g(x - y) dy.
///
/// The integrable factor supplies the weight. Gaussian and exp-quadratic
/// factors are integrated against their own Gaussian, recentred; any other
/// integrable factor is importance-weighted against `rule`'s covariance.
/// Throws NotIntegrable if neither factor is integrable and
/// QuadratureOverflow if an integrand value exceeds exp(700).
double convolve_numeric(const FieldFunction& f, const FieldFunction& g, const QuadratureRule& rule,
                        const Vec& x);

/// convolve_numeric as a function of x.
FieldFunction convolve(const FieldFunction& f, const FieldFunction& g, const QuadratureRule& rule);

enum class EvalPath {
  /// Closed form for interactions of degree <= 2, quadrature otherwise.
  automatic,
  /// Always Gauss-Hermite.
  quadrature,
};

struct ConvolutionOptions {
  /// Points per axis; 0 selects default_order(dim).
  int order = 0;
  EvalPath path = EvalPath::automatic;
};

/// Throws NotIntegrable unless N(P) * exp(I) exists: degree <= 1, a quadratic
/// with P^-1 - Hess(I) positive definite, or an exp-admissible function.
void require_exp_integrable(const Sym2Tensor& p, const FieldFunction& i);

/// x -> (N(P) * exp(I))(x) = E[exp(I(x - Y))], Y ~ N(0, P).
///
/// P must be positive definite. The result carries a log form; quadrature
/// results reduce in the log domain and are memoized per input point.
FieldFunction gauss_convolve_exp(const Sym2Tensor& p, const FieldFunction& i, ConvolutionOptions options = {});

/// Pointwise natural log. Evaluation throws NonPositiveValue where f <= 0.
FieldFunction log_fn(const FieldFunction& f);

}  // namespace rgflow
