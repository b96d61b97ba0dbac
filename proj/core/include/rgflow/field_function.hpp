#pragma once

// Evaluable real functions on V with enough structure to dispatch closed
// forms: polynomials, exponentials of polynomials, normalized Gaussians, and
// opaque composites (quadrature-backed results and the like).

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>

#include "rgflow/gaussian.hpp"
#include "rgflow/polynomial.hpp"
#include "rgflow/tensor.hpp"

namespace rgflow {

enum class FunctionKind { polynomial, exp_polynomial, gaussian, composite };

const char* to_string(FunctionKind kind);

/// Structural facts about a composite that cannot be read off its evaluator.
struct FunctionTraits {
  /// f is in L^1 with Gaussian-dominated decay.
  bool integrable = false;
  /// exp(f) grows slower than any Gaussian, so N(P) * exp(f) exists.
  bool exp_admissible = false;
  /// log(f) is exp-admissible; set on Gaussian convolutions of exp(I).
  bool log_admissible = false;
};

class FieldFunction {
 public:
  using Evaluator = std::function<double(const Vec&)>;

  using Traits = FunctionTraits;

  static FieldFunction polynomial(Polynomial p);
  static FieldFunction constant(std::size_t dim, double value);
  /// x -> exp(p(x)). With `declare_integrable`, p must have even degree and a
  /// negative-definite leading form or NotIntegrable is thrown.
  static FieldFunction exp_polynomial(Polynomial p, bool declare_integrable = false);
  static FieldFunction gaussian(GaussianMeasure g);
  /// `log_value`, when given, must equal log(value(x)) wherever value(x) > 0
  /// and is used to keep downstream arithmetic in the log domain.
  static FieldFunction composite(std::size_t dim, Evaluator value, Evaluator log_value = {}, Traits traits = {});

  FunctionKind kind() const;
  std::size_t dim() const;
  Traits traits() const;
  bool integrable() const { return traits().integrable; }
  bool exp_admissible() const { return traits().exp_admissible; }
  bool log_admissible() const { return traits().log_admissible; }

  double operator()(const Vec& x) const;
  bool has_log_form() const;
  /// log f(x). Throws NonPositiveValue when f(x) <= 0.
  double log_value(const Vec& x) const;

  /// The polynomial for `polynomial`, the exponent for `exp_polynomial`.
  const Polynomial* as_polynomial() const;
  const GaussianMeasure* as_gaussian() const;

 private:
  struct Impl;
  explicit FieldFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

/// Wraps an evaluator with a thread-safe cache keyed by the exact bit pattern
/// of the input point. Observable behavior is that of the wrapped evaluator.
FieldFunction::Evaluator memoize(FieldFunction::Evaluator f);

}  // namespace rgflow
