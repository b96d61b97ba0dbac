#pragma once

// Propagator families, the generating functions W and W-tilde, coarse graining,
// rescaling, and the renormalization transform R_c factored through Ur and Cgrl.

#include <cstddef>
#include <utility>
#include <vector>

#include "rgflow/field_function.hpp"
#include "rgflow/function_space.hpp"
#include "rgflow/osc_group.hpp"
#include "rgflow/polynomial.hpp"
#include "rgflow/tensor.hpp"

namespace rgflow {

/// c -> T_c = exp(ln(c) A).
class DilationFamily {
 public:
  explicit DilationFamily(Matrix generator);
  /// A = -1/2 id, so T_c = c^{-1/2} id.
  static DilationFamily standard(std::size_t n);

  std::size_t dim() const { return static_cast<std::size_t>(generator_.rows()); }
  const Matrix& generator() const { return generator_; }

  /// Throws NonPositiveScale unless c > 0. T_1 is the identity exactly.
  GlElement at(double c) const;

 private:
  Matrix generator_;
};

/// P_{cL0} = ActSym(T_c, P_{L0}). Construction checks positive definiteness
/// of the base and monotonicity at c in {1.25, 2, 4}.
class PropagatorFamily {
 public:
  PropagatorFamily(Sym2Tensor base, DilationFamily dilation, double fiducial_scale = 1.0);

  std::size_t dim() const { return base_.dim(); }
  const Sym2Tensor& base() const { return base_; }
  const DilationFamily& dilation() const { return dilation_; }
  double fiducial_scale() const { return fiducial_scale_; }

 private:
  Sym2Tensor base_;
  DilationFamily dilation_;
  double fiducial_scale_;
};

/// P_L = ActSym(T_{L/L0}, P_{L0}). Throws NonPositiveScale unless L > 0.
Sym2Tensor propagator_at(const PropagatorFamily& fam, double scale);

/// P_{L0} - P_{cL0}
Sym2Tensor propagator_gap(const PropagatorFamily& fam, double c);

/// Scales c at which PropagatorFamily checks monotonicity.
inline constexpr double kMonotonicityProbes[] = {1.25, 2.0, 4.0};

/// Heat-kernel propagator between lattice sites in R^n:
///   P_ij = integral_{L0}^inf (4 pi l)^{-n/2} exp(-m^2 l - |x_i - x_j|^2 / 4l) dl.
/// Throws DivergentIntegral for n <= 2 without mass and NotPositiveDefinite
/// if the assembled matrix is not positive definite.
Sym2Tensor heat_kernel_base(int spacetime_dim, const std::vector<Vector>& sites, double fiducial_scale,
                            double mass = 0.0);

/// Propagator P (positive definite or zero) and interaction I.
struct Theory {
  Theory(Sym2Tensor propagator, FieldFunction interaction);

  Sym2Tensor propagator;
  FieldFunction interaction;
};

/// W-tilde[P, I] = log(N(P) * exp(I)); W-tilde[0, I] = I.
FieldFunction wtilde(const Sym2Tensor& p, const FieldFunction& i, ConvolutionOptions options = {});
FieldFunction wtilde(const Theory& theory, ConvolutionOptions options = {});

/// W[P, I](J) = 1/2 JPJ + W-tilde[P, I](PJ)
double w_full(const Sym2Tensor& p, const FieldFunction& i, const DualVec& j, ConvolutionOptions options = {});

/// I_eff = W-tilde[P2, I], so that W-tilde[P1, I_eff] = W-tilde[P1 + P2, I].
FieldFunction coarse_grain(const Sym2Tensor& p1, const Sym2Tensor& p2, const FieldFunction& i,
                           ConvolutionOptions options = {});

struct Rescaled {
  Sym2Tensor propagator;
  FieldFunction interaction;
};

/// (ActSym(M^-1, P), I o M); W-tilde[P, I] o M = W-tilde of the result.
Rescaled rescale(const GlElement& m, const Sym2Tensor& p, const FieldFunction& i);

/// Cached data of R_c: the Ur element (T_c, P_{L0} - P_{cL0}).
class RenormStep {
 public:
  double c() const { return c_; }
  const GlElement& scale() const { return element_.m; }
  const Sym2Tensor& covariance() const { return element_.p; }
  const UrElement& element() const { return element_; }

 private:
  friend RenormStep make_renorm_step(const PropagatorFamily& fam, double c);
  RenormStep(double c, UrElement element) : c_(c), element_(std::move(element)) {}

  double c_;
  UrElement element_;
};

/// Throws InvalidArgument for c < 1 and MonotonicityViolated if the
/// covariance has an eigenvalue below -1e-10.
RenormStep make_renorm_step(const PropagatorFamily& fam, double c);

/// Cgrl(M, P): I -> W-tilde[P, I] o M. A right action of GL(V) x| Sym2(V):
/// applying (M1, P1) and then (M2, P2) equals applying their product.
FieldFunction cgrl_apply(const GlElement& m, const Sym2Tensor& p, const FieldFunction& i,
                         ConvolutionOptions options = {});
FieldFunction cgrl_apply(const UrElement& g, const FieldFunction& i, ConvolutionOptions options = {});

/// ActFun(M, W-tilde[P, I]) = det(M) W-tilde[P, I] o M.
FieldFunction cgrl_apply_with_jacobian(const GlElement& m, const Sym2Tensor& p, const FieldFunction& i,
                                       ConvolutionOptions options = {});

/// R_c I = Cgrl(Ur(P_{L0})(T_c)) I; R_1 I = I.
FieldFunction renorm_step(const PropagatorFamily& fam, double c, const FieldFunction& i,
                          ConvolutionOptions options = {});

/// R_c I = W-tilde[P_{L0} - ActSym(T_c, P_{L0}), I] o T_c, without the Ur step.
FieldFunction renorm_direct(const PropagatorFamily& fam, double c, const FieldFunction& i,
                            ConvolutionOptions options = {});

/// R_c I = W-tilde[ActSym(T_c^-1, P_{L0}) - P_{L0}, I o T_c].
FieldFunction renorm_pulled_back(const PropagatorFamily& fam, double c, const FieldFunction& i,
                                 ConvolutionOptions options = {});

struct Projection {
  Polynomial polynomial;
  /// Root-mean-square residual over the sample points.
  double residual = 0.0;
};

/// Least-squares fit of f by a polynomial of total degree <= `degree`
/// (at most 8) over `points`. Polynomials of low enough degree are returned
/// exactly with zero residual.
Projection project_polynomial(const FieldFunction& f, int degree, const std::vector<Vec>& points);

struct FlowSample {
  Vec x;
  double value = 0.0;
};

struct FlowRecord {
  double c = 1.0;
  Projection projection;
  std::vector<FlowSample> samples;
};

/// Evaluates R_c I at `points` and projects it to degree `degree`.
FlowRecord flow_record(const PropagatorFamily& fam, double c, const FieldFunction& i, int degree,
                       const std::vector<Vec>& points, ConvolutionOptions options = {});

}  // namespace rgflow
