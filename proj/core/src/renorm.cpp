#include "rgflow/renorm.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

namespace rgflow {

DilationFamily::DilationFamily(Matrix generator) : generator_(std::move(generator)) {
  if (generator_.rows() == 0 || generator_.rows() != generator_.cols())
    throw InvalidArgument("dilation generator must be a non-empty square matrix");
  if (generator_.rows() > static_cast<Eigen::Index>(kMaxTensorDim))
    throw InvalidArgument("dilation generator dimension exceeds the supported maximum");
  if (!generator_.allFinite()) throw InvalidArgument("dilation generator must be finite");
}

DilationFamily DilationFamily::standard(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return DilationFamily(Matrix(-0.5 * Matrix::Identity(k, k)));
}

GlElement DilationFamily::at(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw NonPositiveScale("dilation scale must be positive and finite");
  if (c == 1.0) return GlElement::identity(dim());
  const Matrix t = (std::log(c) * generator_).exp();
  return GlElement(t);
}

PropagatorFamily::PropagatorFamily(Sym2Tensor base, DilationFamily dilation, double fiducial_scale)
    : base_(std::move(base)), dilation_(std::move(dilation)), fiducial_scale_(fiducial_scale) {
  require_same_dim(base_.dim(), dilation_.dim(), "propagator family");
  if (!(fiducial_scale_ > 0.0) || !std::isfinite(fiducial_scale_))
    throw NonPositiveScale("fiducial scale must be positive and finite");
  if (!is_positive_definite(base_)) throw NotPositiveDefinite("base propagator must be positive definite");
  for (double c : kMonotonicityProbes) {
    const double lowest = min_eigenvalue(propagator_gap(*this, c));
    if (lowest < -1e-10)
      throw MonotonicityViolated("propagator family is not monotone: P_L0 - P_cL0 at c = " + std::to_string(c) +
                                 " has eigenvalue " + std::to_string(lowest));
  }
}

Sym2Tensor propagator_at(const PropagatorFamily& fam, double scale) {
  if (!(scale > 0.0)) throw NonPositiveScale("propagator scale must be positive");
  const double c = scale / fam.fiducial_scale();
  if (c == 1.0) return fam.base();
  return act_sym(fam.dilation().at(c), fam.base());
}

Sym2Tensor propagator_gap(const PropagatorFamily& fam, double c) {
  return fam.base() - propagator_at(fam, c * fam.fiducial_scale());
}

Sym2Tensor heat_kernel_base(int spacetime_dim, const std::vector<Vector>& sites, double fiducial_scale,
                            double mass) {
  if (spacetime_dim < 1) throw InvalidArgument("spacetime dimension must be at least 1");
  if (sites.empty() || sites.size() > kMaxTensorDim) throw InvalidArgument("site count out of range");
  if (!(fiducial_scale > 0.0)) throw NonPositiveScale("fiducial scale must be positive");
  if (!(mass >= 0.0) || !std::isfinite(mass)) throw InvalidArgument("mass must be non-negative and finite");
  if (spacetime_dim <= 2 && mass == 0.0)
    throw DivergentIntegral("massless heat-kernel integral diverges for spacetime dimension <= 2");
  for (const Vector& s : sites)
    if (s.size() != spacetime_dim) throw DimensionMismatch("lattice site dimension must equal spacetime dimension");

  const double n = spacetime_dim;
  const double l0 = fiducial_scale;
  const double m2 = mass * mass;
  // l = L0 / u^2 maps [L0, inf) onto (0, 1].
  const double prefactor = 2.0 * std::pow(l0, 1.0 - 0.5 * n) * std::pow(4.0 * std::numbers::pi, -0.5 * n);
  auto entry = [&](double r2) {
    auto integrand = [&](double u) {
      if (u <= 0.0) return 0.0;
      return std::pow(u, n - 3.0) * std::exp(-m2 * l0 / (u * u) - r2 * u * u / (4.0 * l0));
    };
    return prefactor * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 15, 1e-14);
  };

  const auto k = static_cast<Eigen::Index>(sites.size());
  Matrix p(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i; j < k; ++j) {
      const double r2 = (sites[static_cast<std::size_t>(i)] - sites[static_cast<std::size_t>(j)]).squaredNorm();
      p(i, j) = p(j, i) = entry(r2);
    }
  Sym2Tensor out(p);
  if (!is_positive_definite(out)) throw NotPositiveDefinite("assembled heat-kernel propagator is not positive definite");
  return out;
}

Theory::Theory(Sym2Tensor p, FieldFunction i) : propagator(std::move(p)), interaction(std::move(i)) {
  require_same_dim(propagator.dim(), interaction.dim(), "theory");
  if (!propagator.is_zero()) {
    if (!is_positive_definite(propagator))
      throw NotPositiveDefinite("theory propagator must be positive definite or zero");
    require_exp_integrable(propagator, interaction);
  }
}

FieldFunction wtilde(const Sym2Tensor& p, const FieldFunction& i, ConvolutionOptions options) {
  require_same_dim(p.dim(), i.dim(), "wtilde");
  if (p.is_zero()) return i;
  return log_fn(gauss_convolve_exp(p, i, options));
}

FieldFunction wtilde(const Theory& theory, ConvolutionOptions options) {
  return wtilde(theory.propagator, theory.interaction, options);
}

double w_full(const Sym2Tensor& p, const FieldFunction& i, const DualVec& j, ConvolutionOptions options) {
  require_same_dim(p.dim(), j.size(), "w_full");
  return 0.5 * quad_form(j, p) + wtilde(p, i, options)(contract(p, j));
}

FieldFunction coarse_grain(const Sym2Tensor& p1, const Sym2Tensor& p2, const FieldFunction& i,
                           ConvolutionOptions options) {
  require_same_dim(p1.dim(), p2.dim(), "coarse_grain");
  if (!is_positive_semidefinite(p1) || !is_positive_semidefinite(p2))
    throw NotPositiveDefinite("coarse_grain covariances must be positive semi-definite");
  return wtilde(p2, i, options);
}

Rescaled rescale(const GlElement& m, const Sym2Tensor& p, const FieldFunction& i) {
  require_same_dim(m.dim(), p.dim(), "rescale");
  if (!(m.det() > 0.0)) throw NonPositiveDeterminant("rescale requires det(M) > 0");
  return Rescaled{act_sym(m.inverse(), p), compose_linear(i, m)};
}

RenormStep make_renorm_step(const PropagatorFamily& fam, double c) {
  if (!(c >= 1.0) || !std::isfinite(c))
    throw InvalidArgument("renormalization scale c must be finite and >= 1, got " + std::to_string(c));
  UrElement element = ur(fam.base(), fam.dilation().at(c));
  const double lowest = min_eigenvalue(element.p);
  if (lowest < -1e-10)
    throw MonotonicityViolated("P_L0 - P_cL0 at c = " + std::to_string(c) + " has eigenvalue " +
                               std::to_string(lowest));
  return RenormStep(c, std::move(element));
}

FieldFunction cgrl_apply(const GlElement& m, const Sym2Tensor& p, const FieldFunction& i,
                         ConvolutionOptions options) {
  require_same_dim(m.dim(), p.dim(), "cgrl_apply");
  if (!(m.det() > 0.0)) throw NonPositiveDeterminant("cgrl_apply requires det(M) > 0");
  FieldFunction w = wtilde(p, i, options);
  if (m.matrix() == Matrix::Identity(m.matrix().rows(), m.matrix().cols())) return w;
  return compose_linear(w, m);
}

FieldFunction cgrl_apply(const UrElement& g, const FieldFunction& i, ConvolutionOptions options) {
  return cgrl_apply(g.m, g.p, i, options);
}

FieldFunction cgrl_apply_with_jacobian(const GlElement& m, const Sym2Tensor& p, const FieldFunction& i,
                                       ConvolutionOptions options) {
  return act_fun(m, wtilde(p, i, options));
}

FieldFunction renorm_step(const PropagatorFamily& fam, double c, const FieldFunction& i, ConvolutionOptions options) {
  require_same_dim(fam.dim(), i.dim(), "renorm_step");
  const RenormStep step = make_renorm_step(fam, c);
  if (c == 1.0) return i;
  return cgrl_apply(step.element(), i, options);
}

FieldFunction renorm_direct(const PropagatorFamily& fam, double c, const FieldFunction& i,
                            ConvolutionOptions options) {
  require_same_dim(fam.dim(), i.dim(), "renorm_direct");
  if (!(c >= 1.0)) throw InvalidArgument("renormalization scale c must be >= 1");
  if (c == 1.0) return i;
  const GlElement t = fam.dilation().at(c);
  return compose_linear(wtilde(fam.base() - act_sym(t, fam.base()), i, options), t);
}

FieldFunction renorm_pulled_back(const PropagatorFamily& fam, double c, const FieldFunction& i,
                                 ConvolutionOptions options) {
  require_same_dim(fam.dim(), i.dim(), "renorm_pulled_back");
  if (!(c >= 1.0)) throw InvalidArgument("renormalization scale c must be >= 1");
  if (c == 1.0) return i;
  const GlElement t = fam.dilation().at(c);
  return wtilde(act_sym(t.inverse(), fam.base()) - fam.base(), compose_linear(i, t), options);
}

namespace {

void monomials(std::size_t dim, std::vector<int>& current, std::size_t slot, int remaining,
               std::vector<Polynomial::Exponents>& out) {
  if (slot == dim) {
    out.push_back(current);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    current[slot] = e;
    monomials(dim, current, slot + 1, remaining - e, out);
  }
  current[slot] = 0;
}

}  // namespace

Projection project_polynomial(const FieldFunction& f, int degree, const std::vector<Vec>& points) {
  if (degree < 0 || degree > 8) throw InvalidArgument("projection degree must be in [0, 8]");
  if (f.kind() == FunctionKind::polynomial && f.as_polynomial()->degree() <= degree)
    return Projection{*f.as_polynomial(), 0.0};
  if (points.empty()) throw InvalidArgument("projection needs sample points");
  const std::size_t n = f.dim();
  std::vector<Polynomial::Exponents> basis;
  std::vector<int> current(n, 0);
  monomials(n, current, 0, degree, basis);

  const auto rows = static_cast<Eigen::Index>(points.size());
  const auto cols = static_cast<Eigen::Index>(basis.size());
  Matrix design(rows, cols);
  Vector values(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Vec& x = points[static_cast<std::size_t>(r)];
    require_same_dim(n, x.size(), "projection point");
    values[r] = f(x);
    for (Eigen::Index col = 0; col < cols; ++col) {
      double term = 1.0;
      const auto& e = basis[static_cast<std::size_t>(col)];
      for (std::size_t i = 0; i < n; ++i)
        for (int p = 0; p < e[i]; ++p) term *= x[i];
      design(r, col) = term;
    }
  }
  const Vector coeffs = design.completeOrthogonalDecomposition().solve(values);
  Polynomial::Terms terms;
  for (Eigen::Index col = 0; col < cols; ++col) terms[basis[static_cast<std::size_t>(col)]] = coeffs[col];
  const double residual = std::sqrt((design * coeffs - values).squaredNorm() / static_cast<double>(rows));
  return Projection{Polynomial(n, terms), residual};
}

FlowRecord flow_record(const PropagatorFamily& fam, double c, const FieldFunction& i, int degree,
                       const std::vector<Vec>& points, ConvolutionOptions options) {
  const FieldFunction flowed = renorm_step(fam, c, i, options);
  std::vector<FlowSample> samples;
  samples.reserve(points.size());
  for (const Vec& x : points) samples.push_back(FlowSample{x, flowed(x)});
  return FlowRecord{c, project_polynomial(flowed, degree, points), std::move(samples)};
}

}  // namespace rgflow
