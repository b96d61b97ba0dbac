#include "rgflow/function_space.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace rgflow {

namespace {

constexpr double kLogOverflow = 700.0;

bool is_zero(const DualVec& k) { return (k.values().array() == 0.0).all(); }

Polynomial affine_part(const DualVec& k, double c) {
  const auto n = static_cast<Eigen::Index>(k.size());
  return Polynomial::quadratic(c, k.values(), Matrix::Zero(n, n));
}

Polynomial gaussian_exponent(const GaussianMeasure& g) {
  const auto n = static_cast<Eigen::Index>(g.dim());
  return Polynomial::quadratic(g.log_normalizer(), Vector::Zero(n), -g.precision().matrix());
}

FieldFunction exp_poly_checked(Polynomial p, bool want_integrable) {
  const bool integrable = want_integrable && has_negative_leading_form(p);
  return FieldFunction::exp_polynomial(std::move(p), integrable);
}

Vec affine(const OscElement& g, const Vec& x) { return g.m() * x + g.v(); }

Vec difference(const Vec& x, const Vec& y) { return Vec(Vector(x.values() - y.values())); }

}  // namespace

FieldFunction sigma_act(const FieldFunction& f, const OscElement& g) {
  require_same_dim(f.dim(), g.dim(), "sigma_act");
  const Matrix& m = g.m().matrix();
  const Vector& v = g.v().values();
  switch (f.kind()) {
    case FunctionKind::polynomial: {
      Polynomial q = f.as_polynomial()->compose_affine(m, v);
      if (is_zero(g.k()) && g.c() == 0.0) return FieldFunction::polynomial(std::move(q));
      return FieldFunction::composite(f.dim(), [g, q = std::move(q)](const Vec& x) {
        return std::exp(g.k()(x) + g.c()) * q(x);
      });
    }
    case FunctionKind::exp_polynomial:
      return exp_poly_checked(f.as_polynomial()->compose_affine(m, v) + affine_part(g.k(), g.c()),
                              f.integrable());
    case FunctionKind::gaussian:
      return exp_poly_checked(gaussian_exponent(*f.as_gaussian()).compose_affine(m, v) + affine_part(g.k(), g.c()),
                              true);
    case FunctionKind::composite:
      break;
  }
  FieldFunction::Evaluator log_value;
  if (f.has_log_form())
    log_value = [f, g](const Vec& x) { return g.k()(x) + g.c() + f.log_value(affine(g, x)); };
  FieldFunction::Traits traits = f.traits();
  traits.exp_admissible = traits.exp_admissible && is_zero(g.k()) && g.c() == 0.0;
  return FieldFunction::composite(
      f.dim(), [f, g](const Vec& x) { return std::exp(g.k()(x) + g.c()) * f(affine(g, x)); }, std::move(log_value),
      traits);
}

FieldFunction compose_linear(const FieldFunction& f, const GlElement& m) {
  return sigma_act(f, OscElement::linear(m));
}

FieldFunction act_fun(const GlElement& m, const FieldFunction& f) {
  require_same_dim(m.dim(), f.dim(), "act_fun");
  if (!(m.det() > 0.0)) throw NonPositiveDeterminant("act_fun requires det(M) > 0");
  const double det = m.det();
  const double log_det = std::log(det);
  switch (f.kind()) {
    case FunctionKind::polynomial:
      return FieldFunction::polynomial(det * f.as_polynomial()->compose_linear(m.matrix()));
    case FunctionKind::exp_polynomial:
      return exp_poly_checked(f.as_polynomial()->compose_linear(m.matrix()) + Polynomial::constant(f.dim(), log_det),
                              f.integrable());
    case FunctionKind::gaussian:
      return FieldFunction::gaussian(act_fun_gaussian(m, *f.as_gaussian()));
    case FunctionKind::composite:
      break;
  }
  FieldFunction::Evaluator log_value;
  if (f.has_log_form()) log_value = [f, m, log_det](const Vec& x) { return log_det + f.log_value(m * x); };
  return FieldFunction::composite(
      f.dim(), [f, m, det](const Vec& x) { return det * f(m * x); }, std::move(log_value), f.traits());
}

std::optional<GaussianForm> gaussian_form(const FieldFunction& f) {
  if (const GaussianMeasure* g = f.as_gaussian())
    return GaussianForm{0.0, Vec::zero(f.dim()), g->covariance()};
  if (f.kind() != FunctionKind::exp_polynomial) return std::nullopt;
  const auto parts = f.as_polynomial()->quadratic_parts();
  if (!parts) return std::nullopt;
  const Sym2Tensor a(Matrix(-parts->hessian));
  if (!is_positive_definite(a)) return std::nullopt;
  const Eigen::LLT<Matrix> llt(a.matrix());
  const Vector mean = llt.solve(parts->linear);
  const double log_det_a = 2.0 * Vector(llt.matrixL().toDenseMatrix().diagonal()).array().log().sum();
  const double n = static_cast<double>(f.dim());
  const double log_scale =
      parts->constant + 0.5 * parts->linear.dot(mean) + 0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * log_det_a;
  return GaussianForm{log_scale, Vec(mean), invert_form(a)};
}

double convolve_numeric(const FieldFunction& f, const FieldFunction& g, const QuadratureRule& rule,
                        const Vec& x) {
  require_same_dim(f.dim(), g.dim(), "convolve");
  require_same_dim(f.dim(), rule.dim(), "convolve");
  require_same_dim(f.dim(), x.size(), "convolve");
  if (!f.integrable() && !g.integrable())
    throw NotIntegrable("convolution needs at least one integrable factor");

  // h supplies the weight, o is evaluated at x - y. Factors with a Gaussian
  // form are preferred as the weight.
  const bool f_first = f.integrable() && (gaussian_form(f) || !g.integrable() || !gaussian_form(g));
  const FieldFunction& h = f_first ? f : g;
  const FieldFunction& o = f_first ? g : f;

  // Importance ratio h(y) / weight(y) per node, as log magnitude and sign.
  std::vector<double> log_ratio(rule.size(), 0.0);
  std::vector<double> sign(rule.size(), 1.0);
  const QuadratureRule* active = &rule;
  std::optional<QuadratureRule> recentred;
  if (const auto form = gaussian_form(h)) {
    recentred.emplace(rule.recentered(form->covariance, form->mean));
    active = &*recentred;
    log_ratio.assign(rule.size(), form->log_scale);
  } else {
    const GaussianMeasure weight(rule.weight_covariance());
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const Vec& y = rule.node(i);
      const double log_w = weight.log_eval(difference(y, rule.mean()));
      if (h.has_log_form()) {
        log_ratio[i] = h.log_value(y) - log_w;
      } else {
        const double hv = h(y);
        sign[i] = hv < 0.0 ? -1.0 : 1.0;
        log_ratio[i] = std::log(std::abs(hv)) - log_w;
      }
    }
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < active->size(); ++i) {
    if (log_ratio[i] == -std::numeric_limits<double>::infinity()) continue;
    const double ov = o(difference(x, active->node(i)));
    if (ov == 0.0) continue;
    const double log_term = log_ratio[i] + std::log(std::abs(ov));
    if (!(log_term <= kLogOverflow)) throw QuadratureOverflow("convolution integrand exceeds exp(700) at a node");
    sum += active->weight(i) * sign[i] * (ov < 0.0 ? -1.0 : 1.0) * std::exp(log_term);
  }
  return sum;
}

FieldFunction convolve(const FieldFunction& f, const FieldFunction& g, const QuadratureRule& rule) {
  require_same_dim(f.dim(), g.dim(), "convolve");
  if (!f.integrable() && !g.integrable())
    throw NotIntegrable("convolution needs at least one integrable factor");
  FieldFunction::Traits traits;
  traits.integrable = f.integrable() && g.integrable();
  return FieldFunction::composite(f.dim(), [f, g, rule](const Vec& x) { return convolve_numeric(f, g, rule, x); },
                                  {}, traits);
}

void require_exp_integrable(const Sym2Tensor& p, const FieldFunction& i) {
  require_same_dim(p.dim(), i.dim(), "exp-integrability");
  if (i.kind() == FunctionKind::polynomial) {
    const Polynomial& poly = *i.as_polynomial();
    if (poly.degree() <= 1) return;
    if (const auto parts = poly.quadratic_parts()) {
      const Sym2Tensor k(Matrix(invert_form(p).matrix() - parts->hessian));
      if (!is_positive_definite(k))
        throw NotIntegrable("N(P) * exp(I) diverges: P^-1 - Hess(I) is not positive definite");
      return;
    }
  }
  if (!i.exp_admissible())
    throw NotIntegrable(std::string("exp(I) is not integrable against a Gaussian for this ") + to_string(i.kind()) +
                        " interaction");
}

namespace {

// log E[exp(g(Y))], Y ~ N(P). A first pass on the rule estimates the mean and
// covariance of the tilted density exp(g) N(P); the same Hermite grid is then
// rerun on that Gaussian, narrowed by kNarrow in standard deviation, with an
// importance ratio.
template <class G>
double adapted_log_expectation(const QuadratureRule& rule, G&& g) {
  constexpr double kNarrow = 0.8;
  const std::size_t size = rule.size();
  const auto n = static_cast<Eigen::Index>(rule.dim());

  std::vector<double> terms(size);
  for (std::size_t j = 0; j < size; ++j) terms[j] = g(rule.node(j));
  const double first = log_weighted_sum_exp(terms, rule.weights());
  if (!std::isfinite(first)) return first;
  const auto [lo, hi] = std::minmax_element(terms.begin(), terms.end());
  if (*lo == *hi) return first;

  Vector mean = Vector::Zero(n);
  std::vector<double> tilt(size);
  for (std::size_t j = 0; j < size; ++j) {
    tilt[j] = rule.weight(j) * std::exp(terms[j] - first);
    mean += tilt[j] * rule.node(j).values();
  }
  Matrix cov = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < size; ++j) {
    const Vector d = rule.node(j).values() - mean;
    cov += tilt[j] * d * d.transpose();
  }
  cov = (0.5 * kNarrow * kNarrow) * (cov + cov.transpose()).eval();
  if (!cov.allFinite()) return first;
  const Sym2Tensor proposal_cov(cov);
  if (!is_positive_definite(proposal_cov) ||
      Eigen::SelfAdjointEigenSolver<Matrix>(cov, Eigen::EigenvaluesOnly).eigenvalues()(0) <= 1e-12 * cov.trace())
    return first;

  const Vec center(mean);
  const QuadratureRule adapted = rule.recentered(proposal_cov, center);
  const GaussianMeasure base(rule.weight_covariance());
  const GaussianMeasure proposal(proposal_cov);
  for (std::size_t j = 0; j < size; ++j) {
    const Vec& y = adapted.node(j);
    terms[j] = g(y) + base.log_eval(difference(y, rule.mean())) - proposal.log_eval(difference(y, center));
  }
  const double second = log_weighted_sum_exp(terms, adapted.weights());
  return std::isfinite(second) ? second : first;
}

FieldFunction exact_quadratic(const Sym2Tensor& p, const Polynomial::QuadraticParts& parts) {
  const auto n = static_cast<Eigen::Index>(p.dim());
  if ((parts.hessian.array() == 0.0).all()) {
    const Vector& b = parts.linear;
    const double constant = parts.constant + 0.5 * b.dot(p.matrix() * b);
    return exp_poly_checked(Polynomial::quadratic(constant, b, Matrix::Zero(n, n)), true);
  }
  const Matrix a = -parts.hessian;
  const Matrix k = invert_form(p).matrix() + a;
  const Eigen::LLT<Matrix> k_llt(k);
  const Eigen::LLT<Matrix> p_llt(p.matrix());
  const double log_det_k = 2.0 * Vector(k_llt.matrixL().toDenseMatrix().diagonal()).array().log().sum();
  const double log_det_p = 2.0 * Vector(p_llt.matrixL().toDenseMatrix().diagonal()).array().log().sum();
  const Matrix k_inv = k_llt.solve(Matrix::Identity(n, n));
  const Vector& b = parts.linear;
  const double constant = parts.constant - 0.5 * (log_det_p + log_det_k) + 0.5 * b.dot(k_inv * b);
  const Vector linear = b - a * (k_inv * b);
  Matrix hessian = -(a - a * k_inv * a);
  hessian = 0.5 * (hessian + hessian.transpose()).eval();
  Polynomial w = Polynomial::quadratic(constant, linear, hessian);
  return exp_poly_checked(std::move(w), true);
}

}  // namespace

FieldFunction gauss_convolve_exp(const Sym2Tensor& p, const FieldFunction& i, ConvolutionOptions options) {
  require_same_dim(p.dim(), i.dim(), "gauss_convolve_exp");
  if (!is_positive_definite(p)) throw NotPositiveDefinite("gauss_convolve_exp requires a positive-definite P");
  require_exp_integrable(p, i);

  if (options.path == EvalPath::automatic && i.kind() == FunctionKind::polynomial) {
    if (const auto parts = i.as_polynomial()->quadratic_parts()) return exact_quadratic(p, *parts);
  }

  const int order = options.order > 0 ? options.order : default_order(p.dim());
  auto rule = std::make_shared<const QuadratureRule>(p, order);
  auto log_eval = memoize([rule, i](const Vec& x) {
    const double lv = adapted_log_expectation(*rule, [&](const Vec& y) { return i(difference(x, y)); });
    if (std::isnan(lv) || lv == -std::numeric_limits<double>::infinity())
      throw NonPositiveConvolution("Gaussian convolution of exp(I) is not positive");
    return lv;
  });
  auto value = [log_eval](const Vec& x) {
    const double lv = log_eval(x);
    if (lv > kLogOverflow) throw QuadratureOverflow("Gaussian convolution of exp(I) exceeds exp(700)");
    return std::exp(lv);
  };
  FieldFunction::Traits traits;
  traits.log_admissible = true;
  return FieldFunction::composite(p.dim(), value, log_eval, traits);
}

FieldFunction log_fn(const FieldFunction& f) {
  switch (f.kind()) {
    case FunctionKind::exp_polynomial:
      return FieldFunction::polynomial(*f.as_polynomial());
    case FunctionKind::gaussian:
      return FieldFunction::polynomial(gaussian_exponent(*f.as_gaussian()));
    case FunctionKind::polynomial: {
      const Polynomial& poly = *f.as_polynomial();
      if (poly.degree() == 0 && !poly.is_zero()) {
        const double c = poly.coeff(Polynomial::Exponents(f.dim(), 0));
        if (c > 0.0) return FieldFunction::constant(f.dim(), std::log(c));
      }
      break;
    }
    case FunctionKind::composite:
      if (f.has_log_form()) {
        FieldFunction::Traits traits;
        traits.exp_admissible = f.log_admissible();
        return FieldFunction::composite(f.dim(), [f](const Vec& x) { return f.log_value(x); }, {}, traits);
      }
      break;
  }
  return FieldFunction::composite(f.dim(), [f](const Vec& x) {
    const double v = f(x);
    if (!(v > 0.0)) throw NonPositiveValue("log of a non-positive function value");
    return std::log(v);
  });
}

}  // namespace rgflow
