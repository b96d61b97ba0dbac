#include "rgflow/cli/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rgflow/errors.hpp"
#include "rgflow/field_function.hpp"
#include "rgflow/function_space.hpp"
#include "rgflow/gaussian.hpp"
#include "rgflow/osc_group.hpp"
#include "rgflow/quadrature.hpp"
#include "rgflow/renorm.hpp"
#include "sampling.hpp"

namespace rgflow::cli {

namespace {

constexpr EvalPath kQuadrature = EvalPath::quadrature;

class Check {
 public:
  Check(std::string suite, std::string name, double tolerance)
      : suite_(std::move(suite)), name_(std::move(name)), tolerance_(tolerance) {}

  void observe(double error) {
    if (std::isnan(error)) error = std::numeric_limits<double>::infinity();
    max_ = std::max(max_, error);
  }

  /// Records a failure that produced no number, e.g. a missing exception.
  void fail() { failed_ = true; }

  CheckResult finish() const {
    return CheckResult{suite_, name_, max_, tolerance_, !failed_ && max_ <= tolerance_};
  }

 private:
  std::string suite_;
  std::string name_;
  double tolerance_;
  double max_ = 0.0;
  bool failed_ = false;
};

/// Passes when the smallest observed margin exceeds the threshold.
class Control {
 public:
  Control(std::string suite, std::string name, double threshold)
      : suite_(std::move(suite)), name_(std::move(name)), threshold_(threshold) {}

  void observe(double margin) { min_ = std::min(min_, margin); }

  CheckResult finish() const { return CheckResult{suite_, name_, min_, threshold_, min_ > threshold_, true}; }

 private:
  std::string suite_;
  std::string name_;
  double threshold_;
  double min_ = std::numeric_limits<double>::infinity();
};

double component_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

FieldFunction quadratic_1d(double a) { return FieldFunction::polynomial(Polynomial::monomial({2}, -0.5 * a)); }
FieldFunction quartic_1d(double lambda) { return FieldFunction::polynomial(Polynomial::monomial({4}, -lambda)); }
FieldFunction gaussian_fn(const Sym2Tensor& c) { return FieldFunction::gaussian(GaussianMeasure(c)); }

// exp(c + b.x - 1/2 x A x)
FieldFunction exp_quadratic(double c, double b, double a) {
  return FieldFunction::exp_polynomial(Polynomial(1, {{{0}, c}, {{1}, b}, {{2}, -0.5 * a}}), true);
}

double adaptive(const std::function<double(double)>& f) {
  const double inf = std::numeric_limits<double>::infinity();
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -inf, inf, 15, 1e-14);
}

PropagatorFamily family_1d(double p = 1.0) { return PropagatorFamily(Sym2Tensor{{p}}, DilationFamily::standard(1)); }

// Group suite ---------------------------------------------------------------

void group_suite(std::uint64_t seed, std::vector<CheckResult>& out) {
  const std::string s = "group";
  Sampler rng(seed);
  Check assoc(s, "oscillator product is associative", 1e-12);
  Check ident(s, "identity element", 1e-12);
  Check inv(s, "inverse element", 1e-12);
  Check rep(s, "matrix representation is multiplicative", 1e-12);
  Check hom(s, "An(A + B) = An(A) [+] An(B)", 1e-12);
  Check conj(s, "annihilation section intertwines the GL action", 1e-10);
  Check heis(s, "Heisenberg elements compose within the subgroup", 1e-12);
  for (std::size_t n = 1; n <= 3; ++n) {
    const OscElement e = OscElement::identity(n);
    for (int t = 0; t < 334; ++t) {
      const OscElement g = rng.osc(n);
      const OscElement h = rng.osc(n);
      const OscElement k = rng.osc(n);
      assoc.observe(max_component_diff((g * h) * k, g * (h * k)));
      ident.observe(std::max(max_component_diff(g * e, g), max_component_diff(e * g, g)));
      inv.observe(std::max(max_component_diff(g * osc_inv(g), e), max_component_diff(osc_inv(g) * g, e)));
      rep.observe(component_diff(to_matrix(g * h), to_matrix(g) * to_matrix(h)));
    }
    for (int t = 0; t < 167; ++t) {
      const Sym2Tensor a = rng.sym(n);
      const Sym2Tensor b = rng.sym(n);
      const DualVec k = rng.dual(n);
      hom.observe(max_component_diff(an_apply(a + b, k), section_sum(an_section(a), an_section(b))(k)));

      const GlElement m = rng.gl(n);
      const Sym2Tensor c = rng.sym(n);
      const OscElement lhs = an_apply(act_sym(m, c), k);
      conj.observe(max_component_diff(lhs, act_sec_by_conjugation(m, an_section(c), k)));
      conj.observe(max_component_diff(lhs, act_sec(m, an_section(c))(k)));

      const OscElement x = OscElement::heisenberg(rng.dual(n), rng.vec(n), rng.normal());
      const OscElement y = OscElement::heisenberg(rng.dual(n), rng.vec(n), rng.normal());
      const OscElement xy = x * y;
      if (!xy.in_heisenberg()) heis.fail();
      heis.observe(component_diff(xy.m().matrix(), Matrix::Identity(static_cast<Eigen::Index>(n),
                                                                    static_cast<Eigen::Index>(n))));
    }
  }
  for (const Check& c : {assoc, ident, inv, rep, hom, conj, heis}) out.push_back(c.finish());
}

// Gaussian suite ------------------------------------------------------------

void gaussian_suite(std::uint64_t seed, std::vector<CheckResult>& out) {
  const std::string s = "gaussian";
  Sampler rng(seed + 1);
  Check fixed(s, "N(C) is fixed by the annihilation section An(C)", 1e-10);
  Control control(s, "negative control: N(C') is not fixed by An(C)", 1e-3);
  Check normalized(s, "N(C) * 1 = 1", 1e-8);
  Check action(s, "GL action on Gaussians: det(M) N(C) o M = N(M^-1 C M^-T)", 1e-10);
  Check conv1(s, "N(A) * N(B) = N(A + B), n = 1", 1e-6);
  Check conv2(s, "N(A) * N(B) = N(A + B), n = 2", 1e-4);

  for (std::size_t n = 1; n <= 3; ++n) {
    const QuadratureRule rule(n, default_order(n));
    for (int t = 0; t < 20; ++t) {
      const Sym2Tensor c = rng.spd(n);
      const GaussianMeasure g(c);
      const GaussianMeasure wrong(1.5 * c);
      double wrong_dev = 0.0;
      for (int r = 0; r < 10; ++r) {
        const DualVec k = rng.dual(n);
        const Vec x = rng.vec(n);
        const OscElement a = an_apply(c, k);
        fixed.observe(std::abs(std::expm1(log_sigma_gaussian(g, a, x) - g.log_eval(x))));
        wrong_dev = std::max(wrong_dev, std::abs(std::expm1(log_sigma_gaussian(wrong, a, x) - wrong.log_eval(x))));
      }
      control.observe(wrong_dev);

      const FieldFunction one = FieldFunction::constant(n, 1.0);
      normalized.observe(std::abs(convolve_numeric(FieldFunction::gaussian(g), one, rule, rng.vec(n, 2.0)) - 1.0));

      const GlElement m = rng.gl_plus(n);
      const GaussianMeasure acted = act_fun_gaussian(m, g);
      const Vec x = rng.vec(n);
      action.observe(rel_err(acted(x), m.det() * g(m * x)));
    }
  }

  for (int t = 0; t < 5; ++t) {
    const Sym2Tensor a = rng.spd(1);
    const Sym2Tensor b = rng.spd(1);
    const GaussianMeasure sum = gaussian_convolve(GaussianMeasure(a), GaussianMeasure(b));
    const QuadratureRule rule(1, default_order(1));
    for (int i = 0; i <= 20; ++i) {
      const Vec x{-3.0 + 0.3 * i};
      conv1.observe(rel_err(convolve_numeric(gaussian_fn(a), gaussian_fn(b), rule, x), sum(x)));
    }
  }
  for (int t = 0; t < 5; ++t) {
    const Sym2Tensor a = rng.spd(2);
    const Sym2Tensor b = rng.spd(2);
    const GaussianMeasure sum = gaussian_convolve(GaussianMeasure(a), GaussianMeasure(b));
    const QuadratureRule rule(2, default_order(2));
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j) {
        const Vec x{1.0 * i, 1.0 * j};
        conv2.observe(rel_err(convolve_numeric(gaussian_fn(a), gaussian_fn(b), rule, x), sum(x)));
      }
  }
  out.push_back(fixed.finish());
  out.push_back(control.finish());
  for (const Check& c : {normalized, action, conv1, conv2}) out.push_back(c.finish());
}

// Convolution suite ---------------------------------------------------------

void convolution_suite(std::uint64_t seed, std::vector<CheckResult>& out) {
  const std::string s = "convolution";
  Sampler rng(seed + 2);
  Check commute(s, "f * g = g * f", 1e-8);
  Check act1(s, "sigma(f * g, (M,k,0,0)) = det(M) sigma(f,.) * sigma(g,.)", 1e-6);
  Check act2(s, "sigma(f * g, (id,0,v,c)) = sigma(f,.) * g = f * sigma(g,.)", 1e-6);
  Check closed(s, "N(p) * exp(-a x^2/2) closed form by quadrature", 1e-8);
  Check quartic(s, "N(1) * exp(-0.1 x^4) at 0 against adaptive reference", 1e-8);
  Check doubling(s, "doubling the quadrature order moves quartic results < 1e-8", 1e-8);

  {
    const QuadratureRule rule(Sym2Tensor{{0.5}}, 120);
    const FieldFunction qa =
        FieldFunction::exp_polynomial(Polynomial(1, {{{4}, -0.5}, {{2}, -1.0}, {{1}, 0.2}}), true);
    for (int t = 0; t < 4; ++t) {
      const FieldFunction f = gaussian_fn(rng.spd(1));
      const FieldFunction g = exp_quadratic(rng.normal(0.2), rng.normal(0.5), rng.uniform(0.5, 2.0));
      for (const auto& [a, b] : {std::pair{f, g}, std::pair{qa, g}, std::pair{f, qa}}) {
        for (int i = 0; i < 20; ++i) {
          const Vec x{-2.0 + 0.2 * i};
          const double fg = convolve_numeric(a, b, rule, x);
          const double gf = convolve_numeric(b, a, rule, x);
          commute.observe(std::abs(fg - gf) / std::max(1.0, std::abs(fg)));
        }
      }
    }
  }

  {
    const QuadratureRule rule(1, 60);
    for (int t = 0; t < 3; ++t) {
      const FieldFunction f = gaussian_fn(rng.spd(1));
      const FieldFunction g = exp_quadratic(rng.normal(0.2), rng.normal(0.5), rng.uniform(0.8, 2.0));
      const GlElement m{{rng.uniform(0.6, 1.5)}};
      const OscElement h(m, DualVec{rng.normal(0.5)}, Vec::zero(1), 0.0);
      const FieldFunction lhs = sigma_act(convolve(f, g, rule), h);
      const FieldFunction sf = sigma_act(f, h);
      const FieldFunction sg = sigma_act(g, h);
      const OscElement shift = OscElement::heisenberg(DualVec{0.0}, Vec{rng.normal(0.5)}, rng.normal(0.3));
      const FieldFunction lhs2 = sigma_act(convolve(f, g, rule), shift);
      for (int i = 0; i < 20; ++i) {
        const Vec x{-1.9 + 0.2 * i};
        act1.observe(rel_err(lhs(x), m.det() * convolve_numeric(sf, sg, rule, x)));
        act2.observe(rel_err(lhs2(x), convolve_numeric(sigma_act(f, shift), g, rule, x)));
        act2.observe(rel_err(lhs2(x), convolve_numeric(f, sigma_act(g, shift), rule, x)));
      }
    }
  }

  for (double a : {0.5, 1.0, 2.0}) {
    for (double p : {0.25, 0.5, 1.0}) {
      const FieldFunction g = gauss_convolve_exp(Sym2Tensor{{p}}, quadratic_1d(a), {0, kQuadrature});
      for (double x : {-1.5, 0.0, 0.4, 2.0}) {
        const double oracle = std::pow(1.0 + a * p, -0.5) * std::exp(-0.5 * a * x * x / (1.0 + a * p));
        closed.observe(rel_err(g(Vec{x}), oracle));
      }
    }
  }

  {
    const GaussianMeasure n1(Sym2Tensor{{1.0}});
    const double ref = adaptive([&](double y) { return n1(Vec{y}) * std::exp(-0.1 * std::pow(y, 4)); });
    const FieldFunction high = gauss_convolve_exp(Sym2Tensor{{1.0}}, quartic_1d(0.1), {200, kQuadrature});
    quartic.observe(std::abs(high(Vec{0.0}) - ref));
  }

  for (const auto& [lambda, p] : {std::pair{0.1, 1.0}, std::pair{0.5, 1.0}, std::pair{0.125, 2.0}}) {
    const FieldFunction q = gauss_convolve_exp(Sym2Tensor{{p}}, quartic_1d(lambda), {40, kQuadrature});
    const FieldFunction q2 = gauss_convolve_exp(Sym2Tensor{{p}}, quartic_1d(lambda), {80, kQuadrature});
    for (int i = 0; i < 5; ++i) {
      const Vec x{rng.normal()};
      doubling.observe(std::abs(q(x) - q2(x)));
    }
  }
  {
    const FieldFunction i2 =
        FieldFunction::polynomial(Polynomial(2, {{{4, 0}, -0.1}, {{0, 4}, -0.1}, {{2, 2}, -0.05}}));
    const Sym2Tensor p2{{1.0, 0.2}, {0.2, 0.8}};
    const FieldFunction a = gauss_convolve_exp(p2, i2, {20, kQuadrature});
    const FieldFunction b = gauss_convolve_exp(p2, i2, {40, kQuadrature});
    for (int i = 0; i < 5; ++i) {
      const Vec x = rng.vec(2);
      doubling.observe(std::abs(a(x) - b(x)));
    }
  }
  for (const Check& c : {commute, act1, act2, closed, quartic, doubling}) out.push_back(c.finish());
}

// Renorm suite --------------------------------------------------------------

void renorm_suite(std::uint64_t seed, std::vector<CheckResult>& out) {
  const std::string s = "renorm";
  Sampler rng(seed + 3);
  Check genfun(s, "W[P, I] = log of the source-coupled Gaussian integral (quadratic I)", 1e-8);
  Check coarse(s, "coarse graining: W[P1, W[P2, I]] = W[P1 + P2, I]", 1e-5);
  Check rescale_wt(s, "rescaling: W-tilde[P, I] o M = W-tilde[M^-1 P M^-T, I o M]", 1e-6);
  Check rescale_w(s, "rescaling at the level of W", 1e-6);
  Check semigroup(s, "R_c' R_c = R_cc' on {1, 1.2, sqrt2, 2}^2", 1e-5);
  Check identity(s, "R_1 is the identity", 0.0);
  Check free(s, "free field is a fixed point: R_c 0 = 0", 0.0);
  Check flow(s, "quadratic flow a' = a / (c (1 + a p (1 - 1/c)))", 1e-8);
  Check factor(s, "R_c factors through Ur and Cgrl", 1e-8);
  Check heat_diag(s, "heat kernel diagonal, n = 3", 1e-8);
  Check heat_off(s, "heat kernel off-diagonal, n = 3", 1e-8);
  Check heat_div(s, "massless heat kernel diverges for n <= 2", 0.0);
  Check monotone(s, "default family is monotone", 1e-10);

  for (int t = 0; t < 10; ++t) {
    const double a = rng.uniform(0.2, 2.0);
    const double p = rng.uniform(0.3, 2.0);
    const double j = rng.normal();
    const double w = w_full(Sym2Tensor{{p}}, quadratic_1d(a), DualVec{j}, {0, kQuadrature});
    const double oracle = 0.5 * p * j * j / (1.0 + a * p) - 0.5 * std::log(1.0 + a * p);
    genfun.observe(rel_err(w, oracle, 1.0));
  }

  {
    const Sym2Tensor half{{0.5}};
    const FieldFunction i = quartic_1d(0.1);
    const FieldFunction two_step = wtilde(half, coarse_grain(half, half, i));
    const FieldFunction one_step = wtilde(Sym2Tensor{{1.0}}, i);
    for (int k = 0; k < 10; ++k) {
      const Vec x{-2.0 + 0.45 * k};
      coarse.observe(rel_err(two_step(x), one_step(x)));
    }
  }

  for (int t = 0; t < 5; ++t) {
    const GlElement m = rng.gl_plus(2);
    const Sym2Tensor p = rng.spd(2);
    const FieldFunction i =
        FieldFunction::polynomial(Polynomial(2, {{{4, 0}, -0.05}, {{0, 4}, -0.05}, {{1, 1}, 0.1}}));
    const Rescaled r = rescale(m, p, i);
    const Vec x = rng.vec(2);
    const FieldFunction lhs = compose_linear(wtilde(p, i), m);
    rescale_wt.observe(rel_err(lhs(x), wtilde(r.propagator, r.interaction)(x)));
    const DualVec j = rng.dual(2, 0.5);
    rescale_w.observe(rel_err(w_full(p, i, j * m.inverse()), w_full(r.propagator, r.interaction, j)));
  }

  {
    const PropagatorFamily fam = family_1d();
    const double scales[] = {1.0, 1.2, std::numbers::sqrt2, 2.0};
    for (const FieldFunction& i : {quadratic_1d(0.8), quartic_1d(0.1)}) {
      for (double c : scales) {
        for (double c2 : scales) {
          const FieldFunction lhs = renorm_step(fam, c2, renorm_step(fam, c, i, {0, kQuadrature}), {0, kQuadrature});
          const FieldFunction rhs = renorm_step(fam, c * c2, i, {0, kQuadrature});
          for (int k = 0; k < 10; ++k) {
            const Vec x{-1.8 + 0.4 * k};
            semigroup.observe(rel_err(lhs(x), rhs(x)));
          }
        }
      }
      const FieldFunction one = renorm_step(fam, 1.0, i);
      for (int k = 0; k < 10; ++k) {
        const Vec x{rng.normal()};
        identity.observe(std::abs(one(x) - i(x)));
      }
    }
    const FieldFunction zero = FieldFunction::constant(1, 0.0);
    for (double c : {1.0, 1.5, 2.0, 4.0}) {
      for (int k = 0; k < 5; ++k) free.observe(std::abs(renorm_step(fam, c, zero)(Vec{rng.normal()})));
    }
  }

  for (double p : {0.5, 1.0}) {
    const PropagatorFamily fam = family_1d(p);
    for (double a : {0.5, 1.0, 2.0}) {
      for (double c : {1.25, 2.0, 4.0}) {
        const FieldFunction r = renorm_step(fam, c, quadratic_1d(a), {0, kQuadrature});
        const double fitted = -(r(Vec{1.0}) - 2.0 * r(Vec{0.0}) + r(Vec{-1.0}));
        const double oracle = a / (1.0 + a * p * (1.0 - 1.0 / c)) / c;
        flow.observe(rel_err(fitted, oracle));
      }
    }
  }

  {
    const PropagatorFamily fam = family_1d(0.8);
    const FieldFunction i = quartic_1d(0.15);
    for (double c : {1.5, 2.0}) {
      const FieldFunction via = cgrl_apply(ur(fam.base(), fam.dilation().at(c)), i);
      const FieldFunction direct = renorm_direct(fam, c, i);
      const FieldFunction pulled = renorm_pulled_back(fam, c, i);
      for (int k = 0; k < 10; ++k) {
        const Vec x{-1.8 + 0.4 * k};
        factor.observe(rel_err(via(x), direct(x)));
        factor.observe(rel_err(pulled(x), direct(x)));
      }
    }
  }

  for (double l0 : {0.5, 1.0, 2.0}) {
    const double r = 1.3;
    const Sym2Tensor hk = heat_kernel_base(3, {Vector::Zero(3), Vector::Unit(3, 0) * r}, l0);
    const double diag = 2.0 * std::pow(4.0 * std::numbers::pi, -1.5) / std::sqrt(l0);
    const double off = std::erf(r / (2.0 * std::sqrt(l0))) / (4.0 * std::numbers::pi * r);
    heat_diag.observe(rel_err(hk.matrix()(0, 0), diag));
    heat_diag.observe(rel_err(hk.matrix()(1, 1), diag));
    heat_off.observe(rel_err(hk.matrix()(0, 1), off));
  }
  for (int n : {1, 2}) {
    try {
      heat_kernel_base(n, {Vector::Zero(n)}, 1.0);
      heat_div.fail();
    } catch (const DivergentIntegral&) {
    }
  }

  for (std::size_t n = 1; n <= 3; ++n) {
    const PropagatorFamily fam(rng.spd(n), DilationFamily::standard(n));
    for (double c : {1.1, 1.5, 2.0, 4.0, 10.0}) monotone.observe(std::max(0.0, -min_eigenvalue(propagator_gap(fam, c))));
  }

  for (const Check& c : {genfun, coarse, rescale_wt, rescale_w, semigroup, identity, free, flow, factor, heat_diag,
                         heat_off, heat_div, monotone})
    out.push_back(c.finish());
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"group", "gaussian", "convolution", "renorm"};
  return names;
}

std::vector<CheckResult> run_suite(std::string_view name, std::uint64_t seed) {
  const auto& names = suite_names();
  const bool all = name == "all";
  if (!all && std::find(names.begin(), names.end(), name) == names.end())
    throw InvalidArgument("unknown verify suite '" + std::string(name) + "'");
  std::vector<CheckResult> out;
  if (all || name == "group") group_suite(seed, out);
  if (all || name == "gaussian") gaussian_suite(seed, out);
  if (all || name == "convolution") convolution_suite(seed, out);
  if (all || name == "renorm") renorm_suite(seed, out);
  return out;
}

}  // namespace rgflow::cli
