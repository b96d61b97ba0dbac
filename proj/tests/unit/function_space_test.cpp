#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "rgflow/errors.hpp"
#include "rgflow/function_space.hpp"
#include "support/random.hpp"

namespace rgflow {
namespace {

using testing::rel_err;
using testing::Rng;

constexpr double kInf = std::numeric_limits<double>::infinity();

double adaptive(const std::function<double(double)>& f) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -kInf, kInf, 20, 1e-14);
}

FieldFunction phi4(double lambda) { return FieldFunction::polynomial(Polynomial::monomial({4}, -lambda)); }

FieldFunction quadratic_1d(double a) { return FieldFunction::polynomial(Polynomial::monomial({2}, -0.5 * a)); }

FieldFunction gaussian(const Sym2Tensor& c) { return FieldFunction::gaussian(GaussianMeasure(c)); }

// exp(c + b.x - 1/2 x A x), integrable.
FieldFunction exp_quadratic(double c, const Vector& b, const Sym2Tensor& a) {
  return FieldFunction::exp_polynomial(Polynomial::quadratic(c, b, -a.matrix()), true);
}

Polynomial random_cubic(Rng& rng, std::size_t n) {
  Polynomial p = Polynomial::constant(n, testing::normal(rng));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> e(n, 0);
    e[i] = 1;
    p = p + Polynomial::monomial(e, testing::normal(rng));
    e[i] = 3;
    p = p + Polynomial::monomial(e, 0.3 * testing::normal(rng));
    if (n > 1) {
      e[i] = 2;
      e[(i + 1) % n] = 1;
      p = p + Polynomial::monomial(e, 0.3 * testing::normal(rng));
    }
  }
  return p;
}

TEST(SigmaAct, IdentityLeavesFunctionUnchanged) {
  Rng rng(1);
  const FieldFunction fs[] = {
      FieldFunction::polynomial(random_cubic(rng, 2)),
      gaussian(testing::random_spd(rng, 2)),
      FieldFunction::composite(2, [](const Vec& x) { return std::sin(x[0]) + x[1]; }),
  };
  for (const FieldFunction& f : fs) {
    const FieldFunction g = sigma_act(f, OscElement::identity(2));
    for (int t = 0; t < 10; ++t) {
      const Vec x = testing::random_vec(rng, 2);
      EXPECT_NEAR(g(x), f(x), 1e-14 * std::max(1.0, std::abs(f(x))));
    }
  }
}

TEST(SigmaAct, ExponentialExample) {
  const FieldFunction f = FieldFunction::exp_polynomial(Polynomial::monomial({1}, 1.0));
  const OscElement g(GlElement{{1.0}}, DualVec{2.0}, Vec{0.5}, 0.0);
  const FieldFunction s = sigma_act(f, g);
  for (double x : {-1.0, 0.0, 1.0}) EXPECT_LT(rel_err(s(Vec{x}), std::exp(2.0 * x) * std::exp(x + 0.5)), 1e-14);
}

TEST(SigmaAct, DimensionMismatch) {
  EXPECT_THROW(sigma_act(phi4(1.0), OscElement::identity(2)), DimensionMismatch);
}

TEST(SigmaAct, RightActionOnCubicPolynomials) {
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const FieldFunction f = FieldFunction::polynomial(random_cubic(rng, n));
    const OscElement g = testing::random_osc(rng, n, 0.5);
    const OscElement h = testing::random_osc(rng, n, 0.5);
    const FieldFunction lhs = sigma_act(sigma_act(f, g), h);
    const FieldFunction rhs = sigma_act(f, g * h);
    for (int t = 0; t < 50; ++t) {
      const Vec x = testing::random_vec(rng, n);
      EXPECT_NEAR(lhs(x), rhs(x), 1e-10 * std::max(1.0, std::abs(rhs(x))));
    }
  }
}

TEST(SigmaAct, RightActionOnComposites) {
  Rng rng(3);
  const FieldFunction f = FieldFunction::composite(
      2, [](const Vec& x) { return 2.0 + std::sin(x[0] * x[1]); },
      [](const Vec& x) { return std::log(2.0 + std::sin(x[0] * x[1])); });
  for (int trial = 0; trial < 5; ++trial) {
    const OscElement g = testing::random_osc(rng, 2, 0.5);
    const OscElement h = testing::random_osc(rng, 2, 0.5);
    const FieldFunction lhs = sigma_act(sigma_act(f, g), h);
    const FieldFunction rhs = sigma_act(f, g * h);
    for (int t = 0; t < 20; ++t) {
      const Vec x = testing::random_vec(rng, 2);
      EXPECT_LT(rel_err(lhs(x), rhs(x)), 1e-10);
      EXPECT_NEAR(lhs.log_value(x), rhs.log_value(x), 1e-10);
    }
  }
}

TEST(SigmaAct, GaussianBecomesIntegrableExpQuadratic) {
  const FieldFunction g = gaussian(Sym2Tensor{{1.0}});
  const FieldFunction s = sigma_act(g, OscElement(GlElement{{2.0}}, DualVec{1.0}, Vec{0.3}, 0.1));
  EXPECT_EQ(s.kind(), FunctionKind::exp_polynomial);
  EXPECT_TRUE(s.integrable());
}

TEST(ActFun, Identity) {
  const FieldFunction f = phi4(0.2);
  const FieldFunction g = act_fun(GlElement::identity(1), f);
  EXPECT_DOUBLE_EQ(g(Vec{1.3}), f(Vec{1.3}));
}

TEST(ActFun, GaussianExample) {
  const FieldFunction g = act_fun(GlElement{{2.0}}, gaussian(Sym2Tensor{{4.0}}));
  ASSERT_EQ(g.kind(), FunctionKind::gaussian);
  const GaussianMeasure n1(Sym2Tensor{{1.0}});
  for (double x : {-1.0, 0.0, 0.5, 2.0}) EXPECT_LT(rel_err(g(Vec{x}), n1(Vec{x})), 1e-14);
}

TEST(ActFun, RejectsNonPositiveDeterminant) {
  EXPECT_THROW(act_fun(GlElement{{-2.0}}, phi4(1.0)), NonPositiveDeterminant);
  EXPECT_THROW(act_fun(GlElement{{0.0, 1.0}, {1.0, 0.0}}, gaussian(Sym2Tensor::identity(2))),
               NonPositiveDeterminant);
}

TEST(ActFun, PreservesIntegral) {
  // exp(-x^4 - x^2/2 + x/3)
  const FieldFunction f = FieldFunction::exp_polynomial(
      Polynomial(1, {{{4}, -1.0}, {{2}, -0.5}, {{1}, 1.0 / 3.0}}), true);
  const double oracle = adaptive([&](double x) { return f(Vec{x}); });
  const FieldFunction one = FieldFunction::constant(1, 1.0);
  const QuadratureRule rule(Sym2Tensor{{0.5}}, 80);
  for (double m : {0.5, 1.0, 1.7}) {
    const FieldFunction g = act_fun(GlElement{{m}}, f);
    EXPECT_LT(rel_err(adaptive([&](double x) { return g(Vec{x}); }), oracle), 1e-10);
    EXPECT_LT(rel_err(convolve_numeric(g, one, rule.recentered(Sym2Tensor{{0.5 / (m * m)}}, Vec{0.0}), Vec{0.0}),
                      oracle),
              1e-6)
        << m;
  }
}

TEST(ConvolveNumeric, GaussianSemigroupValue) {
  const FieldFunction a = gaussian(Sym2Tensor{{1.0}});
  const FieldFunction b = gaussian(Sym2Tensor{{2.0}});
  const QuadratureRule rule(1, 40);
  const double value = convolve_numeric(a, b, rule, Vec{0.0});
  EXPECT_LT(rel_err(value, 1.0 / std::sqrt(2.0 * std::numbers::pi * 3.0)), 1e-6);
  EXPECT_NEAR(value, 0.2303294, 1e-6);
}

TEST(ConvolveNumeric, GaussianAgainstConstantOne) {
  Rng rng(4);
  const FieldFunction one2 = FieldFunction::constant(2, 1.0);
  const Sym2Tensor c = testing::random_spd(rng, 2);
  const QuadratureRule rule(2, 20);
  for (int t = 0; t < 10; ++t) {
    const Vec x = testing::random_vec(rng, 2, 3.0);
    EXPECT_NEAR(convolve_numeric(gaussian(c), one2, rule, x), 1.0, 1e-8);
    EXPECT_NEAR(convolve_numeric(one2, gaussian(c), rule, x), 1.0, 1e-8);
  }
}

TEST(ConvolveNumeric, Commutative) {
  Rng rng(5);
  const QuadratureRule rule(Sym2Tensor{{0.5}}, 120);
  const FieldFunction quartic_a =
      FieldFunction::exp_polynomial(Polynomial(1, {{{4}, -0.5}, {{2}, -1.0}, {{1}, 0.2}}), true);
  const FieldFunction quartic_b = FieldFunction::exp_polynomial(Polynomial(1, {{{4}, -1.0}, {{2}, -0.5}}), true);
  const FieldFunction pairs[][2] = {
      {gaussian(Sym2Tensor{{0.7}}), exp_quadratic(0.1, Vector::Constant(1, 0.4), Sym2Tensor{{1.3}})},
      {quartic_a, quartic_b},
      {gaussian(Sym2Tensor{{1.0}}), quartic_a},
  };
  for (const auto& pair : pairs) {
    for (int t = 0; t < 20; ++t) {
      const Vec x{-2.0 + 0.2 * t};
      const double fg = convolve_numeric(pair[0], pair[1], rule, x);
      const double gf = convolve_numeric(pair[1], pair[0], rule, x);
      EXPECT_NEAR(fg, gf, 1e-8 * std::max(1.0, std::abs(fg)));
    }
  }
}

TEST(ConvolveNumeric, Errors) {
  const QuadratureRule rule(1, 10);
  EXPECT_THROW(convolve_numeric(phi4(1.0), FieldFunction::constant(1, 1.0), rule, Vec{0.0}), NotIntegrable);
  EXPECT_THROW(convolve_numeric(gaussian(Sym2Tensor{{1.0}}), FieldFunction::exp_polynomial(Polynomial::constant(1, 800.0)),
                                rule, Vec{0.0}),
               QuadratureOverflow);
  EXPECT_THROW(convolve_numeric(gaussian(Sym2Tensor{{1.0}}), gaussian(Sym2Tensor::identity(2)), rule, Vec{0.0}),
               DimensionMismatch);
}

TEST(ConvolveNumeric, ImportanceWeightedComposite) {
  // exp(-x^4) as an opaque integrable composite against a Gaussian.
  FieldFunction::Traits traits;
  traits.integrable = true;
  const FieldFunction f = FieldFunction::composite(1, [](const Vec& x) { return std::exp(-std::pow(x[0], 4)); },
                                                   [](const Vec& x) { return -std::pow(x[0], 4); }, traits);
  const FieldFunction g = gaussian(Sym2Tensor{{0.5}});
  const QuadratureRule rule(Sym2Tensor{{0.5}}, 80);
  for (double x : {-1.0, 0.0, 0.8}) {
    const double oracle = adaptive([&](double y) { return f(Vec{y}) * g(Vec{x - y}); });
    EXPECT_LT(rel_err(convolve_numeric(f, FieldFunction::constant(1, 1.0), rule, Vec{x}),
                      adaptive([&](double y) { return f(Vec{y}); })),
              1e-6);
    EXPECT_LT(rel_err(convolve(g, f, rule)(Vec{x}), oracle), 1e-6);
  }
}

TEST(GaussConvolveExp, ZeroInteraction) {
  const FieldFunction zero = FieldFunction::constant(2, 0.0);
  const Sym2Tensor p{{1.0, 0.3}, {0.3, 0.5}};
  for (EvalPath path : {EvalPath::automatic, EvalPath::quadrature}) {
    const FieldFunction g = gauss_convolve_exp(p, zero, {0, path});
    EXPECT_NEAR(g(Vec{0.3, -1.0}), 1.0, 1e-13);
    EXPECT_NEAR(log_fn(g)(Vec{2.0, 1.0}), 0.0, 1e-13);
  }
}

TEST(GaussConvolveExp, QuadraticClosedForm) {
  for (double a : {0.5, 1.0, 3.0}) {
    for (double p : {0.25, 1.0, 2.0}) {
      const auto oracle = [&](double x) {
        return std::pow(1.0 + a * p, -0.5) * std::exp(-0.5 * a * x * x / (1.0 + a * p));
      };
      for (EvalPath path : {EvalPath::automatic, EvalPath::quadrature}) {
        const FieldFunction g = gauss_convolve_exp(Sym2Tensor{{p}}, quadratic_1d(a), {0, path});
        for (double x : {-1.5, 0.0, 0.4, 2.0}) EXPECT_LT(rel_err(g(Vec{x}), oracle(x)), 1e-10) << a << " " << p;
      }
    }
  }
}

TEST(GaussConvolveExp, ExactPathMatchesQuadratureInTwoDimensions) {
  Rng rng(6);
  const Sym2Tensor p = testing::random_spd(rng, 2);
  const Sym2Tensor a = testing::random_spd(rng, 2, 0.2, 1.0);
  const FieldFunction i = FieldFunction::polynomial(Polynomial::quadratic(0.2, testing::random_vector(rng, 2, 0.5), -a.matrix()));
  const FieldFunction exact = gauss_convolve_exp(p, i);
  const FieldFunction quad = gauss_convolve_exp(p, i, {30, EvalPath::quadrature});
  EXPECT_EQ(exact.kind(), FunctionKind::exp_polynomial);
  for (int t = 0; t < 10; ++t) {
    const Vec x = testing::random_vec(rng, 2);
    EXPECT_NEAR(exact.log_value(x), quad.log_value(x), 1e-10);
  }
}

TEST(GaussConvolveExp, QuarticAgainstAdaptiveReference) {
  const double lambda = 0.1;
  const FieldFunction g = gauss_convolve_exp(Sym2Tensor{{1.0}}, phi4(lambda));
  const GaussianMeasure n1(Sym2Tensor{{1.0}});
  const double adaptive_ref = adaptive([&](double y) { return n1(Vec{y}) * std::exp(-lambda * std::pow(y, 4)); });
  EXPECT_NEAR(g(Vec{0.0}), adaptive_ref, 1e-8);
  const FieldFunction high = gauss_convolve_exp(Sym2Tensor{{1.0}}, phi4(lambda), {200, EvalPath::quadrature});
  EXPECT_NEAR(high(Vec{0.0}), adaptive_ref, 1e-8);
}

TEST(GaussConvolveExp, DoublingOrderIsStable) {
  struct Case {
    double lambda;
    double p;
  };
  for (const Case c : {Case{0.1, 1.0}, Case{0.5, 1.0}, Case{0.125, 2.0}}) {
    const FieldFunction q = gauss_convolve_exp(Sym2Tensor{{c.p}}, phi4(c.lambda), {40, EvalPath::quadrature});
    const FieldFunction q2 = gauss_convolve_exp(Sym2Tensor{{c.p}}, phi4(c.lambda), {80, EvalPath::quadrature});
    for (double x : {-1.0, 0.0, 0.5, 1.5}) EXPECT_LT(std::abs(q(Vec{x}) - q2(Vec{x})), 1e-8) << c.lambda;
  }
  const FieldFunction i2 = FieldFunction::polynomial(
      Polynomial(2, {{{4, 0}, -0.1}, {{0, 4}, -0.1}, {{2, 2}, -0.05}}));
  const Sym2Tensor p2{{1.0, 0.2}, {0.2, 0.8}};
  const FieldFunction a = gauss_convolve_exp(p2, i2, {20, EvalPath::quadrature});
  const FieldFunction b = gauss_convolve_exp(p2, i2, {40, EvalPath::quadrature});
  EXPECT_LT(std::abs(a(Vec{0.3, -0.2}) - b(Vec{0.3, -0.2})), 1e-8);
}

TEST(GaussConvolveExp, Preconditions) {
  EXPECT_THROW(gauss_convolve_exp(Sym2Tensor{{1.0}}, phi4(-0.1)), NotIntegrable);
  // P^-1 - Hess(I) = 1 - 2 < 0.
  EXPECT_THROW(gauss_convolve_exp(Sym2Tensor{{1.0}}, quadratic_1d(-2.0)), NotIntegrable);
  EXPECT_NO_THROW(gauss_convolve_exp(Sym2Tensor{{1.0}}, quadratic_1d(-0.5)));
  EXPECT_THROW(gauss_convolve_exp(Sym2Tensor{{0.0}}, phi4(0.1)), NotPositiveDefinite);
  EXPECT_THROW(gauss_convolve_exp(Sym2Tensor::identity(2), phi4(0.1)), DimensionMismatch);
  EXPECT_THROW(gauss_convolve_exp(Sym2Tensor{{1.0}}, FieldFunction::composite(1, [](const Vec& x) { return x[0]; })),
               NotIntegrable);
}

TEST(GaussConvolveExp, MemoizedResultIsStable) {
  const FieldFunction g = gauss_convolve_exp(Sym2Tensor{{0.7}}, phi4(0.2));
  const double first = g(Vec{0.25});
  EXPECT_EQ(g(Vec{0.25}), first);
  const double log_first = g.log_value(Vec{0.25});
  EXPECT_EQ(g.log_value(Vec{0.25}), log_first);
  EXPECT_NEAR(log_first, std::log(first), 1e-15);
  const FieldFunction fresh = gauss_convolve_exp(Sym2Tensor{{0.7}}, phi4(0.2));
  EXPECT_EQ(fresh(Vec{0.25}), first);
}

TEST(LogFn, Examples) {
  const FieldFunction zero = log_fn(FieldFunction::constant(3, 1.0));
  EXPECT_EQ(zero(Vec{1.0, 2.0, 3.0}), 0.0);
  const FieldFunction i = phi4(0.3);
  const FieldFunction back = log_fn(FieldFunction::exp_polynomial(*i.as_polynomial()));
  EXPECT_DOUBLE_EQ(back(Vec{1.2}), i(Vec{1.2}));
  const FieldFunction g = gaussian(Sym2Tensor{{2.0}});
  EXPECT_NEAR(log_fn(g)(Vec{0.5}), g.as_gaussian()->log_eval(Vec{0.5}), 1e-15);
  const FieldFunction c = log_fn(FieldFunction::composite(1, [](const Vec& x) { return std::exp(-x[0]); }));
  EXPECT_NEAR(c(Vec{2.0}), -2.0, 1e-15);
}

TEST(LogFn, NonPositiveValue) {
  const FieldFunction f = log_fn(FieldFunction::polynomial(Polynomial::monomial({1}, 1.0)));
  EXPECT_NEAR(f(Vec{std::exp(1.0)}), 1.0, 1e-15);
  EXPECT_THROW(f(Vec{-1.0}), NonPositiveValue);
  EXPECT_THROW(f(Vec{0.0}), NonPositiveValue);
}

// sigma(f * g, (M, k, 0, 0)) = det(M) sigma(f, .) * sigma(g, .)
void expect_conv_act_1(const FieldFunction& f, const FieldFunction& g, const GlElement& m, const DualVec& k) {
  const QuadratureRule rule(1, 60);
  const OscElement h(m, k, Vec::zero(1), 0.0);
  const FieldFunction lhs = sigma_act(convolve(f, g, rule), h);
  const FieldFunction sf = sigma_act(f, h);
  const FieldFunction sg = sigma_act(g, h);
  for (int t = 0; t < 20; ++t) {
    const Vec x{-1.9 + 0.2 * t};
    const double rhs = m.det() * convolve_numeric(sf, sg, rule, x);
    EXPECT_LT(rel_err(lhs(x), rhs), 1e-6) << x[0];
  }
}

TEST(ConvAct, LinearActionPullsOutJacobian) {
  const FieldFunction a = gaussian(Sym2Tensor{{0.8}});
  const FieldFunction b = gaussian(Sym2Tensor{{1.5}});
  const FieldFunction e = exp_quadratic(0.2, Vector::Constant(1, 0.3), Sym2Tensor{{2.0}});
  expect_conv_act_1(a, b, GlElement{{1.3}}, DualVec{0.4});
  expect_conv_act_1(a, e, GlElement{{0.7}}, DualVec{-0.5});
}

// sigma(f * g, (id, 0, v, c)) = sigma(f, .) * g = f * sigma(g, .)
TEST(ConvAct, HeisenbergShiftMovesToEitherFactor) {
  const QuadratureRule rule(1, 60);
  const FieldFunction f = gaussian(Sym2Tensor{{0.8}});
  const FieldFunction g = exp_quadratic(-0.1, Vector::Constant(1, 0.5), Sym2Tensor{{1.2}});
  const OscElement h = OscElement::heisenberg(DualVec{0.0}, Vec{0.6}, 0.3);
  const FieldFunction lhs = sigma_act(convolve(f, g, rule), h);
  for (int t = 0; t < 20; ++t) {
    const Vec x{-1.9 + 0.2 * t};
    EXPECT_LT(rel_err(lhs(x), convolve_numeric(sigma_act(f, h), g, rule, x)), 1e-6);
    EXPECT_LT(rel_err(lhs(x), convolve_numeric(f, sigma_act(g, h), rule, x)), 1e-6);
  }
}

TEST(GaussianForm, ExpQuadraticIsScaledGaussian) {
  const Sym2Tensor a{{2.0, 0.5}, {0.5, 1.0}};
  const Vector b = Vector::LinSpaced(2, 0.3, -0.4);
  const FieldFunction f = exp_quadratic(0.7, b, a);
  const auto form = gaussian_form(f);
  ASSERT_TRUE(form);
  const GaussianMeasure n(form->covariance);
  const Vec x{0.2, 0.9};
  const Vec centred(Vector(x.values() - form->mean.values()));
  EXPECT_NEAR(form->log_scale + n.log_eval(centred), f.log_value(x), 1e-13);
  EXPECT_FALSE(gaussian_form(phi4(1.0)));
}

}  // namespace
}  // namespace rgflow
