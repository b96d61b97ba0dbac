#include "rgflow/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "rgflow/quadrature.hpp"

namespace rgflow {

GaussianMeasure::GaussianMeasure(Sym2Tensor covariance)
    : covariance_(std::move(covariance)),
      precision_(Sym2Tensor::zero(covariance_.dim())),
      factor_(cholesky(covariance_)) {
  precision_ = invert_form(covariance_);
  const double log_det = 2.0 * factor_.diagonal().array().log().sum();
  log_normalizer_ = -0.5 * (static_cast<double>(dim()) * std::log(2.0 * std::numbers::pi) + log_det);
}

double GaussianMeasure::log_eval(const Vec& x) const {
  require_same_dim(dim(), x.size(), "gaussian_eval");
  // x C^{-1} x via the Cholesky factor: |L^{-1} x|^2.
  const Vector y = factor_.triangularView<Eigen::Lower>().solve(x.values());
  return log_normalizer_ - 0.5 * y.squaredNorm();
}

double GaussianMeasure::operator()(const Vec& x) const { return std::exp(log_eval(x)); }

double gaussian_eval(const GaussianMeasure& g, const Vec& x) { return g(x); }

GaussianMeasure gaussian_convolve(const GaussianMeasure& g1, const GaussianMeasure& g2) {
  require_same_dim(g1.dim(), g2.dim(), "gaussian_convolve");
  return GaussianMeasure(g1.covariance() + g2.covariance());
}

GaussianMeasure act_fun_gaussian(const GlElement& m, const GaussianMeasure& g) {
  require_same_dim(m.dim(), g.dim(), "act_fun_gaussian");
  if (!(m.det() > 0.0)) throw NonPositiveDeterminant("act_fun_gaussian requires det(M) > 0");
  return GaussianMeasure(act_sym(m.inverse(), g.covariance()));
}

double log_sigma_gaussian(const GaussianMeasure& f, const OscElement& g, const Vec& x) {
  require_same_dim(f.dim(), g.dim(), "sigma");
  return g.k()(x) + g.c() + f.log_eval(g.m() * x + g.v());
}

GaussCharReport gauss_char_report(const std::function<double(const Vec&)>& log_f, const Sym2Tensor& c,
                                  int trials, std::uint64_t seed, int order) {
  const std::size_t n = c.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto draw = [&] {
    Vector e(static_cast<Eigen::Index>(n));
    for (auto& v : e) v = normal(rng);
    return e;
  };

  GaussCharReport report;
  report.fixed_point = true;
  for (int t = 0; t <= trials; ++t) {
    // t == 0 is the identity element k = 0.
    const DualVec k = t == 0 ? DualVec::zero(n) : DualVec(draw());
    const Vec x(draw());
    const OscElement g = an_apply(c, k);
    const double log_sigma = g.k()(x) + g.c() + log_f(g.m() * x + g.v());
    const double rel = std::abs(std::expm1(log_sigma - log_f(x)));
    report.max_fixed_point_error = std::max(report.max_fixed_point_error, rel);
    if (!(rel <= 1e-10)) report.fixed_point = false;
  }

  const GaussianMeasure weight(c);
  const QuadratureRule rule(c, order > 0 ? order : default_order(n));
  const double integral =
      rule.expectation([&](const Vec& y) { return std::exp(log_f(y) - weight.log_eval(y)); });
  report.normalization_error = std::abs(integral - 1.0);
  report.normalized = report.normalization_error <= 1e-8;
  return report;
}

bool check_gauss_char(const GaussianMeasure& g, const Sym2Tensor& c, int trials, std::uint64_t seed) {
  require_same_dim(g.dim(), c.dim(), "check_gauss_char");
  return gauss_char_report([&](const Vec& x) { return g.log_eval(x); }, c, trials, seed).passed();
}

}  // namespace rgflow
