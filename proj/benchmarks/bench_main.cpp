#include <benchmark/benchmark.h>

#include "rgflow/function_space.hpp"
#include "rgflow/osc_group.hpp"
#include "rgflow/quadrature.hpp"
#include "rgflow/renorm.hpp"

namespace {

using namespace rgflow;

// Node generation is cached per order, so this times the scaled rule only
// after the first iteration.
void BM_HermiteRule(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    QuadratureRule rule(1, order);
    benchmark::DoNotOptimize(rule.weights().data());
  }
}
BENCHMARK(BM_HermiteRule)->Arg(16)->Arg(64)->Arg(200);

void BM_TensorRule(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    QuadratureRule rule(n, default_order(n));
    benchmark::DoNotOptimize(rule.weights().data());
  }
}
BENCHMARK(BM_TensorRule)->DenseRange(1, 3);

void BM_OscMul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<Eigen::Index>(n);
  const OscElement g(GlElement(Matrix(Matrix::Identity(dim, dim) * 1.1)), DualVec(Vector::Ones(dim)),
                     Vec(Vector::Ones(dim)), 0.5);
  const OscElement h = osc_inv(g);
  for (auto _ : state) benchmark::DoNotOptimize(osc_mul(g, h));
}
BENCHMARK(BM_OscMul)->DenseRange(1, 3);

void BM_GaussConvolveExp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Polynomial::Terms terms;
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial::Exponents e(n, 0);
    e[i] = 4;
    terms[e] = -0.1;
  }
  const Polynomial p(n, terms);
  const FieldFunction interaction = FieldFunction::polynomial(p);
  const Sym2Tensor cov = Sym2Tensor::identity(n);
  const Vec x(Vector::Constant(static_cast<Eigen::Index>(n), 0.3));
  for (auto _ : state) {
    const FieldFunction f = gauss_convolve_exp(cov, interaction);
    benchmark::DoNotOptimize(f.log_value(x));
  }
}
BENCHMARK(BM_GaussConvolveExp)->DenseRange(1, 3);

void BM_RenormStep(benchmark::State& state) {
  const PropagatorFamily fam(Sym2Tensor{{1.0}}, DilationFamily::standard(1));
  const FieldFunction quartic = FieldFunction::polynomial(Polynomial::monomial({4}, -0.1));
  for (auto _ : state) {
    const FieldFunction r = renorm_step(fam, 2.0, quartic);
    benchmark::DoNotOptimize(r(Vec{0.5}));
  }
}
BENCHMARK(BM_RenormStep);

}  // namespace

BENCHMARK_MAIN();
