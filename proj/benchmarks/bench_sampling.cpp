#include <benchmark/benchmark.h>

#include "dppls/basis.hpp"
#include "dppls/lsq.hpp"
#include "dppls/measure.hpp"
#include "dppls/rng.hpp"
#include "dppls/sampler.hpp"

using namespace dppls;

namespace {

double inv_quadratic(double x) { return 1.0 / (1.0 + 2.0 * x * x); }

}  // namespace

static void BM_Features(benchmark::State& state) {
  const auto b = FeatureBasis::hermite(static_cast<std::size_t>(state.range(0)));
  std::vector<double> phi(b.dimension());
  double x = -3.0;
  for (auto _ : state) {
    b.eval(x, phi);
    benchmark::DoNotOptimize(phi.data());
    x = x > 3.0 ? -3.0 : x + 1e-3;
  }
}
BENCHMARK(BM_Features)->Arg(10)->Arg(50);

static void BM_DppDraw(benchmark::State& state) {
  const DesignSampler s(FeatureBasis::hermite(static_cast<std::size_t>(state.range(0))));
  RngStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(s.sample_dpp(rng));
}
BENCHMARK(BM_DppDraw)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_IidChristoffel(benchmark::State& state) {
  const DesignSampler s(FeatureBasis::hermite(20));
  RngStream rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(s.sample_iid(WeightFunction::christoffel(), n, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IidChristoffel)->Arg(40)->Arg(200);

static void BM_GramAndFit(benchmark::State& state) {
  const DesignSampler s(FeatureBasis::hermite(20));
  RngStream rng(3);
  const auto d = draw_design(s, Scheme::Volume, static_cast<std::size_t>(state.range(0)), rng);
  const auto y = evaluate(inv_quadratic, d);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_lsq_fit(y, d, s.basis()));
}
BENCHMARK(BM_GramAndFit)->Arg(40)->Arg(200);

static void BM_GaussQuadrature(benchmark::State& state) {
  const auto mu = ReferenceMeasure::standard_gaussian();
  const auto q = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gauss_quadrature(mu, q));
}
BENCHMARK(BM_GaussQuadrature)->Arg(128)->Arg(1024)->Unit(benchmark::kMicrosecond);

static void BM_BestApproximation(benchmark::State& state) {
  const auto b = FeatureBasis::hermite(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(best_approximation(inv_quadratic, b));
}
BENCHMARK(BM_BestApproximation)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
