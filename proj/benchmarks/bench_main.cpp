#include <random>

#include <benchmark/benchmark.h>

#include "dynreg/envgen.hpp"
#include "dynreg/flh.hpp"
#include "dynreg/oracle.hpp"
#include "dynreg/psd_state.hpp"
#include "dynreg/sions.hpp"

namespace {

using namespace dynreg;

Environment environment(long n, int d = 1) {
  PiecewiseLinearSpec spec;
  spec.n = n;
  spec.d = d;
  spec.budget = 8.0;
  spec.seed = 1;
  return gen_piecewise_linear(spec);
}

void BM_SionsRound(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Environment env = environment(4096, d);
  SionsExpert expert(SionsConfig{d, env.losses.front().constants().sigma, 2.0, 20.0});
  long t = 1;
  for (auto _ : state) {
    const auto& f = env.losses[static_cast<std::size_t>((t - 1) % 4096)];
    benchmark::DoNotOptimize(expert.predict(Vector2(1.0, static_cast<double>(t))));
    expert.update(f, Vector2(1.0, static_cast<double>(t + 1)));
    ++t;
  }
}
BENCHMARK(BM_SionsRound)->Arg(1)->Arg(2)->Arg(4);

// Whole FLH runs: cost grows quadratically with the horizon.
void BM_FlhRun(benchmark::State& state) {
  const Environment env = environment(state.range(0));
  FlhConfig cfg;
  cfg.sigma = env.losses.front().constants().sigma;
  for (auto _ : state) benchmark::DoNotOptimize(flh_run(cfg, env.losses));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FlhRun)->RangeMultiplier(2)->Range(128, 1024)->Complexity(benchmark::oNSquared)
    ->Unit(benchmark::kMillisecond);

void BM_Projection(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  CorrectionMatrix A(2 * d, 2.0);
  for (int i = 0; i < 20; ++i) {
    Vector g(2 * d);
    for (int j = 0; j < 2 * d; ++j) g[j] = unit(rng);
    A.rank_one_update(g, 1.0);
  }
  SlabSet slabs;
  for (int k = 0; k < d; ++k) slabs.push_back(Slab{k, Vector2(1.0, 5.0 + k), 1.0});
  Vector u(2 * d);
  for (int j = 0; j < 2 * d; ++j) u[j] = 5.0 * unit(rng);
  for (auto _ : state) benchmark::DoNotOptimize(mahalanobis_project(u, A, slabs));
}
BENCHMARK(BM_Projection)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

void BM_OfflineSolve(benchmark::State& state) {
  const long n = state.range(0);
  const Environment env = environment(n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_offline(env.losses, VariationBudget{8.0, n}));
  state.SetComplexityN(n);
}
BENCHMARK(BM_OfflineSolve)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMillisecond);

void BM_TrendFilter(benchmark::State& state) {
  const Environment env = environment(state.range(0));
  const Vector y = env.targets.col(0);
  for (auto _ : state) benchmark::DoNotOptimize(l1_trend_filter(y, 0.5));
}
BENCHMARK(BM_TrendFilter)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
