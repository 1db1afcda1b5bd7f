#include <benchmark/benchmark.h>

#include "rrg/distance.hpp"
#include "rrg/geodesic.hpp"
#include "rrg/pov.hpp"

using namespace rrg;

static void BM_SampleField(benchmark::State& state) {
  const GridSpec grid{static_cast<int>(state.range(0)), 8.0};
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_field(CovarianceModel{0.1, 1.0}, grid, ++seed));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_SampleField)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_MetricEvaluate(benchmark::State& state) {
  const auto g = make_grid_metric(sample_field(CovarianceModel{0.1, 1.0}, GridSpec{128, 8.0}, 1));
  double x = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g->evaluate(Vec2(x, 0.3)));
    x = x > 1.0 ? -1.0 : x + 1e-3;
  }
}
BENCHMARK(BM_MetricEvaluate);

static void BM_Geodesic(benchmark::State& state) {
  const auto g = make_grid_metric(sample_field(CovarianceModel{0.1, 1.0}, GridSpec{128, 8.0}, 1));
  for (auto _ : state) benchmark::DoNotOptimize(integrate(*g, UnitTangentState{}, 2.0, 0.01));
}
BENCHMARK(BM_Geodesic)->Unit(benchmark::kMicrosecond);

static void BM_Dijkstra(benchmark::State& state) {
  const GridSpec grid{static_cast<int>(state.range(0)), 12.8};
  const auto g = make_grid_metric(sample_field(CovarianceModel{0.3, 1.0}, grid, 1));
  for (auto _ : state) benchmark::DoNotOptimize(distance_map(*g, grid, Vec2::Zero(), static_cast<int>(state.range(1))));
}
BENCHMARK(BM_Dijkstra)->Args({128, 1})->Args({128, 3})->Args({256, 3})->Unit(benchmark::kMillisecond);

static void BM_Rho(benchmark::State& state) {
  const auto g = make_grid_metric(sample_field(CovarianceModel{0.1, 1.0}, GridSpec{64, 6.4}, 1));
  for (auto _ : state) benchmark::DoNotOptimize(rho_density(*g, 0.5, 0.01));
}
BENCHMARK(BM_Rho)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
