#include <benchmark/benchmark.h>

#include "cascade/martingale.hpp"
#include "cascade/recursion.hpp"
#include "cascade/rng.hpp"
#include "cascade/simulation.hpp"

namespace {

void BM_IterateStep(benchmark::State& state) {
  cascade::RecursionConfig config;
  config.delta = 1.0 / static_cast<double>(state.range(0));
  config.x_max = 50.0;
  config.quadrature = state.range(1) == 0 ? cascade::Quadrature::Trapezoid
                                          : cascade::Quadrature::RightRiemann;
  auto f = cascade::init_p0(config);
  for (auto _ : state) {
    f = cascade::iterate_step(f, config);
    benchmark::DoNotOptimize(f.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.nodes()));
}
BENCHMARK(BM_IterateStep)->ArgsProduct({{100, 1000}, {0, 1}});

void BM_SampleHeight(benchmark::State& state) {
  const double x = static_cast<double>(state.range(0));
  std::uint64_t trial = 0;
  for (auto _ : state) {
    cascade::Rng rng = cascade::substream(1, trial++);
    benchmark::DoNotOptimize(cascade::sample_height(x, rng, 1000, 1'000'000));
  }
}
BENCHMARK(BM_SampleHeight)->Arg(1)->Arg(3)->Arg(6);

void BM_CascadeGraph(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t trial = 0;
  for (auto _ : state) {
    cascade::Rng rng = cascade::substream(2, trial++);
    benchmark::DoNotOptimize(cascade::sample_cascade_graph(n, 2.0 / n, rng));
  }
}
BENCHMARK(BM_CascadeGraph)->Arg(100)->Arg(2000);

void BM_DerivativeMartingale(benchmark::State& state) {
  std::uint64_t trial = 0;
  for (auto _ : state) {
    cascade::Rng rng = cascade::substream(3, trial++);
    benchmark::DoNotOptimize(
        cascade::simulate_derivative_martingale(static_cast<int>(state.range(0)), rng));
  }
}
BENCHMARK(BM_DerivativeMartingale)->Arg(20)->Arg(40);

}  // namespace

BENCHMARK_MAIN();
