// Serial reference vs OpenMP sweep on the closed-form and network backends.
#include <benchmark/benchmark.h>

#include "multicopy/fitkit.hpp"
#include "multicopy/montecarlo.hpp"

namespace {

using namespace multicopy;

montecarlo::SweepConfig bench_config(montecarlo::Backend backend) {
  montecarlo::SweepConfig c;
  c.spec = {.x0 = 0.5, .r0 = 2.0, .sigma_r = 0.5};
  c.arch = ArchitectureSpec::pyramidal();
  c.n_grid = fitkit::log_spaced_grid(10, 1000, 10);
  c.reps = 200;
  c.master_seed = 7;
  c.backend = backend;
  return c;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto c = bench_config(static_cast<montecarlo::Backend>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(montecarlo::run_sweep_serial(c));
}

void BM_SweepOpenMP(benchmark::State& state) {
  const auto c = bench_config(static_cast<montecarlo::Backend>(state.range(0)));
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(montecarlo::run_sweep(c, workers));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepOpenMP)
    ->ArgsProduct({{0, 1}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
