#include <benchmark/benchmark.h>

#include "soqn/rmfs.hpp"
#include "soqn/simulator.hpp"

namespace {

soqn::RmfsParams warehouse() {
  soqn::RmfsParams p;
  p.lambda_co = 0.13;
  p.mu_sp = 1.0 / 18.4;
  p.mu_pp1 = p.mu_pp2 = p.mu_p1s = p.mu_p2s = p.mu_p1r = p.mu_p2r = p.mu_rs =
      1.0 / 34.5;
  p.nu_p1 = p.nu_p2 = 0.1;
  p.nu_r = 1.0 / 30.0;
  return p;
}

// The whole sizing pipeline: convolution to n_max plus the first candidate.
void BM_MinimalRobots(benchmark::State& state) {
  soqn::RmfsParams params = warehouse();
  params.n_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(soqn::minimal_robots(
        params, std::numeric_limits<double>::infinity()));
  }
}
BENCHMARK(BM_MinimalRobots)->Arg(100)->Arg(550)->Unit(benchmark::kMillisecond);

// Worst case of the turnover search: the bound is unreachable, so every
// stable fleet size gets adjusted and evaluated.
void BM_SizingFullScan(benchmark::State& state) {
  soqn::RmfsParams params = warehouse();
  params.n_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(soqn::minimal_robots(params, 1e-9));
  }
}
BENCHMARK(BM_SizingFullScan)->Arg(100)->Arg(550)->Unit(benchmark::kMillisecond);

void BM_SimulateDay(benchmark::State& state) {
  const soqn::SoqnModel model = soqn::build_rmfs_model(warehouse(), 26);
  soqn::SimConfig cfg;
  cfg.horizon = 86400.0;
  cfg.replications = 1;
  cfg.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(soqn::simulate(model, cfg));
  }
}
BENCHMARK(BM_SimulateDay)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
