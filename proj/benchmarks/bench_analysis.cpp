#include <benchmark/benchmark.h>

#include "soqn/analysis.hpp"
#include "soqn/gordon_newell.hpp"
#include "soqn/rmfs.hpp"

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

void BM_Convolution(benchmark::State& state) {
  const int population = static_cast<int>(state.range(0));
  const soqn::SoqnModel model = soqn::build_rmfs_model(warehouse(), population);
  const soqn::TrafficSolution eta = soqn::solve_traffic(model.routing);
  std::vector<soqn::RateFunction> rates;
  for (const soqn::Node& node : model.inner) rates.push_back(node.rate);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        soqn::norm_constants(rates, eta.inner(), population));
  }
}
BENCHMARK(BM_Convolution)->Arg(50)->Arg(200)->Arg(550);

void BM_MvaClosed(benchmark::State& state) {
  const int population = static_cast<int>(state.range(0));
  const soqn::SoqnModel model = soqn::build_rmfs_model(warehouse(), population);
  const soqn::TrafficSolution eta = soqn::solve_traffic(model.routing);
  std::vector<soqn::RateFunction> rates{soqn::RateFunction::constant(0.14)};
  for (const soqn::Node& node : model.inner) rates.push_back(node.rate);
  for (auto _ : state) {
    benchmark::DoNotOptimize(soqn::mva_closed(rates, eta.eta, population));
  }
}
BENCHMARK(BM_MvaClosed)->Arg(50)->Arg(550);

void BM_AdjustArrivalRate(benchmark::State& state) {
  const soqn::RmfsAnalyzer analyzer(warehouse());
  const int robots = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(analyzer.evaluate(robots));
  }
}
BENCHMARK(BM_AdjustArrivalRate)->Arg(19)->Arg(100)->Arg(550);

}  // namespace

BENCHMARK_MAIN();
