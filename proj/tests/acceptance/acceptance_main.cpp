// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code 0 only when all
// criteria hold.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "soqn/analysis.hpp"
#include "soqn/ctmc_oracle.hpp"
#include "soqn/gordon_newell.hpp"
#include "soqn/reduced.hpp"
#include "soqn/rmfs.hpp"
#include "soqn/simulator.hpp"
#include "support/random_models.hpp"

#ifndef SOQN_CLI_PATH
#define SOQN_CLI_PATH "soqn"
#endif
#ifndef SOQN_CONFIG_DIR
#define SOQN_CONFIG_DIR "configs"
#endif

namespace {

using namespace soqn;
using namespace soqn::testing;
using Clock = std::chrono::steady_clock;

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult run_command(const std::string& command) {
  CommandResult result;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(
      popen((command + " 2>/dev/null").c_str(), "r"), pclose);
  if (!pipe) return result;
  std::array<char, 4096> buffer{};
  while (fgets(buffer.data(), buffer.size(), pipe.get())) {
    result.output += buffer.data();
  }
  const int status = pclose(pipe.release());
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

RmfsParams warehouse_params() {
  RmfsParams p;
  p.lambda_co = 0.13;
  p.sigma_pod_per_order = 1.0;
  p.mu_sp = 1.0 / 18.4;
  p.mu_pp1 = p.mu_pp2 = p.mu_p1s = p.mu_p2s = p.mu_p1r = p.mu_p2r = p.mu_rs =
      1.0 / 34.5;
  p.nu_p1 = p.nu_p2 = 0.1;
  p.nu_r = 1.0 / 30.0;
  p.n_max = 550;
  return p;
}

int failures = 0;

void report(int number, const std::string& name, bool pass, double seconds,
            const std::string& detail = "") {
  std::printf("[%s] criterion %2d: %s (%.2f s)%s%s\n", pass ? "PASS" : "FAIL",
              number, name.c_str(), seconds,
              detail.empty() ? "" : " - ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// 1. min-robots with an infinite bound returns exactly 18 through the CLI.
void criterion_1() {
  const auto start = Clock::now();
  const std::string command = std::string(SOQN_CLI_PATH) + " min-robots " +
                              SOQN_CONFIG_DIR +
                              "/rmfs_warehouse.json --to-max inf";
  const CommandResult result = run_command(command);
  const double elapsed = seconds_since(start);
  const bool has_answer =
      result.output.find("minimal robots      18") != std::string::npos;
  report(1, "minimal stable fleet is 18",
         result.exit_code == 0 && has_answer && elapsed < 5.0, elapsed,
         "exit " + std::to_string(result.exit_code));
}

// 2. Station idle probabilities at the minimal stable fleet, both from the
// library operation and through the analyze command.
void criterion_2() {
  const auto start = Clock::now();
  const SoqnModel model = build_rmfs_model(warehouse_params(), 18);
  const double p1 = idle_probability_bo(model, rmfs_node::p1);
  const double p2 = idle_probability_bo(model, rmfs_node::p2);
  const double r = idle_probability_bo(model, rmfs_node::r);
  const CommandResult cli = run_command(std::string(SOQN_CLI_PATH) +
                                        " analyze " + SOQN_CONFIG_DIR +
                                        "/rmfs_warehouse.json");
  const bool printed = cli.exit_code == 0 &&
                       cli.output.find("0.35") != std::string::npos &&
                       cli.output.find("0.22") != std::string::npos;
  const double elapsed = seconds_since(start);
  const bool pass = std::abs(p1 - 0.35) <= 0.005 &&
                    std::abs(p2 - 0.35) <= 0.005 &&
                    std::abs(r - 0.22) <= 0.005 && printed && elapsed < 1.0;
  std::ostringstream detail;
  detail << p1 << " / " << p2 << " / " << r;
  report(2, "idle probabilities 0.35 / 0.35 / 0.22", pass, elapsed,
         detail.str());
}

// 3. Zero-load inner time equals the pure transport time of 52.9 s.
void criterion_3() {
  const auto start = Clock::now();
  const SoqnModel model = build_rmfs_model(warehouse_params(), 1);
  const double value = w_in(model, 0.05, 1);
  const bool pass = std::abs(value - 52.9) <= 1e-6 * 52.9;
  std::ostringstream detail;
  detail.precision(10);
  detail << "w_in = " << value << " s = " << value / 3600.0 << " h";
  report(3, "zero-load transport identity 52.9 s", pass,
         seconds_since(start), detail.str());
}

// 4. Single-station backordering: closed form vs. brute-force oracle.
void criterion_4() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240401);
  bool pass = true;
  double worst_state = 0.0, worst_metric = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    const int resources = uniform_int(rng, 1, 5);
    std::vector<double> table(resources);
    for (double& v : table) v = uniform(rng, 0.3, 5.0);
    std::sort(table.begin(), table.end());
    SoqnModel model = cycle_model(RateFunction::table(table), resources, 1.0);
    model.arrival_rate = table.back() * uniform(rng, 0.2, 0.75);

    const OracleSolution sol = solve_truncated(model, 1e-13, 1e-12);
    const ReducedBoDistribution closed =
        reduced_bo_distribution(norton_reduce(model));
    for (std::size_t i = 0; i < sol.generator.state_count(); ++i) {
      const auto counts = sol.generator.counts_of(i);
      const double expected =
          closed.pi(sol.generator.external_of(i), counts[0], counts[1]);
      worst_state = std::max(worst_state, std::abs(sol.pi[i] - expected));
    }
    const PerformanceReport oracle = oracle_metrics(sol.generator, sol.pi);
    const ExternalQueueReport approx =
        approximate_external(norton_reduce(model));
    worst_metric = std::max(
        worst_metric, std::abs(approx.l_ex - oracle.l_ex) /
                          std::max(oracle.l_ex, 1e-300));
    worst_metric = std::max(
        worst_metric, std::abs(approx.w_ex - oracle.w_ex) /
                          std::max(oracle.w_ex, 1e-300));
  }
  pass = worst_state <= 1e-8 && worst_metric <= 1e-8;
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "max state delta " << worst_state << ", max metric rel "
         << worst_metric;
  report(4, "single-station closed form exact vs oracle",
         pass && elapsed < 30.0, elapsed, detail.str());
}

// 5. Oracle confirms the throughput and idle-probability theorems.
void criterion_5() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240402);
  RandomModelOptions opt;
  opt.max_stations = 2;
  opt.max_resources = 4;
  opt.load_hi = 0.8;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const SoqnModel model = random_stable_model(rng, opt);
    const OracleSolution sol = solve_truncated(model);
    const PerformanceReport oracle = oracle_metrics(sol.generator, sol.pi);
    const auto th = throughputs_bo(model);
    for (std::size_t j = 0; j < th.size(); ++j) {
      worst = std::max(worst, std::abs(oracle.throughput[j] - th[j]));
    }
    const auto idle = idle_probabilities_bo(model);
    for (std::size_t j = 1; j < idle.size(); ++j) {
      if (!idle[j]) continue;
      worst = std::max(worst, std::abs(*oracle.idle_probability[j] - *idle[j]));
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "max delta " << worst;
  report(5, "throughput/idle theorems vs oracle", worst <= 1e-6 &&
         elapsed < 120.0, elapsed, detail.str());
}

// 6. Arrival-rate adjustment accuracy and the small-fleet closed forms.
void criterion_6() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240403);
  double worst_residual = 0.0;
  double worst_closed = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    RandomModelOptions opt;
    opt.max_resources = trial < 50 ? 2 : 6;  // half exercise the closed forms
    const SoqnModel model = random_stable_model(rng, opt);
    const AdjustmentResult adjusted = adjust_lambda_lc(model);
    worst_residual = std::max(worst_residual,
                              adjusted.residual / model.arrival_rate);
    if (model.resources <= 2) {
      const double closed = closed_form_lambda_lc(model, model.arrival_rate);
      worst_closed = std::max(worst_closed,
                              std::abs(closed - adjusted.lambda_lc) / closed);
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "max residual rel " << worst_residual << ", closed-form rel "
         << worst_closed;
  report(6, "adjustment to 1e-10 and closed forms to 1e-9",
         worst_residual <= 1e-10 && worst_closed <= 1e-9, elapsed,
         detail.str());
}

// 7. Flow-equivalent reduction is exact for the lost-customers system.
void criterion_7() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240404);
  RandomModelOptions opt;
  opt.max_stations = 4;
  opt.max_resources = 6;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const SoqnModel model = random_stable_model(rng, opt);
    const TrafficSolution eta = solve_traffic(model.routing);
    const ReducedModel reduced = norton_reduce(model);
    std::vector<double> phi_table(reduced.phi.begin() + 1, reduced.phi.end());
    for (int probe = 0; probe < 5; ++probe) {
      const double lambda_lc = uniform(rng, 0.05, 8.0);

      std::vector<RateFunction> full{RateFunction::constant(lambda_lc)};
      for (const Node& node : model.inner) full.push_back(node.rate);
      const NormConstantTable full_table =
          norm_constants(full, eta.eta, model.resources);
      const double th_full = eta.eta0() * full_table.ratio(model.resources);

      const std::vector<RateFunction> small{RateFunction::constant(lambda_lc),
                                            RateFunction::table(phi_table)};
      const std::vector<double> small_eta{eta.eta0(), eta.eta0()};
      const NormConstantTable small_table =
          norm_constants(small, small_eta, model.resources);
      const double th_small = eta.eta0() * small_table.ratio(model.resources);

      worst = std::max(worst, std::abs(th_full - th_small) / th_full);
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "max rel delta " << worst;
  report(7, "flow-equivalent reduction exact to 1e-9", worst <= 1e-9, elapsed,
         detail.str());
}

// 8. Monotonicity: strict isotonicity of the effective rate and the
// single-station profile equivalence.
void criterion_8() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240405);
  RandomModelOptions opt;
  opt.monotone_rates = true;
  bool pass = true;
  for (int pair = 0; pair < 1000; ++pair) {
    const SoqnModel model = random_stable_model(rng, opt);
    const double x = uniform(rng, 1e-2, 10.0);
    const double y = x + uniform(rng, 1e-3, 10.0);
    if (!(lambda_eff(model, x) < lambda_eff(model, y))) {
      pass = false;
      break;
    }
  }
  int equivalence_checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int population = uniform_int(rng, 2, 8);
    std::vector<double> table(population);
    for (double& v : table) v = uniform(rng, 0.1, 10.0);
    if (trial % 2 == 0) std::sort(table.begin(), table.end());
    bool monotone = true;
    for (int m = 1; m < population; ++m) {
      if (table[m] < table[m - 1]) monotone = false;
    }
    const std::vector<RateFunction> rates{RateFunction::table(table)};
    const std::vector<double> eta{uniform(rng, 0.2, 3.0)};
    const auto phi = th0_profile(norm_constants(rates, eta, population), 1.0);
    bool profile_monotone = true;
    for (int m = 2; m <= population; ++m) {
      if (phi[m] < phi[m - 1] * (1.0 - 1e-12)) profile_monotone = false;
    }
    if (profile_monotone != monotone) {
      pass = false;
      break;
    }
    ++equivalence_checked;
  }
  report(8, "monotonicity properties", pass && equivalence_checked == 100,
         seconds_since(start));
}

// 9. Simulation validation of the warehouse approximations at desk scale.
void criterion_9() {
  const auto start = Clock::now();
  const RmfsParams params = warehouse_params();
  const RmfsAnalyzer analyzer(params);
  SimConfig cfg;
  cfg.horizon = 30.0 * 86400.0;
  cfg.replications = 10;
  cfg.seed = 271828;

  const std::vector<int> picking{rmfs_node::p1, rmfs_node::p2};
  const std::vector<int> replenish{rmfs_node::r};

  bool pass = true;
  for (int robots : {26, 30, 40}) {
    const CandidateRecord record = analyzer.evaluate(robots);
    const SoqnModel model = build_rmfs_model(params, robots);
    const SimEstimate sim = simulate(model, cfg);
    const double rel = std::abs(sim.w_ex.mean - record.w_ex) / sim.w_ex.mean;
    const bool ok = rel <= 0.20;
    std::printf("    w_ex  N=%2d: sim %10.4f  approx %10.4f  rel %6.1f%%  %s\n",
                robots, sim.w_ex.mean, record.w_ex, 100.0 * rel,
                ok ? "ok" : "OUT");
    pass = pass && ok;
  }
  for (int robots : {19, 26, 40}) {
    const CandidateRecord record = analyzer.evaluate(robots);
    const SoqnModel model = build_rmfs_model(params, robots);
    const SimEstimate sim = simulate_turnover(model, cfg, picking, replenish);
    const double rel =
        std::abs(sim.turnover.mean - record.to_task) / sim.turnover.mean;
    const bool ok = rel <= 0.05;
    std::printf("    to    N=%2d: sim %10.4f  approx %10.4f  rel %6.1f%%  %s\n",
                robots, sim.turnover.mean, record.to_task, 100.0 * rel,
                ok ? "ok" : "OUT");
    pass = pass && ok;
  }
  const double elapsed = seconds_since(start);
  report(9, "simulation validation (20% w_ex, 5% turnover)",
         pass && elapsed < 600.0, elapsed);
}

// 10. Capacity saturation: past forty robots the gain flattens out.
void criterion_10() {
  const auto start = Clock::now();
  RmfsParams params = warehouse_params();
  params.n_max = 60;
  const RmfsAnalyzer analyzer(params);
  const double ratio = analyzer.phi()[40] / analyzer.phi()[60];
  std::ostringstream detail;
  detail.precision(6);
  detail << "lambda_max(40)/lambda_max(60) = " << ratio;
  report(10, "capacity saturation beyond forty robots", ratio >= 0.98,
         seconds_since(start), detail.str());
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (failures > 0) {
    std::printf("%d criterion/criteria failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
