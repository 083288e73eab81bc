// Command-line front end: stability checks, steady-state analysis, fleet
// sizing and sweeps, and the discrete-event simulator. Diagnostics go to
// stderr; data goes to stdout or --out. Exit codes: 0 ok, 2 invalid input,
// 3 unstable model, 4 no feasible fleet size.

#include <clocale>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "soqn/analysis.hpp"
#include "soqn/ctmc_oracle.hpp"
#include "soqn/errors.hpp"
#include "soqn/gordon_newell.hpp"
#include "soqn/model_io.hpp"
#include "soqn/reduced.hpp"
#include "soqn/rmfs.hpp"
#include "soqn/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 2;
constexpr int kExitUnstable = 3;
constexpr int kExitNoSolution = 4;

std::string sig(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*g", digits, value);
  return buffer;
}

std::string table_num(double value) { return sig(value, 4); }
std::string csv_num(double value) { return sig(value, 12); }

// "365d", "12h", "30m", "90s" or plain seconds.
double parse_duration(const std::string& text) {
  if (text.empty()) throw soqn::ValidationError("empty duration");
  double scale = 1.0;
  std::string number = text;
  switch (text.back()) {
    case 'd': scale = 86400.0; number.pop_back(); break;
    case 'h': scale = 3600.0; number.pop_back(); break;
    case 'm': scale = 60.0; number.pop_back(); break;
    case 's': scale = 1.0; number.pop_back(); break;
    default: break;
  }
  std::size_t used = 0;
  const double value = std::stod(number, &used);
  if (used != number.size() || !(value > 0.0)) {
    throw soqn::ValidationError("cannot parse duration '" + text + "'");
  }
  return value * scale;
}

double parse_bound(const std::string& text) {
  if (text == "inf" || text == "infinity") {
    return std::numeric_limits<double>::infinity();
  }
  std::size_t used = 0;
  const double value = std::stod(text, &used);
  if (used != text.size()) {
    throw soqn::ValidationError("cannot parse bound '" + text + "'");
  }
  return value;
}

struct CommonOptions {
  std::string model_path;
  std::optional<int> robots;
  double tol = 1e-10;
};

struct SimOptions {
  bool enabled = false;
  std::optional<std::uint64_t> seed;
  std::string horizon_text;
  int replications = 10;
  std::string warmup_text;

  soqn::SimConfig config() const {
    soqn::SimConfig cfg;
    if (!seed) {
      throw soqn::ValidationError("--seed is required with --simulate");
    }
    if (horizon_text.empty()) {
      throw soqn::ValidationError("--horizon is required with --simulate");
    }
    cfg.seed = *seed;
    cfg.horizon = parse_duration(horizon_text);
    cfg.replications = replications;
    if (!warmup_text.empty()) cfg.warmup = parse_duration(warmup_text);
    return cfg;
  }
};

void print_verdict(const soqn::StabilityVerdict& verdict, double lambda_bo) {
  std::cout << "arrival rate      " << csv_num(lambda_bo) << "\n"
            << "lambda_bo_max     " << csv_num(verdict.lambda_bo_max) << "\n"
            << "stable            " << (verdict.stable ? "yes" : "no") << "\n"
            << "margin            " << csv_num(verdict.margin) << "\n";
}

int cmd_stability(const CommonOptions& common) {
  const soqn::ModelFile file = soqn::load_model_file(common.model_path);
  const soqn::SoqnModel model = file.resolve_network(common.robots);
  const soqn::StabilityVerdict verdict = soqn::is_stable(model);
  print_verdict(verdict, model.arrival_rate);
  return verdict.stable ? kExitOk : kExitUnstable;
}

void print_node_table(const soqn::SoqnModel& model,
                      const soqn::PerformanceReport& report) {
  std::printf("%-8s %-10s %12s %12s %12s %10s\n", "node", "kind", "throughput",
              "mean W", "mean L", "idle");
  auto row = [&](const std::string& id, const std::string& kind, int j) {
    const std::string idle =
        report.idle_probability[j] ? table_num(*report.idle_probability[j])
                                   : "-";
    std::printf("%-8s %-10s %12s %12s %12s %10s\n", id.c_str(), kind.c_str(),
                table_num(report.throughput[j]).c_str(),
                j == 0 ? "-" : table_num(report.waiting_time[j]).c_str(),
                table_num(report.queue_length[j]).c_str(), idle.c_str());
  };
  row("pool", "resource", 0);
  for (int j = 1; j <= model.inner_count(); ++j) {
    const soqn::Node& node = model.inner[j - 1];
    const std::string kind =
        node.discipline == soqn::Discipline::FcfsSingleServer ? "fcfs" : "ps";
    row(node.id, kind, j);
  }
}

soqn::PerformanceReport analytic_report(const soqn::SoqnModel& model,
                                        double tol) {
  soqn::PerformanceReport report;
  report.stability = soqn::is_stable(model);
  if (!report.stability.stable) return report;

  report.throughput = soqn::throughputs_bo(model);
  report.idle_probability = soqn::idle_probabilities_bo(model);

  const soqn::AdjustmentResult adjusted = soqn::adjust_lambda_lc(model, tol);
  report.lambda_lc = adjusted.lambda_lc;

  // Waiting times of the adjusted lost-customers resource network.
  const soqn::TrafficSolution eta = soqn::solve_traffic(model.routing);
  std::vector<soqn::RateFunction> rates{
      soqn::RateFunction::constant(adjusted.lambda_lc)};
  for (const soqn::Node& node : model.inner) rates.push_back(node.rate);
  const soqn::MvaResult mva =
      soqn::mva_closed(rates, eta.eta, model.resources);
  report.waiting_time = mva.waiting_time;
  report.queue_length = mva.queue_length;

  const soqn::ExternalQueueReport external =
      soqn::approximate_external(soqn::norton_reduce(model));
  report.p_external_empty = external.p_empty;
  report.l_ex = external.l_ex;
  report.w_ex = external.w_ex;
  report.external_exact = external.exact;
  return report;
}

int cmd_analyze(const CommonOptions& common, bool with_oracle,
                const SimOptions& sim) {
  const soqn::ModelFile file = soqn::load_model_file(common.model_path);
  const soqn::SoqnModel model = file.resolve_network(common.robots);
  if (sim.enabled) sim.config();  // reject bad flags before any output

  const soqn::PerformanceReport report = analytic_report(model, common.tol);
  print_verdict(report.stability, model.arrival_rate);
  if (!report.stability.stable) {
    std::cerr << "model is unstable; steady-state analysis is undefined\n";
    return kExitUnstable;
  }

  std::cout << "\n";
  print_node_table(model, report);
  std::cout << "\nadjusted lambda_lc  " << csv_num(*report.lambda_lc) << "\n"
            << "P(external empty)   " << csv_num(report.p_external_empty)
            << "\n"
            << "external L_ex       " << csv_num(report.l_ex) << "\n"
            << "external W_ex       " << csv_num(report.w_ex) << "\n"
            << "external figures    "
            << (report.external_exact ? "exact (single station)"
                                      : "approximation (no error bounds)")
            << "\n";

  if (file.rmfs) {
    const double inner =
        soqn::w_in(model, *report.lambda_lc, model.resources);
    std::cout << "inner W_in          " << csv_num(inner) << "\n"
              << "task turnover       " << csv_num(report.w_ex + inner)
              << "\n";
    if (file.rmfs->w_alg > 0.0 || file.rmfs->w_assembled > 0.0) {
      std::cout << "order turnover      "
                << csv_num(file.rmfs->w_alg + report.w_ex + inner +
                           file.rmfs->w_assembled)
                << "\n";
    }
  }

  if (with_oracle) {
    const soqn::OracleSolution solution = soqn::solve_truncated(model);
    const soqn::PerformanceReport oracle =
        soqn::oracle_metrics(solution.generator, solution.pi);
    double max_th_delta = 0.0;
    for (std::size_t j = 0; j < report.throughput.size(); ++j) {
      max_th_delta = std::max(
          max_th_delta, std::abs(report.throughput[j] - oracle.throughput[j]));
    }
    std::cout << "\noracle (truncation level "
              << solution.generator.truncation_level() << ", "
              << solution.generator.state_count() << " states)\n"
              << "oracle L_ex         " << csv_num(oracle.l_ex) << "\n"
              << "oracle W_ex         " << csv_num(oracle.w_ex) << "\n"
              << "max |TH delta|      " << csv_num(max_th_delta) << "\n";
  }

  if (sim.enabled) {
    const soqn::SimConfig cfg = sim.config();
    soqn::SimEstimate estimate;
    if (file.rmfs) {
      const std::vector<int> picking{soqn::rmfs_node::p1, soqn::rmfs_node::p2};
      const std::vector<int> replenish{soqn::rmfs_node::r};
      estimate = soqn::simulate_turnover(model, cfg, picking, replenish);
    } else {
      estimate = soqn::simulate(model, cfg);
    }
    std::cout << "\nsimulation (" << cfg.replications << " replications, "
              << csv_num(cfg.horizon) << " time units each)\n"
              << "sim W_ex            " << csv_num(estimate.w_ex.mean)
              << "  (std " << csv_num(estimate.w_ex.std_dev) << ")\n"
              << "sim L_ex            " << csv_num(estimate.l_ex.mean)
              << "  (std " << csv_num(estimate.l_ex.std_dev) << ")\n";
    if (file.rmfs) {
      std::cout << "sim task turnover   " << csv_num(estimate.turnover.mean)
                << "  (std " << csv_num(estimate.turnover.std_dev) << ")\n";
    }
  }
  return kExitOk;
}

int cmd_min_robots(const CommonOptions& common, const std::string& to_max_text,
                   std::optional<int> n_max) {
  const soqn::ModelFile file = soqn::load_model_file(common.model_path);
  if (!file.rmfs) {
    throw soqn::ValidationError("min-robots needs a model file with an rmfs "
                                "parameter block");
  }
  soqn::RmfsParams params = *file.rmfs;
  if (n_max) params.n_max = *n_max;
  const double bound =
      to_max_text.empty() ? params.to_task_max : parse_bound(to_max_text);

  const soqn::RmfsAnalyzer analyzer(params);
  const soqn::SizingReport report =
      analyzer.minimal_robots(bound, common.tol);

  std::cout << "task arrival rate   " << csv_num(report.lambda_bo) << "\n";
  if (report.stable_set.empty()) {
    std::cout << "stable fleet sizes  none up to " << params.n_max << "\n";
  } else {
    std::cout << "stable fleet sizes  " << report.stable_set.front() << ".."
              << report.stable_set.back() << "\n";
  }
  std::cout << "turnover bound      " << csv_num(bound) << "\n\n";
  if (!report.records.empty()) {
    std::printf("%6s %12s %12s %12s %12s %12s\n", "robots", "lambda_max",
                "lambda_lc", "w_ex", "w_in", "to_task");
    for (const soqn::CandidateRecord& record : report.records) {
      if (record.failure) {
        std::printf("%6d %12s %12s\n", record.robots,
                    table_num(record.lambda_max).c_str(),
                    record.failure->c_str());
        continue;
      }
      std::printf("%6d %12s %12s %12s %12s %12s\n", record.robots,
                  table_num(record.lambda_max).c_str(),
                  table_num(record.lambda_lc).c_str(),
                  table_num(record.w_ex).c_str(),
                  table_num(record.w_in).c_str(),
                  table_num(record.to_task).c_str());
    }
    std::cout << "\n";
  }
  if (!report.chosen_n) {
    std::cout << "no solution\n";
    return kExitNoSolution;
  }
  std::cout << "minimal robots      " << *report.chosen_n << "\n";
  return kExitOk;
}

int cmd_sweep(const CommonOptions& common, int n_from, int n_to,
              const std::string& out_path, const SimOptions& sim) {
  const soqn::ModelFile file = soqn::load_model_file(common.model_path);
  if (!file.rmfs) {
    throw soqn::ValidationError("sweep needs a model file with an rmfs "
                                "parameter block");
  }
  if (n_from < 1 || (n_to >= n_from && n_to < 1)) {
    throw soqn::ValidationError("sweep range must start at 1 or above");
  }
  soqn::RmfsParams params = *file.rmfs;
  params.n_max = std::max(params.n_max, n_to);
  const soqn::RmfsAnalyzer analyzer(params);
  const std::optional<soqn::SimConfig> sim_cfg =
      sim.enabled ? std::optional<soqn::SimConfig>(sim.config()) : std::nullopt;

  std::ostringstream csv;
  csv << "n,lambda_max,lambda_lc,w_ex,l_ex,to_task,idle_p1,idle_p2,idle_r";
  if (sim_cfg) csv << ",sim_w_ex,sim_std";
  csv << "\n";

  // The idle probabilities do not depend on the fleet size.
  const soqn::TrafficSolution& eta = analyzer.traffic();
  const double lambda_bo = params.lambda_bo();
  const double idle_p1 =
      1.0 - lambda_bo * eta.eta[soqn::rmfs_node::p1] / params.nu_p1;
  const double idle_p2 =
      1.0 - lambda_bo * eta.eta[soqn::rmfs_node::p2] / params.nu_p2;
  const double idle_r =
      1.0 - lambda_bo * eta.eta[soqn::rmfs_node::r] / params.nu_r;

  for (int robots = n_from; robots <= n_to; ++robots) {
    const soqn::CandidateRecord record = analyzer.evaluate(robots, common.tol);
    csv << robots << "," << csv_num(record.lambda_max) << ",";
    if (record.failure) {
      csv << ",,,,,,";  // lambda_lc..idle_r stay empty
      if (sim_cfg) csv << ",,";
      csv << "\n";
      continue;
    }
    csv << csv_num(record.lambda_lc) << "," << csv_num(record.w_ex) << ","
        << csv_num(record.l_ex) << "," << csv_num(record.to_task) << ","
        << csv_num(idle_p1) << "," << csv_num(idle_p2) << ","
        << csv_num(idle_r);
    if (sim_cfg) {
      const soqn::SimEstimate estimate =
          soqn::simulate(soqn::build_rmfs_model(params, robots), *sim_cfg);
      csv << "," << csv_num(estimate.w_ex.mean) << ","
          << csv_num(estimate.w_ex.std_dev);
    }
    csv << "\n";
  }

  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_path, std::ios::binary);  // '\n' endings as-is
    if (!out) {
      throw soqn::Error("cannot write to " + out_path);
    }
    out << csv.str();
    std::cerr << "wrote " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_simulate(const CommonOptions& common, const SimOptions& sim) {
  const soqn::ModelFile file = soqn::load_model_file(common.model_path);
  const soqn::SoqnModel model = file.resolve_network(common.robots);
  const soqn::SimConfig cfg = sim.config();

  soqn::SimEstimate estimate;
  const bool warehouse = file.rmfs.has_value();
  if (warehouse) {
    const std::vector<int> picking{soqn::rmfs_node::p1, soqn::rmfs_node::p2};
    const std::vector<int> replenish{soqn::rmfs_node::r};
    estimate = soqn::simulate_turnover(model, cfg, picking, replenish);
  } else {
    estimate = soqn::simulate(model, cfg);
  }

  std::cout << "replications        " << estimate.replications << "\n"
            << "horizon             " << csv_num(cfg.horizon) << "\n"
            << "warmup              " << csv_num(cfg.effective_warmup())
            << "\n\n";
  std::printf("%-22s %14s %14s\n", "metric", "mean", "std");
  auto line = [](const char* name, const soqn::MetricEstimate& est) {
    std::printf("%-22s %14s %14s\n", name, csv_num(est.mean).c_str(),
                csv_num(est.std_dev).c_str());
  };
  line("external W_ex", estimate.w_ex);
  line("external L_ex", estimate.l_ex);
  if (warehouse) {
    line("task turnover", estimate.turnover);
    line("wait for picker", estimate.wait_for_picker);
    line("wait for replenisher", estimate.wait_for_replenisher);
  }
  std::cout << "\n";
  std::printf("%-8s %14s %14s %14s\n", "node", "throughput", "th std", "idle");
  std::printf("%-8s %14s %14s %14s\n", "pool",
              csv_num(estimate.throughput[0].mean).c_str(),
              csv_num(estimate.throughput[0].std_dev).c_str(),
              csv_num(estimate.idle[0].mean).c_str());
  for (int j = 1; j <= model.inner_count(); ++j) {
    std::printf("%-8s %14s %14s %14s\n", model.inner[j - 1].id.c_str(),
                csv_num(estimate.throughput[j].mean).c_str(),
                csv_num(estimate.throughput[j].std_dev).c_str(),
                csv_num(estimate.idle[j].mean).c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_NUMERIC, "C");

  CLI::App app{"Semi-open queueing networks with backordering: stability, "
               "steady-state analysis, external-queue approximation, fleet "
               "sizing and simulation"};
  app.require_subcommand(1);

  CommonOptions common;
  SimOptions sim;
  bool with_oracle = false;
  std::string to_max_text;
  std::optional<int> n_max_override;
  int n_from = 1;
  int n_to = 0;
  std::string out_path;

  auto add_common = [&](CLI::App* cmd, bool needs_robots) {
    cmd->add_option("model", common.model_path, "model file (JSON)")
        ->required();
    if (needs_robots) {
      cmd->add_option("--robots", common.robots,
                      "fleet size override (resource count)");
    }
    cmd->add_option("--tol", common.tol,
                    "relative tolerance of the rate adjustment");
  };
  auto add_sim = [&](CLI::App* cmd, bool optional_flag) {
    if (optional_flag) {
      cmd->add_flag("--simulate", sim.enabled, "append simulation estimates");
    }
    cmd->add_option("--seed", sim.seed, "master RNG seed (required)");
    cmd->add_option("--horizon", sim.horizon_text,
                    "simulated time per replication, e.g. 30d or 3600");
    cmd->add_option("--reps", sim.replications, "replication count");
    cmd->add_option("--warmup", sim.warmup_text,
                    "excluded prefix (default: a tenth of the horizon)");
  };

  CLI::App* stability =
      app.add_subcommand("stability", "stability verdict and capacity");
  add_common(stability, true);

  CLI::App* analyze =
      app.add_subcommand("analyze", "steady-state performance report");
  add_common(analyze, true);
  analyze->add_flag("--oracle", with_oracle,
                    "cross-check against the truncated-generator oracle");
  add_sim(analyze, true);

  CLI::App* min_robots =
      app.add_subcommand("min-robots", "smallest fleet meeting the turnover "
                                       "bound");
  add_common(min_robots, false);
  min_robots->add_option("--to-max", to_max_text,
                         "turnover bound in time units, or 'inf'");
  min_robots->add_option("--n-max", n_max_override, "largest fleet to try");

  CLI::App* sweep =
      app.add_subcommand("sweep", "per-fleet-size metrics as CSV");
  add_common(sweep, false);
  sweep->add_option("--n-from", n_from, "first fleet size")->required();
  sweep->add_option("--n-to", n_to, "last fleet size")->required();
  sweep->add_option("--out", out_path, "CSV destination (default stdout)");
  add_sim(sweep, true);

  CLI::App* simulate =
      app.add_subcommand("simulate", "discrete-event simulation estimates");
  add_common(simulate, true);
  add_sim(simulate, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (stability->parsed()) return cmd_stability(common);
    if (analyze->parsed()) return cmd_analyze(common, with_oracle, sim);
    if (min_robots->parsed()) {
      return cmd_min_robots(common, to_max_text, n_max_override);
    }
    if (sweep->parsed()) return cmd_sweep(common, n_from, n_to, out_path, sim);
    if (simulate->parsed()) return cmd_simulate(common, sim);
  } catch (const soqn::UnstableModel& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUnstable;
  } catch (const soqn::ValidationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInvalidInput;
  } catch (const soqn::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return 1;
  }
  return kExitOk;
}
