#include "soqn/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <random>
#include <vector>

#include "soqn/errors.hpp"

namespace soqn {

namespace {

struct Task {
  double external_arrival = 0.0;
  double node_arrival = 0.0;
  bool turnover_recorded = false;
};

struct StationRuntime {
  std::deque<Task> tasks;
  long long completions = 0;  // counted after warmup
  double empty_time = 0.0;
};

struct RepStats {
  double w_ex_sum = 0.0;
  long long w_ex_count = 0;
  double l_ex_time = 0.0;
  double pool_empty_time = 0.0;
  long long pool_passages = 0;
  std::vector<double> node_empty_time;
  std::vector<long long> completions;
  double turnover_sum = 0.0;
  long long turnover_count = 0;
  double picker_sum = 0.0;
  long long picker_count = 0;
  double replen_sum = 0.0;
  long long replen_count = 0;
  ReplicationCounters counters;
};

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based split: replication k always sees the same stream regardless
// of how many replications run or in which order.
std::uint64_t stream_seed(std::uint64_t master, int replication) {
  std::uint64_t state = master;
  std::uint64_t value = 0;
  for (int i = 0; i <= replication; ++i) value = splitmix64(state);
  return value;
}

int sample_row(const RoutingMatrix& routing, int from, double u) {
  double acc = 0.0;
  int last_positive = -1;
  for (int j = 0; j < routing.node_count(); ++j) {
    const double p = routing(from, j);
    if (p <= 0.0) continue;
    last_positive = j;
    acc += p;
    if (u < acc) return j;
  }
  return last_positive;  // numerical leftovers land on the final branch
}

class Replication {
 public:
  Replication(const SoqnModel& model, const SimConfig& cfg,
              std::uint64_t seed, std::span<const int> picking,
              std::span<const int> replenish)
      : model_(model),
        horizon_(cfg.horizon),
        warmup_(cfg.effective_warmup()),
        rng_(seed),
        stations_(model.inner_count()),
        pool_(model.resources),
        is_picking_(model.inner_count() + 1, false),
        is_replenish_(model.inner_count() + 1, false) {
    for (int j : picking) is_picking_[j] = true;
    for (int j : replenish) is_replenish_[j] = true;
    nodes_.resize(stations_ + 1);
    stats_.node_empty_time.assign(stations_ + 1, 0.0);
    stats_.completions.assign(stations_ + 1, 0);
  }

  RepStats run() {
    double t = 0.0;
    while (true) {
      double total_rate = model_.arrival_rate;
      for (int j = 1; j <= stations_; ++j) {
        const auto& station = nodes_[j];
        if (!station.tasks.empty()) {
          total_rate += model_.inner[j - 1].rate.at(
              static_cast<int>(station.tasks.size()));
        }
      }

      double t_next;
      if (total_rate > 0.0) {
        t_next = t - std::log1p(-uniform_(rng_)) / total_rate;
      } else {
        t_next = std::numeric_limits<double>::infinity();
      }

      accumulate(t, std::min(t_next, horizon_));
      if (t_next > horizon_) break;
      t = t_next;

      double pick = uniform_(rng_) * total_rate;
      if (pick < model_.arrival_rate) {
        on_arrival(t);
      } else {
        pick -= model_.arrival_rate;
        int node = -1;
        for (int j = 1; j <= stations_; ++j) {
          const auto& station = nodes_[j];
          if (station.tasks.empty()) continue;
          const double rate = model_.inner[j - 1].rate.at(
              static_cast<int>(station.tasks.size()));
          node = j;
          if (pick < rate) break;
          pick -= rate;
        }
        if (node > 0) on_completion(node, t);
      }

      long resources = pool_;
      for (int j = 1; j <= stations_; ++j) {
        resources += static_cast<long>(nodes_[j].tasks.size());
      }
      if (resources != model_.resources) {
        stats_.counters.resource_count_consistent = false;
      }
    }

    stats_.counters.in_system_at_end =
        static_cast<long long>(external_.size());
    for (int j = 1; j <= stations_; ++j) {
      stats_.counters.in_system_at_end +=
          static_cast<long long>(nodes_[j].tasks.size());
    }
    return std::move(stats_);
  }

 private:
  void accumulate(double from, double to) {
    const double lo = std::max(from, warmup_);
    const double hi = std::min(to, horizon_);
    if (hi <= lo) return;
    const double weight = hi - lo;
    stats_.l_ex_time += weight * static_cast<double>(external_.size());
    if (pool_ == 0) stats_.pool_empty_time += weight;
    for (int j = 1; j <= stations_; ++j) {
      if (nodes_[j].tasks.empty()) stats_.node_empty_time[j] += weight;
    }
  }

  void on_arrival(double t) {
    ++stats_.counters.arrivals;
    if (pool_ > 0) {
      --pool_;
      if (t >= warmup_) {
        ++stats_.w_ex_count;  // zero wait still counts toward the mean
        ++stats_.pool_passages;
      }
      Task task{t, t, false};
      enter(sample_row(model_.routing, 0, uniform_(rng_)), task, t);
    } else {
      external_.push_back(Task{t, t, false});
    }
  }

  void on_completion(int node, double t) {
    StationRuntime& station = nodes_[node];
    Task task;
    if (model_.inner[node - 1].discipline == Discipline::FcfsSingleServer) {
      task = station.tasks.front();
      station.tasks.pop_front();
      if (!station.tasks.empty()) {
        service_start(node, station.tasks.front(), t);
      }
    } else {
      // Processor sharing: each of the n customers is equally likely to be
      // the one completing.
      const std::size_t idx = static_cast<std::size_t>(
          uniform_(rng_) * static_cast<double>(station.tasks.size()));
      const std::size_t safe = std::min(idx, station.tasks.size() - 1);
      task = station.tasks[safe];
      station.tasks.erase(station.tasks.begin() + safe);
    }
    if (t >= warmup_) ++stats_.completions[node];

    const int dest = sample_row(model_.routing, node, uniform_(rng_));
    if (dest != 0) {
      enter(dest, task, t);
      return;
    }

    ++stats_.counters.departures;
    if (external_.empty()) {
      ++pool_;
      return;
    }
    // Returning resource synchronises with the head of the external queue.
    Task waiting = external_.front();
    external_.pop_front();
    if (t >= warmup_) {
      stats_.w_ex_sum += t - waiting.external_arrival;
      ++stats_.w_ex_count;
      ++stats_.pool_passages;
    }
    Task next{waiting.external_arrival, t, false};
    enter(sample_row(model_.routing, 0, uniform_(rng_)), next, t);
  }

  void enter(int node, Task task, double t) {
    task.node_arrival = t;
    StationRuntime& station = nodes_[node];
    station.tasks.push_back(task);
    if (model_.inner[node - 1].discipline == Discipline::FcfsSingleServer &&
        station.tasks.size() == 1) {
      service_start(node, station.tasks.front(), t);
    }
  }

  void service_start(int node, Task& task, double t) {
    if (is_picking_[node]) {
      if (t >= warmup_) {
        stats_.picker_sum += t - task.node_arrival;
        ++stats_.picker_count;
        if (!task.turnover_recorded) {
          stats_.turnover_sum += t - task.external_arrival;
          ++stats_.turnover_count;
        }
      }
      task.turnover_recorded = true;
    } else if (is_replenish_[node] && t >= warmup_) {
      stats_.replen_sum += t - task.node_arrival;
      ++stats_.replen_count;
    }
  }

  const SoqnModel& model_;
  double horizon_;
  double warmup_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  int stations_;
  long pool_;
  std::vector<char> is_picking_;
  std::vector<char> is_replenish_;
  std::vector<StationRuntime> nodes_;
  std::deque<Task> external_;
  RepStats stats_;
};

MetricEstimate across(const std::vector<double>& values) {
  MetricEstimate est;
  const int n = static_cast<int>(values.size());
  if (n == 0) return est;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / n;
  if (n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - est.mean) * (v - est.mean);
    est.std_dev = std::sqrt(ss / (n - 1));
  }
  return est;
}

SimEstimate run_study(const SoqnModel& model, const SimConfig& cfg,
                      std::span<const int> picking,
                      std::span<const int> replenish) {
  if (!(cfg.horizon > 0.0)) {
    throw ValidationError("simulation horizon must be positive");
  }
  if (cfg.effective_warmup() >= cfg.horizon) {
    throw ValidationError("warmup must be shorter than the horizon");
  }
  if (cfg.replications < 1) {
    throw ValidationError("at least one replication is required");
  }

  // A zero arrival rate is a legal simulation input (nothing ever happens),
  // so structural validation runs with a stand-in rate.
  SoqnModel m = model;
  const double lambda = model.arrival_rate;
  m.arrival_rate = lambda > 0.0 ? lambda : 1.0;
  m = validate_model(m);
  m.arrival_rate = lambda;

  for (int j : picking) {
    if (j < 1 || j > m.inner_count()) throw UnknownNode(std::to_string(j));
    const Node& node = m.inner[j - 1];
    if (node.discipline != Discipline::FcfsSingleServer ||
        node.rate.kind() != RateKind::Constant) {
      throw NotConstantRate(j);
    }
  }
  for (int j : replenish) {
    if (j < 1 || j > m.inner_count()) throw UnknownNode(std::to_string(j));
  }

  const int stations = m.inner_count();
  const double effective = cfg.horizon - cfg.effective_warmup();

  std::vector<RepStats> reps;
  reps.reserve(cfg.replications);
  for (int rep = 0; rep < cfg.replications; ++rep) {
    Replication run(m, cfg, stream_seed(cfg.seed, rep), picking, replenish);
    reps.push_back(run.run());
  }

  SimEstimate estimate;
  estimate.replications = cfg.replications;
  auto collect = [&](auto&& per_rep) {
    std::vector<double> values;
    values.reserve(reps.size());
    for (const RepStats& r : reps) values.push_back(per_rep(r));
    return across(values);
  };

  estimate.w_ex = collect([](const RepStats& r) {
    return r.w_ex_count > 0 ? r.w_ex_sum / r.w_ex_count : 0.0;
  });
  estimate.l_ex =
      collect([&](const RepStats& r) { return r.l_ex_time / effective; });
  estimate.turnover = collect([](const RepStats& r) {
    return r.turnover_count > 0 ? r.turnover_sum / r.turnover_count : 0.0;
  });
  estimate.wait_for_picker = collect([](const RepStats& r) {
    return r.picker_count > 0 ? r.picker_sum / r.picker_count : 0.0;
  });
  estimate.wait_for_replenisher = collect([](const RepStats& r) {
    return r.replen_count > 0 ? r.replen_sum / r.replen_count : 0.0;
  });

  estimate.throughput.resize(stations + 1);
  estimate.idle.resize(stations + 1);
  estimate.throughput[0] = collect(
      [&](const RepStats& r) { return r.pool_passages / effective; });
  estimate.idle[0] = collect(
      [&](const RepStats& r) { return r.pool_empty_time / effective; });
  for (int j = 1; j <= stations; ++j) {
    estimate.throughput[j] = collect(
        [&](const RepStats& r) { return r.completions[j] / effective; });
    estimate.idle[j] = collect(
        [&](const RepStats& r) { return r.node_empty_time[j] / effective; });
  }

  estimate.counters.reserve(reps.size());
  for (const RepStats& r : reps) estimate.counters.push_back(r.counters);
  return estimate;
}

}  // namespace

SimEstimate simulate(const SoqnModel& model, const SimConfig& cfg) {
  return run_study(model, cfg, {}, {});
}

SimEstimate simulate_turnover(const SoqnModel& model, const SimConfig& cfg,
                              std::span<const int> picking_nodes,
                              std::span<const int> replenish_nodes) {
  return run_study(model, cfg, picking_nodes, replenish_nodes);
}

}  // namespace soqn
