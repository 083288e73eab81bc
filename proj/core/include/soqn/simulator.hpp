#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "soqn/model.hpp"

namespace soqn {

struct SimConfig {
  double horizon = 0.0;  // simulated time units
  double warmup = -1.0;  // excluded prefix; negative means horizon / 10
  int replications = 1;
  std::uint64_t seed = 0;

  double effective_warmup() const {
    return warmup < 0.0 ? horizon * 0.1 : warmup;
  }
};

struct MetricEstimate {
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation across replications
};

/// Exact per-replication bookkeeping; the flow identity
/// arrivals == departures + in_system_at_end holds exactly and the resource
/// count n_0 + sum n_j == N is checked at every event.
struct ReplicationCounters {
  long long arrivals = 0;
  long long departures = 0;
  long long in_system_at_end = 0;
  bool resource_count_consistent = true;
};

struct SimEstimate {
  int replications = 0;
  MetricEstimate w_ex;  // mean external wait over all admitted customers
  MetricEstimate l_ex;  // time-average external queue length
  std::vector<MetricEstimate> throughput;  // node 0..J
  std::vector<MetricEstimate> idle;        // node 0..J, fraction of time empty
  // Filled by simulate_turnover only:
  MetricEstimate turnover;             // external arrival to start of picking
  MetricEstimate wait_for_picker;      // picking-station arrival to start
  MetricEstimate wait_for_replenisher; // same at the replenishment stations
  std::vector<ReplicationCounters> counters;  // one entry per replication
};

/// Event-driven simulation of the backordering dynamics with exponential
/// clocks: Poisson arrivals, FCFS external queue, instantaneous
/// synchronisation of a returning resource with the customer at the head of
/// the line. Replications run on independent RNG streams split from the
/// master seed, so results are reproducible bit for bit. Unstable models are
/// simulated as-is; their queues simply grow.
SimEstimate simulate(const SoqnModel& model, const SimConfig& cfg);

/// Same trajectory plus per-task tagging: records the time from external
/// arrival until service starts at one of `picking_nodes` (task turnover)
/// and the waiting-time decompositions at the picking and replenishment
/// stations. Picking nodes must be constant-rate FCFS stations (1-based
/// indices); throws UnknownNode otherwise.
SimEstimate simulate_turnover(const SoqnModel& model, const SimConfig& cfg,
                              std::span<const int> picking_nodes,
                              std::span<const int> replenish_nodes = {});

}  // namespace soqn
