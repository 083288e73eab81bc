#pragma once

#include <optional>
#include <vector>

#include "soqn/analysis.hpp"

namespace soqn {

/// Steady-state summary over nodes 0..J plus the external queue. Produced by
/// the analytic pipeline and, for small instances, by the brute-force oracle;
/// identical layout so the two can be diffed directly.
struct PerformanceReport {
  StabilityVerdict stability;
  std::vector<double> throughput;    // node 0..J
  std::vector<double> queue_length;  // mean L_j, node 0..J
  std::vector<double> waiting_time;  // mean W_j, node 0..J (pool entry unused)
  std::vector<std::optional<double>> idle_probability;  // constant-rate only
  double p_external_empty = 0.0;
  double l_ex = 0.0;
  double w_ex = 0.0;
  std::optional<double> lambda_lc;  // adjusted rate, analytic path only
  bool external_exact = false;      // external figures exact (J == 1)
};

}  // namespace soqn
