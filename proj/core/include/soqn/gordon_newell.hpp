#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "soqn/model.hpp"

namespace soqn {

/// Normalisation constants C(m), m = 0..max_population(), of a closed
/// Gordon-Newell network, stored in log space. A fleet sweep over hundreds of
/// resources spans several hundred orders of magnitude between C(0) = 1 and
/// C(N), so a single shared scale factor cannot hold the whole table;
/// per-entry logs keep every ratio C(m-1)/C(m) scale-free and exact to
/// double precision.
class NormConstantTable {
 public:
  NormConstantTable() = default;
  explicit NormConstantTable(std::vector<double> log_values)
      : log_values_(std::move(log_values)) {}

  int max_population() const noexcept {
    return static_cast<int>(log_values_.size()) - 1;
  }

  double log_value(int m) const { return log_values_[m]; }

  /// C(m) in linear scale; overflows to +inf for extreme populations, use
  /// log_value or ratio there.
  double value(int m) const;

  /// C(m-1)/C(m), m >= 1.
  double ratio(int m) const;

 private:
  std::vector<double> log_values_;
};

/// Load-dependent convolution: C(m) = sum over occupancy vectors summing to m
/// of prod_j prod_{i=1..n_j} (visit_ratios[j] / rates[j](i)), for m = 0 up to
/// `population`.
NormConstantTable norm_constants(std::span<const RateFunction> rates,
                                 std::span<const double> visit_ratios,
                                 int population);

/// Throughput through node 0 of the saturated network as a function of the
/// resource count: phi[0] = 0 and phi[m] = eta0 * C(m-1)/C(m). Independent of
/// any arrival rate by construction.
std::vector<double> th0_profile(const NormConstantTable& table, double eta0);

/// Mean value analysis output for a closed product-form network.
struct MvaResult {
  int population = 0;
  std::vector<double> waiting_time;  // W_j, arrival to service completion
  std::vector<double> queue_length;  // L_j
  std::vector<double> throughput;    // TH_j = TH * visit_ratio_j
};

/// Exact MVA recursion. Constant-rate stations use the arrival-theorem form
/// W = (1 + L(n-1)) / mu, infinite servers short-circuit to W = 1/mu, and
/// table rates run the marginal-probability recursion.
MvaResult mva_closed(std::span<const RateFunction> rates,
                     std::span<const double> visit_ratios,
                     int population);

/// Steady state of the lost-customers modification: the resource network as a
/// closed Gordon-Newell network where the pool is a constant-rate station
/// with rate lambda_lc. States are occupancy vectors (n_0,...,n_J) summing to
/// N, enumerated in lexicographic order.
struct LcDistribution {
  int node_count = 0;               // J + 1
  std::vector<int> states;          // row-major, node_count entries per state
  std::vector<double> probability;  // same order as states
  double log_norm_const = 0.0;      // log C_LC

  std::size_t state_count() const {
    return node_count == 0 ? 0 : states.size() / node_count;
  }
  std::span<const int> state(std::size_t idx) const {
    return {states.data() + idx * node_count,
            static_cast<std::size_t>(node_count)};
  }
};

LcDistribution lc_steady_state(const SoqnModel& model, double lambda_lc,
                               std::size_t max_states = 5'000'000);

}  // namespace soqn
