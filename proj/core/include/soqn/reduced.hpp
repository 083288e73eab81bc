#pragma once

#include <vector>

#include "soqn/model.hpp"

namespace soqn {

/// Flow-equivalent one-station stand-in for the whole inner network. The
/// composite station serves with load-dependent rate phi(m), the saturated
/// inner-network throughput with m resources; phi(N) equals lambda_bo_max of
/// the source model.
struct ReducedModel {
  std::vector<double> phi;    // phi[0] == 0, phi[1..N]
  int resources = 0;          // N
  double arrival_rate = 0.0;  // lambda_bo
  /// The reduction is exact for single-station sources; for larger inner
  /// networks the external-queue figures derived from it are approximations
  /// without known error bounds.
  bool exact = false;

  double phi_at_capacity() const { return phi[resources]; }
};

ReducedModel norton_reduce(const SoqnModel& model);

/// Closed-form steady state of the reduced backordering system over states
/// (external queue, pool, composite station). Mass sits on
/// (0, N-n1, n1) for n1 <= N and (n_ex, 0, N) for n_ex >= 1, with a geometric
/// external tail of ratio lambda/phi(N).
class ReducedBoDistribution {
 public:
  ReducedBoDistribution(std::vector<double> log_load_prefix, double log_norm,
                        double tail, double arrival_rate);

  /// pi(n_ex, n0, n1); zero for states outside the reachable set.
  double pi(long external, int pool, int station) const;

  /// Marginal P(X_ex = n).
  double p_external(long n) const;

  /// Joint marginal P(pool = N - n1, station = n1).
  double p_station(int n1) const;

  double tail_ratio() const noexcept { return tail_; }
  double log_norm_const() const noexcept { return log_norm_; }
  double norm_const() const;
  int resources() const noexcept;

 private:
  std::vector<double> log_load_prefix_;  // sum_{m=1..n} log(lambda/phi(m))
  double log_norm_;                      // log C_BO({1},N)
  double tail_;                          // lambda / phi(N)
  double arrival_rate_;
};

/// Requires arrival_rate < phi(N); throws UnstableModel otherwise.
ReducedBoDistribution reduced_bo_distribution(const ReducedModel& reduced);

struct ExternalQueueReport {
  double p_empty = 0.0;     // P(X_ex = 0)
  double tail = 0.0;        // geometric tail ratio lambda/phi(N)
  double l_ex = 0.0;        // mean external queue length
  double w_ex = 0.0;        // mean external wait, l_ex / lambda
  double norm_const = 0.0;  // C_BO({1},N)
  bool exact = false;       // carried over from the reduced model
};

ExternalQueueReport approximate_external(const ReducedModel& reduced);

}  // namespace soqn
