#pragma once

#include <Eigen/SparseCore>
#include <cstddef>
#include <span>
#include <vector>

#include "soqn/model.hpp"
#include "soqn/report.hpp"

namespace soqn {

/// Exact generator of the backordering process with the external queue
/// truncated at level M. Transitions that would push the queue past M are
/// dropped (reflecting truncation), so the chain stays conservative and the
/// bias concentrates in the last level. Serves as the brute-force oracle for
/// every closed-form result on desk-scale instances.
class TruncatedGenerator {
 public:
  TruncatedGenerator(const SoqnModel& model, int truncation_level,
                     std::vector<long> external, std::vector<int> counts,
                     Eigen::SparseMatrix<double, Eigen::RowMajor> rates);

  int truncation_level() const noexcept { return level_; }
  std::size_t state_count() const noexcept { return external_.size(); }

  /// External queue length of state `idx`.
  long external_of(std::size_t idx) const { return external_[idx]; }

  /// Occupancies (n_0, n_1, ..., n_J) of state `idx`.
  std::span<const int> counts_of(std::size_t idx) const {
    const std::size_t width = static_cast<std::size_t>(width_);
    return {counts_.data() + idx * width, width};
  }

  const Eigen::SparseMatrix<double, Eigen::RowMajor>& rates() const {
    return rates_;
  }
  const SoqnModel& model() const noexcept { return model_; }

 private:
  SoqnModel model_;
  int level_;
  int width_;  // J + 1 entries per state
  std::vector<long> external_;
  std::vector<int> counts_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> rates_;
};

/// Enumerates the truncated state space and fills in all five transition
/// families (queue growth, pool seizure, inner movement, return to pool,
/// return synchronised with a waiting customer).
TruncatedGenerator build_generator(const SoqnModel& model, int truncation_level,
                                   std::size_t max_states = 2'000'000);

/// Stationary vector of the truncated chain: pi >= 0, sum(pi) = 1,
/// ||pi Q||_inf <= tol. Direct sparse solve up to 200k states, uniformised
/// power iteration beyond.
std::vector<double> steady_state(const TruncatedGenerator& gen,
                                 double tol = 1e-10);

/// Expectations over the stationary vector: local throughputs, idle
/// probabilities, queue lengths, external queue mean and wait.
PerformanceReport oracle_metrics(const TruncatedGenerator& gen,
                                 std::span<const double> pi);

struct OracleSolution {
  TruncatedGenerator generator;
  std::vector<double> pi;
};

/// Doubles the truncation level starting from 16 until the probability mass
/// on the top level falls below tail_tol.
OracleSolution solve_truncated(const SoqnModel& model, double tail_tol = 1e-10,
                               double tol = 1e-10);

}  // namespace soqn
