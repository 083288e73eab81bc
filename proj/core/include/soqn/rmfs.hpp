#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "soqn/analysis.hpp"
#include "soqn/model.hpp"

namespace soqn {

/// Physical parameters of a robotic mobile fulfilment warehouse with two
/// picking stations and one replenishment station. Robots are the resources;
/// pod-delivery tasks are the customers. All rates are events per time unit,
/// all waits in the same time unit.
struct RmfsParams {
  double lambda_co = 0.0;           // customer-order rate
  double sigma_pod_per_order = 1.0; // average pods requested per order
  double w_alg = 0.0;               // pod-matching delay (order turnover only)
  double w_assembled = 0.0;         // picking completion window (ditto)

  // Travel rates of the movement legs (robots do not block each other, so
  // these legs serve every robot in parallel).
  double mu_sp = 0.0;   // storage area to pod
  double mu_pp1 = 0.0;  // pod to picking station 1
  double mu_pp2 = 0.0;  // pod to picking station 2
  double mu_p1s = 0.0;  // picking station 1 back to storage
  double mu_p2s = 0.0;  // picking station 2 back to storage
  double mu_p1r = 0.0;  // picking station 1 to replenishment
  double mu_p2r = 0.0;  // picking station 2 to replenishment
  double mu_rs = 0.0;   // replenishment back to storage

  double nu_p1 = 0.0;  // pick rate, station 1
  double nu_p2 = 0.0;  // pick rate, station 2
  double nu_r = 0.0;   // replenishment rate

  // Routing split: q_pp1 + q_pp2 = 1, q_p1s + q_p1r = 1, q_p2s + q_p2r = 1.
  double q_pp1 = 0.5, q_pp2 = 0.5;
  double q_p1s = 0.8, q_p1r = 0.2;
  double q_p2s = 0.8, q_p2r = 0.2;

  int n_max = 550;  // largest fleet worth considering
  double to_task_max = std::numeric_limits<double>::infinity();

  /// Task arrival rate: every order spawns sigma_pod_per_order pod tasks.
  double lambda_bo() const { return lambda_co * sigma_pod_per_order; }
};

/// Node indices of the model produced by build_rmfs_model (0 = robot pool).
namespace rmfs_node {
inline constexpr int pool = 0;
inline constexpr int sp = 1;
inline constexpr int pp1 = 2;
inline constexpr int pp2 = 3;
inline constexpr int p1 = 4;
inline constexpr int p2 = 5;
inline constexpr int p1s = 6;
inline constexpr int p2s = 7;
inline constexpr int p1r = 8;
inline constexpr int p2r = 9;
inline constexpr int r = 10;
inline constexpr int rs = 11;
inline constexpr int count = 12;
}  // namespace rmfs_node

/// Throws ValidationError when a split does not sum to 1, a rate is not
/// positive, or n_max < 1.
void validate_params(const RmfsParams& params);

/// Builds the 11-station network: movement legs as infinite servers, the
/// picking and replenishment stations as constant-rate FCFS queues, and the
/// fixed warehouse routing.
SoqnModel build_rmfs_model(const RmfsParams& params, int robots);

/// Mean time a task spends in the inner network until picking starts, from
/// the waiting times of the adjusted lost-customers network at the given
/// fleet size:
///   W_sp + q_pp1 * (W_pp1 + W_p1 - 1/nu_p1) + q_pp2 * (W_pp2 + W_p2 - 1/nu_p2).
/// `model` must come from build_rmfs_model.
double w_in(const SoqnModel& model, double lambda_lc, int robots);

/// Task turnover: external-queue wait of the reduced system plus w_in.
double turnover_task(const SoqnModel& model, double lambda_lc, int robots);

struct CandidateRecord {
  int robots = 0;
  double lambda_max = 0.0;
  double lambda_lc = 0.0;
  double w_ex = 0.0;
  double l_ex = 0.0;
  double w_in = 0.0;
  double to_task = 0.0;
  std::optional<std::string> failure;  // adjustment failed; candidate skipped
};

struct SizingReport {
  double lambda_bo = 0.0;
  std::vector<int> stable_set;
  std::optional<int> chosen_n;
  std::vector<CandidateRecord> records;  // candidates evaluated, ascending
};

/// Fleet sizes in 1..n_max that keep the system stable. One convolution pass
/// serves every candidate; with non-decreasing rates (always true here) the
/// set is an up-set and found by binary search for its smallest element.
std::vector<int> stable_robots_set(const RmfsParams& params);

/// Smallest stable fleet whose task turnover stays within to_task_max;
/// empty chosen_n when no candidate qualifies.
SizingReport minimal_robots(const RmfsParams& params, double to_task_max,
                            double rel_tol = 1e-10);

/// Precomputes the traffic solution, the stability table up to n_max and the
/// throughput profile once, then answers per-fleet-size questions cheaply.
class RmfsAnalyzer {
 public:
  explicit RmfsAnalyzer(const RmfsParams& params);

  const RmfsParams& params() const noexcept { return params_; }
  const SoqnModel& model() const noexcept { return model_; }
  const TrafficSolution& traffic() const noexcept { return eta_; }
  const NormConstantTable& stability_table() const noexcept { return stb_; }
  const std::vector<double>& phi() const noexcept { return phi_; }

  std::vector<int> stable_robots_set() const;
  CandidateRecord evaluate(int robots, double rel_tol = 1e-10) const;
  SizingReport minimal_robots(double to_task_max,
                              double rel_tol = 1e-10) const;

 private:
  RmfsParams params_;
  SoqnModel model_;  // built at n_max; population is per-query
  TrafficSolution eta_;
  NormConstantTable stb_;
  std::vector<double> phi_;
};

}  // namespace soqn
