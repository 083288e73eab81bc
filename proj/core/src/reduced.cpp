#include "soqn/reduced.hpp"

#include <cmath>

#include "soqn/analysis.hpp"
#include "soqn/errors.hpp"
#include "soqn/gordon_newell.hpp"
#include "soqn/logspace.hpp"

namespace soqn {

ReducedModel norton_reduce(const SoqnModel& model) {
  const SoqnModel m = validate_model(model);
  const TrafficSolution eta = solve_traffic(m.routing);
  std::vector<RateFunction> rates;
  rates.reserve(m.inner.size());
  for (const Node& node : m.inner) rates.push_back(node.rate);
  const NormConstantTable stb =
      norm_constants(rates, eta.inner(), m.resources);

  ReducedModel reduced;
  reduced.phi = th0_profile(stb, eta.eta0());
  reduced.resources = m.resources;
  reduced.arrival_rate = m.arrival_rate;
  reduced.exact = m.inner_count() == 1;
  return reduced;
}

ReducedBoDistribution::ReducedBoDistribution(
    std::vector<double> log_load_prefix, double log_norm, double tail,
    double arrival_rate)
    : log_load_prefix_(std::move(log_load_prefix)),
      log_norm_(log_norm),
      tail_(tail),
      arrival_rate_(arrival_rate) {}

int ReducedBoDistribution::resources() const noexcept {
  return static_cast<int>(log_load_prefix_.size()) - 1;
}

double ReducedBoDistribution::norm_const() const { return std::exp(log_norm_); }

double ReducedBoDistribution::pi(long external, int pool, int station) const {
  const int n = resources();
  if (station < 0 || station > n || pool < 0 || external < 0) return 0.0;
  if (external == 0) {
    if (pool != n - station) return 0.0;
    return std::exp(log_load_prefix_[station] - log_norm_);
  }
  // A non-empty external queue forces an empty pool and a full station.
  if (pool != 0 || station != n) return 0.0;
  return std::exp(log_load_prefix_[n] + external * std::log(tail_) - log_norm_);
}

double ReducedBoDistribution::p_external(long n_ex) const {
  const int n = resources();
  if (n_ex < 0) return 0.0;
  if (n_ex == 0) {
    double acc = kNegInf;
    for (int n1 = 0; n1 <= n; ++n1) {
      acc = log_add(acc, log_load_prefix_[n1]);
    }
    return std::exp(acc - log_norm_);
  }
  return std::exp(log_load_prefix_[n] + n_ex * std::log(tail_) - log_norm_);
}

double ReducedBoDistribution::p_station(int n1) const {
  const int n = resources();
  if (n1 < 0 || n1 > n) return 0.0;
  if (n1 < n) {
    return std::exp(log_load_prefix_[n1] - log_norm_);
  }
  // Full station: the whole geometric external tail collapses onto it.
  return std::exp(log_load_prefix_[n] - std::log1p(-tail_) - log_norm_);
}

ReducedBoDistribution reduced_bo_distribution(const ReducedModel& reduced) {
  const int n = reduced.resources;
  if (n < 1 || static_cast<int>(reduced.phi.size()) != n + 1) {
    throw ValidationError("reduced model must carry phi(0..N)");
  }
  const double lambda = reduced.arrival_rate;
  const double capacity = reduced.phi[n];
  if (!(lambda > 0.0)) {
    throw ValidationError("arrival rate must be positive");
  }
  if (!(lambda < capacity)) {
    throw UnstableModel("reduced system unstable: arrival rate " +
                        std::to_string(lambda) + " >= phi(N) = " +
                        std::to_string(capacity));
  }

  std::vector<double> prefix(n + 1, 0.0);
  for (int m = 1; m <= n; ++m) {
    prefix[m] = prefix[m - 1] + std::log(lambda) - std::log(reduced.phi[m]);
  }
  const double tail = lambda / capacity;

  double log_head = kNegInf;  // states with at least one idle resource
  for (int m = 0; m <= n - 1; ++m) {
    log_head = log_add(log_head, prefix[m]);
  }
  const double log_full = prefix[n] - std::log1p(-tail);
  const double log_norm = log_add(log_head, log_full);
  return ReducedBoDistribution(std::move(prefix), log_norm, tail, lambda);
}

ExternalQueueReport approximate_external(const ReducedModel& reduced) {
  const ReducedBoDistribution dist = reduced_bo_distribution(reduced);
  const int n = reduced.resources;
  const double lambda = reduced.arrival_rate;
  const double capacity = reduced.phi[n];

  ExternalQueueReport report;
  report.p_empty = dist.p_external(0);
  report.tail = dist.tail_ratio();
  report.l_ex = dist.p_station(n) * lambda / (capacity - lambda);
  report.w_ex = report.l_ex / lambda;
  report.norm_const = dist.norm_const();
  report.exact = reduced.exact;
  return report;
}

}  // namespace soqn
