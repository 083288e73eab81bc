#pragma once

#include <span>
#include <string>
#include <vector>

#include "soqn/rate_function.hpp"

namespace soqn {

enum class Discipline { FcfsSingleServer, ProcessorSharing };

/// One station of the inner network.
struct Node {
  std::string id;
  Discipline discipline = Discipline::FcfsSingleServer;
  RateFunction rate = RateFunction::constant(1.0);
};

/// Row-stochastic routing over the node set {0,...,J}. Node 0 is the
/// resource pool; nodes 1..J are the inner stations.
class RoutingMatrix {
 public:
  /// Entries at or below this threshold count as structural zeros when the
  /// support graph is examined.
  static constexpr double kStructuralZero = 1e-15;

  RoutingMatrix() = default;
  explicit RoutingMatrix(int node_count)
      : n_(node_count), p_(static_cast<std::size_t>(node_count) * node_count, 0.0) {}

  int node_count() const noexcept { return n_; }

  double operator()(int from, int to) const {
    return p_[static_cast<std::size_t>(from) * n_ + to];
  }
  double& operator()(int from, int to) {
    return p_[static_cast<std::size_t>(from) * n_ + to];
  }

  std::span<const double> row(int from) const {
    return {p_.data() + static_cast<std::size_t>(from) * n_,
            static_cast<std::size_t>(n_)};
  }

 private:
  int n_ = 0;
  std::vector<double> p_;
};

/// Semi-open queueing network with backordering: Poisson arrivals at rate
/// `arrival_rate`, a pool of `resources` interchangeable resources (node 0),
/// and stations `inner[0..J-1]` (network nodes 1..J) visited according to
/// `routing`. Customers arriving to an empty pool wait in an external FCFS
/// queue until a resource returns.
struct SoqnModel {
  std::vector<Node> inner;   // station j is inner[j-1]
  RoutingMatrix routing;     // (J+1) x (J+1)
  int resources = 1;         // N
  double arrival_rate = 0.0; // lambda_bo

  int inner_count() const noexcept { return static_cast<int>(inner.size()); }

  /// True when every station's rate function is non-decreasing up to the
  /// resource count; several uniqueness and monotonicity results require it.
  bool rates_non_decreasing() const;
};

/// Visit ratios solving eta = eta * R, pinned to eta[0] == 1.
struct TrafficSolution {
  std::vector<double> eta;

  double eta0() const noexcept { return eta[0]; }
  std::span<const double> inner() const {
    return {eta.data() + 1, eta.size() - 1};
  }
};

/// Checks all model invariants (stochastic rows, irreducibility, positive
/// rates, r(0,0) == 0, table lengths) and returns a canonical copy whose rate
/// tables are trimmed to exactly N entries.
SoqnModel validate_model(const SoqnModel& model);

/// Solves the traffic equations eta = eta * R by a dense linear solve with
/// the normalisation eta[0] = 1. Unique for irreducible R.
TrafficSolution solve_traffic(const RoutingMatrix& routing);

/// Routing of the saturated (stability) network over {1..J}: every visit to
/// the pool is skipped, r'(i,j) = r(i,j) + r(i,0) * r(0,j).
RoutingMatrix stability_routing(const RoutingMatrix& routing);

/// Strong connectivity of the support graph (entries above the structural
/// zero threshold).
bool is_irreducible(const RoutingMatrix& routing);

}  // namespace soqn
