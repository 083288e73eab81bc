#include "soqn/model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "soqn/errors.hpp"

namespace soqn {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kTrafficResidualTol = 1e-10;

// Strong connectivity via forward and backward reachability from node 0.
// Works because a digraph is strongly connected iff some vertex reaches all
// vertices and is reached by all of them.
bool reaches_all(const RoutingMatrix& r, bool transpose) {
  const int n = r.node_count();
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      const double p = transpose ? r(v, u) : r(u, v);
      if (p > RoutingMatrix::kStructuralZero && !seen[v]) {
        seen[v] = 1;
        ++visited;
        stack.push_back(v);
      }
    }
  }
  return visited == n;
}

}  // namespace

bool is_irreducible(const RoutingMatrix& routing) {
  return reaches_all(routing, false) && reaches_all(routing, true);
}

bool SoqnModel::rates_non_decreasing() const {
  for (const Node& node : inner) {
    if (!node.rate.non_decreasing(resources)) return false;
  }
  return true;
}

SoqnModel validate_model(const SoqnModel& model) {
  const int stations = model.inner_count();
  if (stations < 1) {
    throw ValidationError("a model needs at least one inner station");
  }
  if (model.resources < 1) {
    throw ValidationError("resource count must be at least 1");
  }
  if (!(model.arrival_rate > 0.0)) {
    throw ValidationError("arrival rate must be positive");
  }
  const int nodes = stations + 1;
  if (model.routing.node_count() != nodes) {
    throw ValidationError(
        "routing matrix size does not match the node count (expected " +
        std::to_string(nodes) + ")");
  }

  for (int i = 0; i < nodes; ++i) {
    double sum = 0.0;
    for (int j = 0; j < nodes; ++j) {
      const double p = model.routing(i, j);
      if (p < 0.0 || p > 1.0 || !std::isfinite(p)) {
        throw NonStochasticRow(i, p);
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol) {
      throw NonStochasticRow(i, sum);
    }
  }
  if (model.routing(0, 0) > RoutingMatrix::kStructuralZero) {
    throw ZeroSelfLoopViolated();
  }
  if (!is_irreducible(model.routing)) {
    throw ReducibleRouting();
  }

  SoqnModel canonical = model;
  for (int j = 1; j <= stations; ++j) {
    RateFunction& rate = canonical.inner[j - 1].rate;
    switch (rate.kind()) {
      case RateKind::Constant:
      case RateKind::InfiniteServer:
        if (!(rate.base_rate() > 0.0) || !std::isfinite(rate.base_rate())) {
          throw NonPositiveRate(j, 1);
        }
        break;
      case RateKind::Table: {
        const auto& table = rate.table_rates();
        if (table.size() < static_cast<std::size_t>(model.resources)) {
          throw NonPositiveRate(j, static_cast<int>(table.size()) + 1);
        }
        for (std::size_t n = 0; n < table.size(); ++n) {
          if (!(table[n] > 0.0) || !std::isfinite(table[n])) {
            throw NonPositiveRate(j, static_cast<int>(n) + 1);
          }
        }
        rate.truncate(model.resources);
        break;
      }
    }
  }
  return canonical;
}

TrafficSolution solve_traffic(const RoutingMatrix& routing) {
  if (!is_irreducible(routing)) {
    throw ReducibleRouting();
  }
  const int n = routing.node_count();

  // eta (R - I) = 0 with one balance equation swapped for eta[0] = 1.
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a(i, j) = routing(j, i) - (i == j ? 1.0 : 0.0);
    }
  }
  a.row(0).setZero();
  a(0, 0) = 1.0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(0) = 1.0;

  Eigen::VectorXd x = a.partialPivLu().solve(b);
  if (!x.allFinite() || x(0) == 0.0) {
    throw SingularSystem("traffic equations produced a non-finite solution");
  }

  TrafficSolution solution;
  solution.eta.resize(n);
  for (int i = 0; i < n; ++i) {
    solution.eta[i] = x(i) / x(0);
  }
  solution.eta[0] = 1.0;

  double residual = 0.0;
  for (int j = 0; j < n; ++j) {
    double balance = -solution.eta[j];
    for (int i = 0; i < n; ++i) {
      balance += solution.eta[i] * routing(i, j);
    }
    residual = std::max(residual, std::abs(balance));
    if (!(solution.eta[j] > 0.0)) {
      throw SingularSystem("traffic solution has a non-positive visit ratio");
    }
  }
  if (residual > kTrafficResidualTol) {
    throw SingularSystem("traffic solution residual " +
                         std::to_string(residual) + " exceeds tolerance");
  }
  return solution;
}

RoutingMatrix stability_routing(const RoutingMatrix& routing) {
  const int n = routing.node_count();
  const int stations = n - 1;
  if (stations < 1) {
    throw ValidationError("stability routing needs at least one station");
  }
  // Saturated network: a resource heading for the pool skips it and moves on
  // according to the pool's branching row.
  RoutingMatrix skip(stations);
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      skip(i - 1, j - 1) = routing(i, j) + routing(i, 0) * routing(0, j);
    }
  }
  return skip;
}

}  // namespace soqn
