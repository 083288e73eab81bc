#include "soqn/rmfs.hpp"

#include <algorithm>
#include <cmath>

#include "soqn/errors.hpp"
#include "soqn/gordon_newell.hpp"
#include "soqn/reduced.hpp"

namespace soqn {

namespace {

constexpr double kSplitTol = 1e-12;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(std::string(name) + " must be positive");
  }
}

void require_split(double a, double b, const char* name) {
  if (std::abs(a + b - 1.0) > kSplitTol || a < 0.0 || b < 0.0) {
    throw ValidationError(std::string(name) + " probabilities must sum to 1");
  }
}

void require_rmfs_layout(const SoqnModel& model) {
  if (model.inner_count() + 1 != rmfs_node::count) {
    throw ValidationError("model does not have the warehouse node layout");
  }
}

std::vector<RateFunction> lc_network_rates(const SoqnModel& model,
                                           double lambda_lc) {
  std::vector<RateFunction> rates;
  rates.reserve(model.inner.size() + 1);
  rates.push_back(RateFunction::constant(lambda_lc));
  for (const Node& node : model.inner) rates.push_back(node.rate);
  return rates;
}

}  // namespace

void validate_params(const RmfsParams& params) {
  require_positive(params.lambda_co, "order arrival rate");
  require_positive(params.sigma_pod_per_order, "pods per order");
  if (params.w_alg < 0.0 || params.w_assembled < 0.0) {
    throw ValidationError("matching and assembly delays cannot be negative");
  }
  require_positive(params.mu_sp, "travel rate sp");
  require_positive(params.mu_pp1, "travel rate pp1");
  require_positive(params.mu_pp2, "travel rate pp2");
  require_positive(params.mu_p1s, "travel rate p1s");
  require_positive(params.mu_p2s, "travel rate p2s");
  require_positive(params.mu_p1r, "travel rate p1r");
  require_positive(params.mu_p2r, "travel rate p2r");
  require_positive(params.mu_rs, "travel rate rs");
  require_positive(params.nu_p1, "pick rate p1");
  require_positive(params.nu_p2, "pick rate p2");
  require_positive(params.nu_r, "replenish rate");
  require_split(params.q_pp1, params.q_pp2, "station choice");
  require_split(params.q_p1s, params.q_p1r, "station 1 exit");
  require_split(params.q_p2s, params.q_p2r, "station 2 exit");
  if (params.n_max < 1) {
    throw ValidationError("n_max must be at least 1");
  }
}

SoqnModel build_rmfs_model(const RmfsParams& params, int robots) {
  validate_params(params);
  using namespace rmfs_node;

  SoqnModel model;
  model.resources = robots;
  model.arrival_rate = params.lambda_bo();
  model.inner.resize(count - 1);

  auto travel = [&](int node, const char* id, double mu) {
    model.inner[node - 1] =
        Node{id, Discipline::ProcessorSharing, RateFunction::infinite_server(mu)};
  };
  auto station = [&](int node, const char* id, double nu) {
    model.inner[node - 1] =
        Node{id, Discipline::FcfsSingleServer, RateFunction::constant(nu)};
  };
  travel(sp, "sp", params.mu_sp);
  travel(pp1, "pp1", params.mu_pp1);
  travel(pp2, "pp2", params.mu_pp2);
  station(p1, "p1", params.nu_p1);
  station(p2, "p2", params.nu_p2);
  travel(p1s, "p1s", params.mu_p1s);
  travel(p2s, "p2s", params.mu_p2s);
  travel(p1r, "p1r", params.mu_p1r);
  travel(p2r, "p2r", params.mu_p2r);
  station(r, "r", params.nu_r);
  travel(rs, "rs", params.mu_rs);

  RoutingMatrix routing(count);
  routing(pool, sp) = 1.0;
  routing(sp, pp1) = params.q_pp1;
  routing(sp, pp2) = params.q_pp2;
  routing(pp1, p1) = 1.0;
  routing(pp2, p2) = 1.0;
  routing(p1, p1s) = params.q_p1s;
  routing(p1, p1r) = params.q_p1r;
  routing(p2, p2s) = params.q_p2s;
  routing(p2, p2r) = params.q_p2r;
  routing(p1s, pool) = 1.0;
  routing(p2s, pool) = 1.0;
  routing(p1r, r) = 1.0;
  routing(p2r, r) = 1.0;
  routing(r, rs) = 1.0;
  routing(rs, pool) = 1.0;
  model.routing = routing;

  return validate_model(model);
}

double w_in(const SoqnModel& model, double lambda_lc, int robots) {
  require_rmfs_layout(model);
  if (!(lambda_lc > 0.0)) {
    throw ValidationError("adjusted arrival rate must be positive");
  }
  if (robots < 1) {
    throw ValidationError("fleet size must be at least 1");
  }
  using namespace rmfs_node;

  const TrafficSolution eta = solve_traffic(model.routing);
  const MvaResult mva =
      mva_closed(lc_network_rates(model, lambda_lc), eta.eta, robots);

  // Time in the network up to the start of picking: the full pick service at
  // the chosen station is not part of it, so one mean pick time comes off.
  const double leg1 = mva.waiting_time[pp1] + mva.waiting_time[p1] -
                      1.0 / model.inner[p1 - 1].rate.base_rate();
  const double leg2 = mva.waiting_time[pp2] + mva.waiting_time[p2] -
                      1.0 / model.inner[p2 - 1].rate.base_rate();
  return mva.waiting_time[sp] + model.routing(sp, pp1) * leg1 +
         model.routing(sp, pp2) * leg2;
}

double turnover_task(const SoqnModel& model, double lambda_lc, int robots) {
  require_rmfs_layout(model);
  SoqnModel sized = model;
  sized.resources = robots;
  const ExternalQueueReport external =
      approximate_external(norton_reduce(sized));
  return external.w_ex + w_in(model, lambda_lc, robots);
}

RmfsAnalyzer::RmfsAnalyzer(const RmfsParams& params)
    : params_(params), model_(build_rmfs_model(params, params.n_max)) {
  eta_ = solve_traffic(model_.routing);
  std::vector<RateFunction> rates;
  rates.reserve(model_.inner.size());
  for (const Node& node : model_.inner) rates.push_back(node.rate);
  stb_ = norm_constants(rates, eta_.inner(), params_.n_max);
  phi_ = th0_profile(stb_, eta_.eta0());
}

std::vector<int> RmfsAnalyzer::stable_robots_set() const {
  const double lambda = params_.lambda_bo();
  const int n_max = params_.n_max;
  std::vector<int> feasible;

  if (model_.rates_non_decreasing()) {
    // The throughput profile is non-decreasing, so stability is an up-set:
    // binary search for its smallest member instead of scanning every count.
    int lo = 1, hi = n_max + 1;
    while (lo < hi) {
      const int mid = lo + (hi - lo) / 2;
      if (lambda < phi_[mid]) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    for (int n = lo; n <= n_max; ++n) feasible.push_back(n);
    return feasible;
  }

  for (int n = 1; n <= n_max; ++n) {
    if (lambda < phi_[n]) feasible.push_back(n);
  }
  return feasible;
}

CandidateRecord RmfsAnalyzer::evaluate(int robots, double rel_tol) const {
  using namespace rmfs_node;
  CandidateRecord record;
  record.robots = robots;
  record.lambda_max = phi_[robots];

  const double lambda = params_.lambda_bo();
  if (!(lambda < record.lambda_max)) {
    record.failure = "unstable at this fleet size";
    return record;
  }

  try {
    const AdjustmentResult adjusted =
        adjust_lambda_lc(stb_, eta_.eta0(), robots, lambda, rel_tol, 200,
                         model_.rates_non_decreasing());
    record.lambda_lc = adjusted.lambda_lc;
  } catch (const Error& failure) {
    record.failure = failure.what();
    return record;
  }

  ReducedModel reduced;
  reduced.phi.assign(phi_.begin(), phi_.begin() + robots + 1);
  reduced.resources = robots;
  reduced.arrival_rate = lambda;
  reduced.exact = false;
  const ExternalQueueReport external = approximate_external(reduced);
  record.w_ex = external.w_ex;
  record.l_ex = external.l_ex;
  record.w_in = w_in(model_, record.lambda_lc, robots);
  record.to_task = record.w_ex + record.w_in;
  return record;
}

SizingReport RmfsAnalyzer::minimal_robots(double to_task_max,
                                          double rel_tol) const {
  SizingReport report;
  report.lambda_bo = params_.lambda_bo();
  report.stable_set = stable_robots_set();
  for (int robots : report.stable_set) {
    CandidateRecord record = evaluate(robots, rel_tol);
    const bool ok = !record.failure && record.to_task <= to_task_max;
    report.records.push_back(std::move(record));
    if (ok) {
      report.chosen_n = robots;
      break;
    }
  }
  return report;
}

std::vector<int> stable_robots_set(const RmfsParams& params) {
  return RmfsAnalyzer(params).stable_robots_set();
}

SizingReport minimal_robots(const RmfsParams& params, double to_task_max,
                            double rel_tol) {
  return RmfsAnalyzer(params).minimal_robots(to_task_max, rel_tol);
}

}  // namespace soqn
