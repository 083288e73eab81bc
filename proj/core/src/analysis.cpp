#include "soqn/analysis.hpp"

#include <cmath>

#include "soqn/errors.hpp"
#include "soqn/logspace.hpp"

namespace soqn {

namespace {

struct Prepared {
  SoqnModel model;
  TrafficSolution eta;
  NormConstantTable stb;  // C(0..N) of the inner network
};

std::vector<RateFunction> inner_rates(const SoqnModel& model) {
  std::vector<RateFunction> rates;
  rates.reserve(model.inner.size());
  for (const Node& node : model.inner) rates.push_back(node.rate);
  return rates;
}

Prepared prepare(const SoqnModel& model) {
  Prepared p{validate_model(model), {}, {}};
  p.eta = solve_traffic(p.model.routing);
  p.stb = norm_constants(inner_rates(p.model), p.eta.inner(),
                         p.model.resources);
  return p;
}

// log C_LC(J0, n) = log sum_{n0=0..n} (eta0/lambda_lc)^n0 * C(n - n0).
double log_c_lc(const NormConstantTable& stb, double eta0, int n,
                double lambda_lc) {
  const double step = std::log(eta0) - std::log(lambda_lc);
  double acc = kNegInf;
  for (int n0 = 0; n0 <= n; ++n0) {
    acc = log_add(acc, n0 * step + stb.log_value(n - n0));
  }
  return acc;
}

}  // namespace

double pi_lc_empty(const NormConstantTable& stb, double eta0, int population,
                   double lambda_lc) {
  if (!(lambda_lc > 0.0)) {
    throw ValidationError("lost-customers arrival rate must be positive");
  }
  return std::exp(stb.log_value(population) -
                  log_c_lc(stb, eta0, population, lambda_lc));
}

double lambda_eff(const NormConstantTable& stb, double eta0, int population,
                  double lambda_lc) {
  if (!(lambda_lc > 0.0)) {
    throw ValidationError("lost-customers arrival rate must be positive");
  }
  // lambda_lc * (1 - pi_empty), formed as a ratio of two positive sums so no
  // cancellation occurs when the empty-pool probability approaches 1.
  const double step = std::log(eta0) - std::log(lambda_lc);
  double log_busy = kNegInf;  // terms n0 >= 1
  for (int n0 = 1; n0 <= population; ++n0) {
    log_busy = log_add(log_busy, n0 * step + stb.log_value(population - n0));
  }
  const double log_total = log_add(stb.log_value(population), log_busy);
  return lambda_lc * std::exp(log_busy - log_total);
}

AdjustmentResult adjust_lambda_lc(const NormConstantTable& stb, double eta0,
                                  int population, double lambda_bo,
                                  double rel_tol, int max_iter,
                                  bool rates_non_decreasing) {
  const double lambda_max = eta0 * stb.ratio(population);
  if (!(lambda_bo > 0.0) || !(lambda_bo < lambda_max)) {
    throw UnstableModel(
        "no adjusted rate exists: the accepted-customer rate never exceeds " +
        std::to_string(lambda_max));
  }

  // lambda_eff(x) < x for every x, so the root lies right of lambda_bo.
  double lo = lambda_bo;
  double hi = 2.0 * lambda_bo;
  const double hi_cap = 1e12 * lambda_bo;
  while (lambda_eff(stb, eta0, population, hi) <= lambda_bo) {
    hi *= 2.0;
    if (hi > hi_cap) {
      throw NoConvergence("bracket expansion for the adjusted rate failed",
                          max_iter);
    }
  }

  AdjustmentResult result;
  result.bracket_lo = lo;
  result.bracket_hi = hi;
  result.uniqueness_verified = rates_non_decreasing;
  for (int it = 1; it <= max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double value = lambda_eff(stb, eta0, population, mid);
    const double residual = std::abs(value - lambda_bo);
    if (residual <= rel_tol * lambda_bo) {
      result.lambda_lc = mid;
      result.residual = residual;
      result.iterations = it;
      return result;
    }
    if (value < lambda_bo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw NoConvergence("adjusted-rate bisection did not reach tolerance",
                      max_iter);
}

double lambda_bo_max(const SoqnModel& model) {
  const Prepared p = prepare(model);
  return p.eta.eta0() * p.stb.ratio(p.model.resources);
}

StabilityVerdict is_stable(const SoqnModel& model) {
  StabilityVerdict verdict;
  verdict.lambda_bo_max = lambda_bo_max(model);
  // Strictly below the maximum; the boundary case is unstable.
  verdict.stable = model.arrival_rate < verdict.lambda_bo_max;
  verdict.margin = verdict.lambda_bo_max - model.arrival_rate;
  return verdict;
}

std::vector<double> throughputs_bo(const SoqnModel& model) {
  const Prepared p = prepare(model);
  const double lambda_max = p.eta.eta0() * p.stb.ratio(p.model.resources);
  if (!(p.model.arrival_rate < lambda_max)) {
    throw UnstableModel("throughputs are undefined for an unstable model");
  }
  std::vector<double> th(p.eta.eta.size());
  for (std::size_t j = 0; j < th.size(); ++j) {
    th[j] = p.model.arrival_rate * p.eta.eta[j] / p.eta.eta0();
  }
  return th;
}

double idle_probability_bo(const SoqnModel& model, int node) {
  const Prepared p = prepare(model);
  if (node < 1 || node > p.model.inner_count()) {
    throw UnknownNode(std::to_string(node));
  }
  const RateFunction& rate = p.model.inner[node - 1].rate;
  if (rate.kind() != RateKind::Constant) {
    throw NotConstantRate(node);
  }
  const double lambda_max = p.eta.eta0() * p.stb.ratio(p.model.resources);
  if (!(p.model.arrival_rate < lambda_max)) {
    throw UnstableModel("idle probabilities are undefined for an unstable model");
  }
  return 1.0 - p.model.arrival_rate * (p.eta.eta[node] / p.eta.eta0()) /
                   rate.base_rate();
}

std::vector<std::optional<double>> idle_probabilities_bo(
    const SoqnModel& model) {
  const SoqnModel m = validate_model(model);
  std::vector<std::optional<double>> idle(m.inner_count() + 1);
  for (int j = 1; j <= m.inner_count(); ++j) {
    if (m.inner[j - 1].rate.kind() == RateKind::Constant) {
      idle[j] = idle_probability_bo(m, j);
    }
  }
  return idle;
}

double pi_lc_empty(const SoqnModel& model, double lambda_lc) {
  const Prepared p = prepare(model);
  return pi_lc_empty(p.stb, p.eta.eta0(), p.model.resources, lambda_lc);
}

double lambda_eff(const SoqnModel& model, double lambda_lc) {
  const Prepared p = prepare(model);
  return lambda_eff(p.stb, p.eta.eta0(), p.model.resources, lambda_lc);
}

AdjustmentResult adjust_lambda_lc(const SoqnModel& model, double rel_tol,
                                  int max_iter) {
  const Prepared p = prepare(model);
  return adjust_lambda_lc(p.stb, p.eta.eta0(), p.model.resources,
                          p.model.arrival_rate, rel_tol, max_iter,
                          p.model.rates_non_decreasing());
}

double closed_form_lambda_lc(const SoqnModel& model, double lambda_bo) {
  const Prepared p = prepare(model);
  const int n = p.model.resources;
  if (n != 1 && n != 2) {
    throw UnsupportedResourceCount(n);
  }
  const double eta0 = p.eta.eta0();
  const double lambda_max = eta0 * p.stb.ratio(n);
  if (!(lambda_bo > 0.0) || !(lambda_bo < lambda_max)) {
    throw UnstableModel("closed form requires a stable arrival rate");
  }
  // b(m) = C(N - m); in particular b(N) = C(0) = 1.
  const double b0 = p.stb.value(n);
  if (n == 1) {
    return eta0 * lambda_bo / (eta0 - lambda_bo * b0);
  }
  const double b1 = p.stb.value(n - 1);
  const double lead = eta0 * b1 - lambda_bo * b0;  // positive for stable input
  const double root = std::sqrt((eta0 + lambda_bo * b1) * (eta0 + lambda_bo * b1) -
                                4.0 * lambda_bo * lambda_bo * b0);
  return -eta0 / (2.0 * lead) * (eta0 - lambda_bo * b1 - root);
}

std::vector<double> throughputs_lc(const SoqnModel& model, double lambda_lc) {
  const Prepared p = prepare(model);
  if (!(lambda_lc > 0.0)) {
    throw ValidationError("lost-customers arrival rate must be positive");
  }
  // Resource network of the lost-customers system: the pool is one more
  // constant-rate station.
  std::vector<RateFunction> rates;
  rates.reserve(p.model.inner.size() + 1);
  rates.push_back(RateFunction::constant(lambda_lc));
  for (const Node& node : p.model.inner) rates.push_back(node.rate);
  const NormConstantTable lc =
      norm_constants(rates, p.eta.eta, p.model.resources);
  const double drain = lc.ratio(p.model.resources);
  std::vector<double> th(p.eta.eta.size());
  for (std::size_t j = 0; j < th.size(); ++j) {
    th[j] = p.eta.eta[j] * drain;
  }
  return th;
}

}  // namespace soqn
