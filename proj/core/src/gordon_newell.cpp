#include "soqn/gordon_newell.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "soqn/errors.hpp"
#include "soqn/logspace.hpp"

namespace soqn {

namespace {

// log of prod_{i=1..n} (visit / nu(i)) for n = 0..population.
std::vector<double> log_load_prefix(const RateFunction& rate, double visit,
                                    int population) {
  std::vector<double> prefix(population + 1, 0.0);
  const double log_visit = std::log(visit);
  for (int n = 1; n <= population; ++n) {
    prefix[n] = prefix[n - 1] + log_visit - std::log(rate.at(n));
  }
  return prefix;
}

double binomial_approx(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) {
    v *= static_cast<double>(n - k + i) / i;
    if (v > 1e18) return v;  // far past any cap already
  }
  return v;
}

}  // namespace

double NormConstantTable::value(int m) const { return std::exp(log_values_[m]); }

double NormConstantTable::ratio(int m) const {
  return std::exp(log_values_[m - 1] - log_values_[m]);
}

NormConstantTable norm_constants(std::span<const RateFunction> rates,
                                 std::span<const double> visit_ratios,
                                 int population) {
  if (rates.empty() || rates.size() != visit_ratios.size()) {
    throw ValidationError("convolution needs matching rates and visit ratios");
  }
  if (population < 0) {
    throw ValidationError("population must be non-negative");
  }
  for (double v : visit_ratios) {
    if (!(v > 0.0)) throw ValidationError("visit ratios must be positive");
  }

  // Node-by-node convolution in log space.
  std::vector<double> log_g(population + 1, kNegInf);
  log_g[0] = 0.0;  // C(0) = 1, the empty-product convention
  std::vector<double> next(population + 1);
  for (std::size_t k = 0; k < rates.size(); ++k) {
    const std::vector<double> log_f =
        log_load_prefix(rates[k], visit_ratios[k], population);
    for (int m = 0; m <= population; ++m) {
      double acc = kNegInf;
      for (int n = 0; n <= m; ++n) {
        acc = log_add(acc, log_f[n] + log_g[m - n]);
      }
      next[m] = acc;
    }
    log_g = next;
  }
  return NormConstantTable(std::move(log_g));
}

std::vector<double> th0_profile(const NormConstantTable& table, double eta0) {
  const int n = table.max_population();
  std::vector<double> phi(n + 1, 0.0);
  for (int m = 1; m <= n; ++m) {
    phi[m] = eta0 * table.ratio(m);
  }
  return phi;
}

MvaResult mva_closed(std::span<const RateFunction> rates,
                     std::span<const double> visit_ratios,
                     int population) {
  const std::size_t k = rates.size();
  if (k == 0 || k != visit_ratios.size()) {
    throw ValidationError("MVA needs matching rates and visit ratios");
  }
  if (population < 0) {
    throw ValidationError("population must be non-negative");
  }

  MvaResult result;
  result.population = population;
  result.waiting_time.assign(k, 0.0);
  result.queue_length.assign(k, 0.0);
  result.throughput.assign(k, 0.0);
  if (population == 0) return result;

  // Marginal queue-length probabilities, kept only for table-rate stations.
  std::vector<std::vector<double>> marginal(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (rates[j].kind() == RateKind::Table) {
      marginal[j] = {1.0};  // p(0 | population 0) = 1
    }
  }

  std::vector<double> w(k, 0.0);
  std::vector<double> l(k, 0.0);
  double th = 0.0;
  for (int n = 1; n <= population; ++n) {
    for (std::size_t j = 0; j < k; ++j) {
      switch (rates[j].kind()) {
        case RateKind::Constant:
          w[j] = (1.0 + l[j]) / rates[j].base_rate();
          break;
        case RateKind::InfiniteServer:
          w[j] = 1.0 / rates[j].base_rate();
          break;
        case RateKind::Table: {
          double acc = 0.0;
          for (int i = 1; i <= n; ++i) {
            const double p_prev = i - 1 < static_cast<int>(marginal[j].size())
                                      ? marginal[j][i - 1]
                                      : 0.0;
            acc += static_cast<double>(i) / rates[j].at(i) * p_prev;
          }
          w[j] = acc;
          break;
        }
        default:
          throw UnsupportedDiscipline("unsupported rate shape in MVA");
      }
    }
    double cycle = 0.0;
    for (std::size_t j = 0; j < k; ++j) cycle += visit_ratios[j] * w[j];
    th = static_cast<double>(n) / cycle;
    for (std::size_t j = 0; j < k; ++j) l[j] = th * visit_ratios[j] * w[j];

    for (std::size_t j = 0; j < k; ++j) {
      if (rates[j].kind() != RateKind::Table) continue;
      std::vector<double> next(n + 1, 0.0);
      double tail = 0.0;
      for (int i = 1; i <= n; ++i) {
        const double p_prev = i - 1 < static_cast<int>(marginal[j].size())
                                  ? marginal[j][i - 1]
                                  : 0.0;
        next[i] = visit_ratios[j] / rates[j].at(i) * th * p_prev;
        tail += next[i];
      }
      next[0] = std::max(0.0, 1.0 - tail);
      marginal[j] = std::move(next);
    }
  }

  result.waiting_time = std::move(w);
  result.queue_length = std::move(l);
  for (std::size_t j = 0; j < k; ++j) {
    result.throughput[j] = th * visit_ratios[j];
  }
  return result;
}

LcDistribution lc_steady_state(const SoqnModel& model, double lambda_lc,
                               std::size_t max_states) {
  const SoqnModel m = validate_model(model);
  if (!(lambda_lc > 0.0)) {
    throw ValidationError("lost-customers arrival rate must be positive");
  }
  const int stations = m.inner_count();
  const int nodes = stations + 1;
  const int population = m.resources;

  const double approx_count = binomial_approx(population + stations, stations);
  if (approx_count > static_cast<double>(max_states)) {
    throw StateSpaceTooLarge(static_cast<std::size_t>(approx_count), max_states);
  }

  const TrafficSolution eta = solve_traffic(m.routing);
  std::vector<std::vector<double>> prefix(nodes);
  prefix[0].assign(population + 1, 0.0);
  const double log_pool = std::log(eta.eta[0]) - std::log(lambda_lc);
  for (int n = 1; n <= population; ++n) {
    prefix[0][n] = prefix[0][n - 1] + log_pool;
  }
  for (int j = 1; j <= stations; ++j) {
    prefix[j] = log_load_prefix(m.inner[j - 1].rate, eta.eta[j], population);
  }

  LcDistribution dist;
  dist.node_count = nodes;
  std::vector<double> log_weight;
  std::vector<int> current(nodes, 0);

  // Lexicographic enumeration of occupancy vectors summing to the population.
  std::function<void(int, int, double)> emit = [&](int pos, int left,
                                                   double acc) {
    if (pos == nodes - 1) {
      current[pos] = left;
      dist.states.insert(dist.states.end(), current.begin(), current.end());
      log_weight.push_back(acc + prefix[pos][left]);
      return;
    }
    for (int n = 0; n <= left; ++n) {
      current[pos] = n;
      emit(pos + 1, left - n, acc + prefix[pos][n]);
    }
  };
  emit(0, population, 0.0);

  dist.log_norm_const = log_sum(log_weight);
  dist.probability.resize(log_weight.size());
  for (std::size_t i = 0; i < log_weight.size(); ++i) {
    dist.probability[i] = std::exp(log_weight[i] - dist.log_norm_const);
  }
  return dist;
}

}  // namespace soqn
