#include "soqn/ctmc_oracle.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "soqn/analysis.hpp"
#include "soqn/errors.hpp"

namespace soqn {

namespace {

using Triplet = Eigen::Triplet<double>;

// All occupancy vectors of `parts` entries summing to `total`, lexicographic.
std::vector<std::vector<int>> compositions(int total, int parts) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(parts, 0);
  std::function<void(int, int)> emit = [&](int pos, int left) {
    if (pos == parts - 1) {
      current[pos] = left;
      out.push_back(current);
      return;
    }
    for (int n = 0; n <= left; ++n) {
      current[pos] = n;
      emit(pos + 1, left - n);
    }
  };
  emit(0, total);
  return out;
}

}  // namespace

TruncatedGenerator::TruncatedGenerator(
    const SoqnModel& model, int truncation_level, std::vector<long> external,
    std::vector<int> counts, Eigen::SparseMatrix<double, Eigen::RowMajor> rates)
    : model_(model),
      level_(truncation_level),
      width_(model.inner_count() + 1),
      external_(std::move(external)),
      counts_(std::move(counts)),
      rates_(std::move(rates)) {}

TruncatedGenerator build_generator(const SoqnModel& model,
                                   int truncation_level,
                                   std::size_t max_states) {
  const SoqnModel m = validate_model(model);
  if (truncation_level < 1) {
    throw ValidationError("truncation level must be at least 1");
  }
  const int stations = m.inner_count();
  const int width = stations + 1;
  const int n = m.resources;
  const double lambda = m.arrival_rate;

  // Level 0 keeps the pool occupancy; positive levels force an empty pool.
  const auto level0 = compositions(n, width);
  auto saturated = compositions(n, stations);
  for (auto& phase : saturated) phase.insert(phase.begin(), 0);

  const std::size_t total =
      level0.size() + static_cast<std::size_t>(truncation_level) * saturated.size();
  if (total > max_states) {
    throw StateSpaceTooLarge(total, max_states);
  }

  std::vector<long> external;
  std::vector<int> counts;
  external.reserve(total);
  counts.reserve(total * width);
  std::map<std::vector<int>, std::size_t> level0_index;
  std::map<std::vector<int>, std::size_t> saturated_index;

  for (const auto& phase : level0) {
    level0_index.emplace(phase, external.size());
    external.push_back(0);
    counts.insert(counts.end(), phase.begin(), phase.end());
  }
  const std::size_t level_stride = saturated.size();
  const std::size_t first_positive = external.size();
  for (std::size_t rank = 0; rank < saturated.size(); ++rank) {
    saturated_index.emplace(saturated[rank], rank);
  }
  for (int level = 1; level <= truncation_level; ++level) {
    for (const auto& phase : saturated) {
      external.push_back(level);
      counts.insert(counts.end(), phase.begin(), phase.end());
    }
  }

  auto index_of = [&](long level, const std::vector<int>& phase) {
    if (level == 0) return level0_index.at(phase);
    return first_positive + (level - 1) * level_stride +
           saturated_index.at(phase);
  };

  std::vector<Triplet> triplets;
  std::vector<int> phase(width);
  for (std::size_t idx = 0; idx < external.size(); ++idx) {
    const long level = external[idx];
    phase.assign(counts.begin() + idx * width,
                 counts.begin() + (idx + 1) * width);
    double outflow = 0.0;
    auto add = [&](std::size_t to, double rate) {
      if (rate <= 0.0 || to == idx) return;
      triplets.emplace_back(static_cast<int>(idx), static_cast<int>(to), rate);
      outflow += rate;
    };

    if (phase[0] > 0) {
      // An arriving customer seizes a resource and routes from the pool.
      for (int j = 1; j <= stations; ++j) {
        const double p = m.routing(0, j);
        if (p <= 0.0) continue;
        std::vector<int> next = phase;
        --next[0];
        ++next[j];
        add(index_of(0, next), lambda * p);
      }
    } else if (level < truncation_level) {
      // Empty pool: the customer queues up; growth is cut at the top level.
      add(index_of(level + 1, phase), lambda);
    }

    for (int i = 1; i <= stations; ++i) {
      if (phase[i] == 0) continue;
      const double speed = m.inner[i - 1].rate.at(phase[i]);
      for (int j = 1; j <= stations; ++j) {
        if (j == i) continue;  // self-routing leaves the state unchanged
        const double p = m.routing(i, j);
        if (p <= 0.0) continue;
        std::vector<int> next = phase;
        --next[i];
        ++next[j];
        add(index_of(level, next), speed * p);
      }
      const double exit = m.routing(i, 0);
      if (exit <= 0.0) continue;
      if (level == 0) {
        std::vector<int> next = phase;
        --next[i];
        ++next[0];
        add(index_of(0, next), speed * exit);
      } else {
        // The returning resource synchronises with the queue head at once.
        for (int j = 1; j <= stations; ++j) {
          const double p = m.routing(0, j);
          if (p <= 0.0) continue;
          std::vector<int> next = phase;
          --next[i];
          ++next[j];
          add(index_of(level - 1, next), speed * exit * p);
        }
      }
    }
    triplets.emplace_back(static_cast<int>(idx), static_cast<int>(idx),
                          -outflow);
  }

  Eigen::SparseMatrix<double, Eigen::RowMajor> rates(
      static_cast<int>(external.size()), static_cast<int>(external.size()));
  rates.setFromTriplets(triplets.begin(), triplets.end());
  return TruncatedGenerator(m, truncation_level, std::move(external),
                            std::move(counts), std::move(rates));
}

namespace {

double residual_inf_norm(const TruncatedGenerator& gen,
                         const std::vector<double>& pi) {
  const auto& q = gen.rates();
  Eigen::Map<const Eigen::VectorXd> x(pi.data(), pi.size());
  Eigen::VectorXd res = q.transpose() * x;
  return res.lpNorm<Eigen::Infinity>();
}

std::vector<double> normalise_nonnegative(Eigen::VectorXd x) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < 0.0) x(i) = 0.0;  // scrub solver noise
    sum += x(i);
  }
  std::vector<double> pi(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) pi[i] = x(i) / sum;
  return pi;
}

constexpr std::size_t kDirectSolveLimit = 200'000;

}  // namespace

std::vector<double> steady_state(const TruncatedGenerator& gen, double tol) {
  const std::size_t size = gen.state_count();
  const auto& q = gen.rates();

  if (size <= kDirectSolveLimit) {
    // pi Q = 0 with one balance equation swapped for the normalisation.
    std::vector<Triplet> triplets;
    triplets.reserve(q.nonZeros() + size);
    for (int row = 0; row < q.outerSize(); ++row) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
               q, row);
           it; ++it) {
        if (it.col() != 0) {
          triplets.emplace_back(static_cast<int>(it.col()),
                                static_cast<int>(it.row()), it.value());
        }
      }
    }
    for (std::size_t i = 0; i < size; ++i) {
      triplets.emplace_back(0, static_cast<int>(i), 1.0);
    }
    Eigen::SparseMatrix<double> a(static_cast<int>(size),
                                  static_cast<int>(size));
    a.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::VectorXd b = Eigen::VectorXd::Zero(size);
    b(0) = 1.0;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.analyzePattern(a);
    solver.factorize(a);
    if (solver.info() == Eigen::Success) {
      std::vector<double> pi = normalise_nonnegative(solver.solve(b));
      if (residual_inf_norm(gen, pi) <= tol) {
        return pi;
      }
    }
    // fall through to iteration if the factorisation was unusable
  }

  // Uniformised power iteration: pi <- pi (I + Q / c).
  double c = 0.0;
  for (int row = 0; row < q.outerSize(); ++row) {
    c = std::max(c, -q.coeff(row, row));
  }
  c *= 1.05;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(size, 1.0 / size);
  const int max_sweeps = 2'000'000;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    const Eigen::VectorXd flow = q.transpose() * x;
    x += flow / c;
    if (sweep % 64 == 0) {
      x /= x.sum();
      std::vector<double> pi(x.data(), x.data() + x.size());
      if (residual_inf_norm(gen, pi) <= tol) {
        return normalise_nonnegative(x);
      }
    }
  }
  throw NoConvergence("steady-state iteration stalled", max_sweeps);
}

PerformanceReport oracle_metrics(const TruncatedGenerator& gen,
                                 std::span<const double> pi) {
  const SoqnModel& m = gen.model();
  const int stations = m.inner_count();
  const double lambda = m.arrival_rate;

  PerformanceReport report;
  report.stability = is_stable(m);
  report.throughput.assign(stations + 1, 0.0);
  report.queue_length.assign(stations + 1, 0.0);
  report.waiting_time.assign(stations + 1, 0.0);
  report.idle_probability.assign(stations + 1, std::nullopt);

  std::vector<double> empty(stations + 1, 0.0);
  for (std::size_t idx = 0; idx < gen.state_count(); ++idx) {
    const double p = pi[idx];
    const long level = gen.external_of(idx);
    const auto counts = gen.counts_of(idx);

    report.l_ex += p * level;
    if (level == 0) report.p_external_empty += p;
    if (counts[0] > 0) {
      report.throughput[0] += p * lambda;  // direct seizures
    }
    for (int j = 0; j <= stations; ++j) {
      report.queue_length[j] += p * counts[j];
      if (counts[j] == 0) empty[j] += p;
    }
    for (int i = 1; i <= stations; ++i) {
      if (counts[i] == 0) continue;
      const double speed = m.inner[i - 1].rate.at(counts[i]);
      report.throughput[i] += p * speed;
      if (level > 0) {
        // Synchronisations also pass through the pool.
        report.throughput[0] += p * speed * m.routing(i, 0);
      }
    }
  }

  report.w_ex = report.l_ex / lambda;
  for (int j = 0; j <= stations; ++j) {
    report.idle_probability[j] = empty[j];
    if (report.throughput[j] > 0.0) {
      report.waiting_time[j] = report.queue_length[j] / report.throughput[j];
    }
  }
  report.external_exact = false;
  return report;
}

OracleSolution solve_truncated(const SoqnModel& model, double tail_tol,
                               double tol) {
  int level = 16;
  constexpr int kMaxLevel = 1 << 20;
  while (true) {
    TruncatedGenerator gen = build_generator(model, level);
    std::vector<double> pi = steady_state(gen, tol);
    double top_mass = 0.0;
    for (std::size_t idx = 0; idx < gen.state_count(); ++idx) {
      if (gen.external_of(idx) == level) top_mass += pi[idx];
    }
    if (top_mass < tail_tol) {
      return OracleSolution{std::move(gen), std::move(pi)};
    }
    if (level >= kMaxLevel) {
      throw NoConvergence("truncation level kept growing; model too close to "
                          "instability for the oracle",
                          level);
    }
    level *= 2;
  }
}

}  // namespace soqn
