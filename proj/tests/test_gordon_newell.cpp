#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "soqn/errors.hpp"
#include "soqn/gordon_newell.hpp"
#include "soqn/logspace.hpp"
#include "support/random_models.hpp"

using namespace soqn;
using namespace soqn::testing;

namespace {

double log_factorial(int n) {
  double acc = 0.0;
  for (int i = 2; i <= n; ++i) acc += std::log(i);
  return acc;
}

}  // namespace

TEST_CASE("single constant station gives a geometric table") {
  const double nu = 3.0;
  const std::vector<RateFunction> rates{RateFunction::constant(nu)};
  const std::vector<double> eta{1.0};
  const NormConstantTable table = norm_constants(rates, eta, 6);
  CHECK(table.log_value(0) == 0.0);
  for (int m = 1; m <= 6; ++m) {
    CHECK(table.log_value(m) ==
          doctest::Approx(-m * std::log(nu)).epsilon(1e-12));
  }
}

TEST_CASE("two equal constant stations count compositions") {
  const std::vector<RateFunction> rates{RateFunction::constant(1.0),
                                        RateFunction::constant(1.0)};
  const std::vector<double> eta{1.0, 1.0};
  const NormConstantTable table = norm_constants(rates, eta, 5);
  for (int m = 0; m <= 5; ++m) {
    CHECK(table.value(m) == doctest::Approx(m + 1).epsilon(1e-12));
  }
}

TEST_CASE("single infinite server telescopes to a Poisson-like table") {
  const double mu = 2.5;
  const std::vector<RateFunction> rates{RateFunction::infinite_server(mu)};
  const std::vector<double> eta{1.0};
  const NormConstantTable table = norm_constants(rates, eta, 8);
  for (int m = 0; m <= 8; ++m) {
    CHECK(table.log_value(m) ==
          doctest::Approx(-m * std::log(mu) - log_factorial(m)).epsilon(1e-12));
  }
}

TEST_CASE("throughput profile of the reference shapes") {
  SUBCASE("constant station: flat at its rate") {
    const std::vector<RateFunction> rates{RateFunction::constant(4.0)};
    const std::vector<double> eta{1.0};
    const auto phi = th0_profile(norm_constants(rates, eta, 5), 1.0);
    CHECK(phi[0] == 0.0);
    for (int m = 1; m <= 5; ++m) {
      CHECK(phi[m] == doctest::Approx(4.0).epsilon(1e-12));
    }
  }
  SUBCASE("two equal stations: m/(m+1)") {
    const std::vector<RateFunction> rates{RateFunction::constant(1.0),
                                          RateFunction::constant(1.0)};
    const std::vector<double> eta{1.0, 1.0};
    const auto phi = th0_profile(norm_constants(rates, eta, 4), 1.0);
    CHECK(phi[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(phi[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(phi[4] == doctest::Approx(4.0 / 5.0).epsilon(1e-12));
  }
  SUBCASE("infinite server: linear") {
    const std::vector<RateFunction> rates{RateFunction::infinite_server(1.5)};
    const std::vector<double> eta{1.0};
    const auto phi = th0_profile(norm_constants(rates, eta, 5), 1.0);
    for (int m = 1; m <= 5; ++m) {
      CHECK(phi[m] == doctest::Approx(1.5 * m).epsilon(1e-12));
    }
  }
}

TEST_CASE("MVA on the two-node cycle") {
  const std::vector<RateFunction> rates{RateFunction::constant(1.0),
                                        RateFunction::constant(1.0)};
  const std::vector<double> eta{1.0, 1.0};

  SUBCASE("one customer alternates") {
    const MvaResult result = mva_closed(rates, eta, 1);
    CHECK(result.waiting_time[0] == doctest::Approx(1.0));
    CHECK(result.waiting_time[1] == doctest::Approx(1.0));
    CHECK(result.throughput[0] == doctest::Approx(0.5));
  }
  SUBCASE("two customers") {
    const MvaResult result = mva_closed(rates, eta, 2);
    CHECK(result.waiting_time[0] == doctest::Approx(1.5));
    CHECK(result.waiting_time[1] == doctest::Approx(1.5));
    CHECK(result.throughput[0] == doctest::Approx(2.0 / 3.0));
    CHECK(result.queue_length[0] == doctest::Approx(1.0));
    CHECK(result.queue_length[1] == doctest::Approx(1.0));
  }
}

TEST_CASE("MVA satisfies Little's law and the population identity") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int stations = uniform_int(rng, 2, 5);
    const int population = uniform_int(rng, 1, 6);
    std::vector<RateFunction> rates;
    std::vector<double> eta;
    for (int j = 0; j < stations; ++j) {
      rates.push_back(random_rate(rng, population, false));
      eta.push_back(uniform(rng, 0.2, 2.0));
    }
    const MvaResult result = mva_closed(rates, eta, population);
    double total = 0.0;
    for (int j = 0; j < stations; ++j) {
      CHECK(result.queue_length[j] ==
            doctest::Approx(result.throughput[j] * result.waiting_time[j])
                .epsilon(1e-9));
      total += result.queue_length[j];
    }
    CHECK(total == doctest::Approx(population).epsilon(1e-9));
  }
}

TEST_CASE("MVA throughputs agree with normalisation-constant ratios") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int stations = uniform_int(rng, 1, 4);
    const int population = uniform_int(rng, 1, 6);
    std::vector<RateFunction> rates;
    std::vector<double> eta;
    for (int j = 0; j < stations; ++j) {
      rates.push_back(random_rate(rng, population, false));
      eta.push_back(uniform(rng, 0.1, 10.0));
    }
    const MvaResult mva = mva_closed(rates, eta, population);
    const NormConstantTable table = norm_constants(rates, eta, population);
    const double drain = table.ratio(population);
    for (int j = 0; j < stations; ++j) {
      CHECK(mva.throughput[j] ==
            doctest::Approx(eta[j] * drain).epsilon(1e-9));
    }
  }
}

TEST_CASE("non-decreasing rates give a non-decreasing throughput profile") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const int stations = uniform_int(rng, 1, 4);
    const int population = uniform_int(rng, 2, 8);
    std::vector<RateFunction> rates;
    std::vector<double> eta;
    for (int j = 0; j < stations; ++j) {
      rates.push_back(random_rate(rng, population, true));
      eta.push_back(uniform(rng, 0.2, 3.0));
    }
    const auto phi = th0_profile(norm_constants(rates, eta, population), 1.0);
    for (int m = 2; m <= population; ++m) {
      CHECK(phi[m] >= phi[m - 1] - 1e-12 * phi[m - 1]);
    }
  }
}

TEST_CASE("single station: profile monotone iff the rate table is monotone") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int population = uniform_int(rng, 2, 8);
    std::vector<double> table(population);
    for (double& v : table) v = uniform(rng, 0.1, 10.0);
    if (trial % 2 == 0) std::sort(table.begin(), table.end());

    const std::vector<RateFunction> rates{RateFunction::table(table)};
    const std::vector<double> eta{uniform(rng, 0.2, 3.0)};
    const auto phi = th0_profile(norm_constants(rates, eta, population), 1.0);

    bool rate_monotone = true;
    for (int m = 1; m < population; ++m) {
      if (table[m] < table[m - 1]) rate_monotone = false;
    }
    bool profile_monotone = true;
    for (int m = 2; m <= population; ++m) {
      if (phi[m] < phi[m - 1] * (1.0 - 1e-12)) profile_monotone = false;
    }
    CHECK(profile_monotone == rate_monotone);
  }
}

TEST_CASE("lost-customers steady state of the smallest system") {
  const SoqnModel model = cycle_model(RateFunction::constant(2.0), 1, 1.0);
  const LcDistribution dist = lc_steady_state(model, 2.0);
  REQUIRE(dist.state_count() == 2);
  // lexicographic: (0,1) then (1,0)
  CHECK(dist.state(0)[0] == 0);
  CHECK(dist.state(0)[1] == 1);
  CHECK(dist.probability[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dist.probability[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("lost-customers masses are positive and sum to one") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const SoqnModel model = random_stable_model(rng);
    const double lambda_lc = uniform(rng, 0.1, 5.0);
    const LcDistribution dist = lc_steady_state(model, lambda_lc);
    double total = 0.0;
    for (double p : dist.probability) {
      CHECK(p > 0.0);
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("saturated limit concentrates uniformly on empty-pool states") {
  SoqnModel model;
  model.resources = 4;
  model.arrival_rate = 1.0;
  RoutingMatrix routing(3);
  routing(0, 1) = 1.0;
  routing(1, 2) = 1.0;
  routing(2, 0) = 1.0;
  model.routing = routing;
  model.inner.push_back(Node{"a", Discipline::FcfsSingleServer,
                             RateFunction::constant(1.0)});
  model.inner.push_back(Node{"b", Discipline::FcfsSingleServer,
                             RateFunction::constant(1.0)});

  const LcDistribution dist = lc_steady_state(model, 1e9);
  double empty_pool_mass = 0.0;
  std::vector<double> empty_pool_probs;
  for (std::size_t i = 0; i < dist.state_count(); ++i) {
    if (dist.state(i)[0] == 0) {
      empty_pool_mass += dist.probability[i];
      empty_pool_probs.push_back(dist.probability[i]);
    }
  }
  CHECK(empty_pool_mass == doctest::Approx(1.0).epsilon(1e-6));
  for (double p : empty_pool_probs) {
    CHECK(p == doctest::Approx(empty_pool_probs.front()).epsilon(1e-6));
  }
}

TEST_CASE("MVA node-0 throughput equals the lost-customers constant ratio") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const SoqnModel model = random_stable_model(rng);
    const double lambda_lc = uniform(rng, 0.2, 4.0);

    std::vector<RateFunction> rates{RateFunction::constant(lambda_lc)};
    for (const Node& node : model.inner) rates.push_back(node.rate);
    const TrafficSolution eta = solve_traffic(model.routing);
    const MvaResult mva = mva_closed(rates, eta.eta, model.resources);

    const LcDistribution dist = lc_steady_state(model, lambda_lc);
    // ratio C_LC(N-1)/C_LC(N) recovered from one more enumeration
    SoqnModel smaller = model;
    smaller.resources -= 1;
    double log_ratio;
    if (smaller.resources == 0) {
      log_ratio = -dist.log_norm_const;
    } else {
      log_ratio = lc_steady_state(smaller, lambda_lc).log_norm_const -
                  dist.log_norm_const;
    }
    CHECK(mva.throughput[0] ==
          doctest::Approx(eta.eta0() * std::exp(log_ratio)).epsilon(1e-9));
  }
}

TEST_CASE("state-space cap trips") {
  SoqnModel model = cycle_model(RateFunction::constant(2.0), 50, 1.0);
  model.inner.push_back(Node{"s2", Discipline::FcfsSingleServer,
                             RateFunction::constant(2.0)});
  RoutingMatrix routing(3);
  routing(0, 1) = 1.0;
  routing(1, 2) = 1.0;
  routing(2, 0) = 1.0;
  model.routing = routing;
  CHECK_THROWS_AS(lc_steady_state(model, 1.0, 100), StateSpaceTooLarge);
}
