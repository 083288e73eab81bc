#include <random>

#include "doctest.h"
#include "soqn/errors.hpp"
#include "soqn/model_io.hpp"
#include "support/random_models.hpp"

using namespace soqn;
using namespace soqn::testing;

namespace {

void check_equal(const SoqnModel& a, const SoqnModel& b) {
  CHECK(a.arrival_rate == b.arrival_rate);
  CHECK(a.resources == b.resources);
  REQUIRE(a.inner_count() == b.inner_count());
  for (int j = 0; j < a.inner_count(); ++j) {
    CHECK(a.inner[j].id == b.inner[j].id);
    CHECK(a.inner[j].discipline == b.inner[j].discipline);
    CHECK(a.inner[j].rate.kind() == b.inner[j].rate.kind());
    CHECK(a.inner[j].rate.base_rate() == b.inner[j].rate.base_rate());
    CHECK(a.inner[j].rate.table_rates() == b.inner[j].rate.table_rates());
  }
  const int nodes = a.inner_count() + 1;
  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < nodes; ++j) {
      CHECK(a.routing(i, j) == b.routing(i, j));
    }
  }
}

}  // namespace

TEST_CASE("serialised models parse back identically") {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 25; ++trial) {
    const SoqnModel model = validate_model(random_stable_model(rng));
    const ModelFile file = parse_model_file(serialize(model));
    REQUIRE(file.network.has_value());
    check_equal(model, *file.network);
  }
}

TEST_CASE("sparse routing with ids parses") {
  const std::string text = R"({
    "schema": 1,
    "arrival_rate": 1.0,
    "resources": 2,
    "nodes": [
      {"id": "hop", "discipline": "processor-sharing",
       "rate": {"kind": "infinite-server", "base_rate": 0.5}},
      {"id": "svc", "discipline": "fcfs-single-server",
       "rate": {"kind": "table", "table": [1.0, 2.0]}}
    ],
    "routing": {"sparse": [
      ["pool", "hop", 1.0],
      ["hop", "svc", 1.0],
      ["svc", "pool", 1.0]
    ]}
  })";
  const ModelFile file = parse_model_file(text);
  REQUIRE(file.network.has_value());
  CHECK(file.network->inner[0].id == "hop");
  CHECK(file.network->routing(0, 1) == 1.0);
  CHECK(file.network->routing(2, 0) == 1.0);
}

TEST_CASE("diagnostics for malformed input") {
  CHECK_THROWS_AS(parse_model_file("not json"), ValidationError);
  CHECK_THROWS_AS(parse_model_file("{}"), ValidationError);
  CHECK_THROWS_AS(parse_model_file(R"({"schema": 2, "nodes": []})"),
                  ValidationError);

  // stochasticity violations surface as typed validation errors
  const std::string bad_row = R"({
    "schema": 1, "arrival_rate": 1.0, "resources": 1,
    "nodes": [{"id": "s", "discipline": "fcfs-single-server",
               "rate": {"kind": "constant", "base_rate": 2.0}}],
    "routing": {"dense": [[0.0, 1.0], [0.99, 0.0]]}
  })";
  CHECK_THROWS_AS(parse_model_file(bad_row), NonStochasticRow);
}

TEST_CASE("warehouse files resolve to sized networks") {
  RmfsParams params;
  params.lambda_co = 0.13;
  params.mu_sp = 1.0 / 18.4;
  params.mu_pp1 = params.mu_pp2 = params.mu_p1s = params.mu_p2s =
      params.mu_p1r = params.mu_p2r = params.mu_rs = 1.0 / 34.5;
  params.nu_p1 = params.nu_p2 = 0.1;
  params.nu_r = 1.0 / 30.0;
  const std::string text = serialize(params);

  ModelFile file = parse_model_file(text);
  REQUIRE(file.rmfs.has_value());
  CHECK(file.rmfs->lambda_bo() == doctest::Approx(0.13));
  CHECK(file.rmfs->mu_sp == doctest::Approx(1.0 / 18.4));

  CHECK_THROWS_AS(file.resolve_network(), ValidationError);  // no fleet size
  const SoqnModel sized = file.resolve_network(18);
  CHECK(sized.resources == 18);
  CHECK(sized.inner_count() == 11);
}
