#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ccnd/generator.hpp"
#include "ccnd/instance.hpp"
#include "ccnd/oracle.hpp"
#include "test_helpers.hpp"

using namespace ccnd;

TEST_SUITE_BEGIN("generator");

TEST_CASE("same spec twice gives byte-identical instances") {
  GeneratorSpec spec;
  spec.num_nodes = 6;
  spec.num_arcs = 12;
  spec.num_commodities = 3;
  spec.num_scenarios = 4;
  spec.seed = 42;
  const std::string a = serialize_instance(generate_instance(spec));
  const std::string b = serialize_instance(generate_instance(spec));
  CHECK(a == b);
}

TEST_CASE("different seeds give different instances") {
  GeneratorSpec spec;
  spec.num_nodes = 6;
  spec.num_arcs = 12;
  spec.num_commodities = 3;
  spec.num_scenarios = 4;
  spec.seed = 1;
  GeneratorSpec other = spec;
  other.seed = 2;
  CHECK(serialize_instance(generate_instance(spec)) !=
        serialize_instance(generate_instance(other)));
}

TEST_CASE("default spec shape is honored") {
  GeneratorSpec spec;  // 10 nodes, 60 arcs, 10 commodities, 16 scenarios
  spec.seed = 7;
  const Instance inst = generate_instance(spec);
  CHECK(inst.num_nodes == 10);
  CHECK(inst.num_arcs() == 60);
  CHECK(inst.num_commodities() == 10);
  CHECK(inst.num_scenarios() == 16);
  CHECK(validate(inst).empty());
  for (const Scenario& s : inst.scenarios)
    CHECK(s.probability == doctest::Approx(1.0 / 16).epsilon(1e-12));
}

TEST_CASE("every commodity is routable when all arcs are built") {
  GeneratorSpec spec;
  spec.num_nodes = 7;
  spec.num_arcs = 14;
  spec.num_commodities = 4;
  spec.num_scenarios = 5;
  spec.seed = 3;
  const Instance inst = generate_instance(spec);
  const Eigen::VectorXd all = testing::ones(inst.num_arcs());
  for (int k = 0; k < inst.num_commodities(); ++k)
    CHECK(oracle::max_flow_value(inst, all, k) > 0.0);
}

TEST_CASE("the all-built design serves enough scenarios") {
  GeneratorSpec spec;
  spec.num_nodes = 5;
  spec.num_arcs = 10;
  spec.num_commodities = 2;
  spec.num_scenarios = 8;
  spec.alpha = 0.25;
  spec.seed = 11;
  const Instance inst = generate_instance(spec);
  const Eigen::VectorXd all = testing::ones(inst.num_arcs());
  int served = 0;
  for (int s = 0; s < inst.num_scenarios(); ++s)
    if (oracle::sp_feasible(inst, all, s)) ++served;
  const int need = static_cast<int>(std::ceil((1.0 - spec.alpha) * 8 - 1e-9));
  CHECK(served >= need);
}

TEST_CASE("impossible specs are rejected") {
  GeneratorSpec spec;
  SUBCASE("too few nodes") { spec.num_nodes = 1; }
  SUBCASE("fewer arcs than the cycle needs") {
    spec.num_nodes = 5;
    spec.num_arcs = 4;
  }
  SUBCASE("more arcs than ordered pairs") {
    spec.num_nodes = 3;
    spec.num_arcs = 7;
  }
  SUBCASE("no commodities") { spec.num_commodities = 0; }
  SUBCASE("too many commodities") {
    spec.num_nodes = 3;
    spec.num_arcs = 6;
    spec.num_commodities = 7;
  }
  SUBCASE("no scenarios") { spec.num_scenarios = 0; }
  SUBCASE("nonpositive capacity ratio") { spec.capacity_ratio = 0.0; }
  SUBCASE("alpha above one") { spec.alpha = 1.5; }
  CHECK_THROWS_AS(generate_instance(spec), std::invalid_argument);
}

TEST_SUITE_END();
