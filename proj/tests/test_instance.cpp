#include <doctest.h>

#include <stdexcept>

#include "ccnd/instance.hpp"
#include "test_helpers.hpp"

using namespace ccnd;

TEST_SUITE_BEGIN("instance");

TEST_CASE("valid instance produces no problems") {
  CHECK(validate(testing::make_diamond()).empty());
}

TEST_CASE("validation flags each broken invariant") {
  auto base = testing::make_diamond();

  SUBCASE("arc endpoint out of range") {
    auto inst = base;
    inst.arcs[0].head = 9;
    CHECK_FALSE(validate(inst).empty());
  }
  SUBCASE("self loop") {
    auto inst = base;
    inst.arcs[1].head = inst.arcs[1].tail;
    CHECK_FALSE(validate(inst).empty());
  }
  SUBCASE("negative capacity") {
    auto inst = base;
    inst.arcs[2].capacity = -1.0;
    CHECK_FALSE(validate(inst).empty());
  }
  SUBCASE("negative fixed cost") {
    auto inst = base;
    inst.arcs[2].fixed_cost = -0.5;
    CHECK_FALSE(validate(inst).empty());
  }
  SUBCASE("commodity origin equals destination") {
    auto inst = base;
    inst.commodities[0].destination = inst.commodities[0].origin;
    CHECK_FALSE(validate(inst).empty());
  }
  SUBCASE("demand vector length mismatch") {
    auto inst = base;
    inst.scenarios[0].demand = testing::vec({1.0, 2.0});
    CHECK_FALSE(validate(inst).empty());
  }
  SUBCASE("probabilities must sum to one") {
    auto inst = base;
    inst.scenarios[0].probability = 0.5;
    CHECK_FALSE(validate(inst).empty());
  }
  SUBCASE("nonpositive probability") {
    auto inst = base;
    inst.scenarios[0].probability = 0.0;
    CHECK_FALSE(validate(inst).empty());
  }
  SUBCASE("alpha outside the unit interval") {
    auto inst = base;
    inst.alpha = 1.5;
    CHECK_FALSE(validate(inst).empty());
  }
  SUBCASE("no commodities") {
    auto inst = base;
    inst.commodities.clear();
    inst.scenarios[0].demand = Eigen::VectorXd(0);
    CHECK_FALSE(validate(inst).empty());
  }
  SUBCASE("no scenarios") {
    auto inst = base;
    inst.scenarios.clear();
    CHECK_FALSE(validate(inst).empty());
  }
}

TEST_CASE("serialize then parse round trips byte identically") {
  const auto inst = testing::make_diamond(6.0, 0.25);
  const std::string text = serialize_instance(inst);
  const Instance back = parse_instance(text);
  CHECK(serialize_instance(back) == text);
  CHECK(back.num_nodes == inst.num_nodes);
  CHECK(back.num_arcs() == inst.num_arcs());
  CHECK(back.alpha == inst.alpha);
  CHECK(back.scenarios[0].demand[0] == inst.scenarios[0].demand[0]);
}

TEST_CASE("parser rejects malformed documents") {
  CHECK_THROWS_AS(parse_instance("not json"), std::runtime_error);
  CHECK_THROWS_AS(parse_instance("{}"), std::runtime_error);
  // Unknown top-level key.
  std::string text = serialize_instance(testing::make_diamond());
  text.insert(1, "\"extra\": 1,");
  CHECK_THROWS_AS(parse_instance(text), std::runtime_error);
}

TEST_CASE("parser rejects unknown scenario keys") {
  std::string text = serialize_instance(testing::make_diamond());
  const auto pos = text.find("\"p\":");
  REQUIRE(pos != std::string::npos);
  std::string bad = text;
  bad.insert(pos, "\"q\": 1, ");
  CHECK_THROWS_AS(parse_instance(bad), std::runtime_error);
}

TEST_CASE("admissible arcs drop arcs into the origin and out of the destination") {
  auto inst = testing::make_diamond();
  inst.arcs.push_back({3, 0, 2.0, 1.0});  // out of the destination
  inst.arcs.push_back({1, 0, 2.0, 1.0});  // into the origin
  inst.arcs.push_back({2, 1, 2.0, 1.0});  // stays admissible
  const auto adm = admissible_arcs(inst, 0);
  CHECK(adm == std::vector<int>{0, 1, 2, 3, 6});
  CHECK_THROWS_AS(admissible_arcs(inst, 5), std::out_of_range);
}

TEST_SUITE_END();
