#include "ccnd/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ccnd/oracle.hpp"

namespace ccnd {

namespace {

// Hand-rolled mappings from the raw mt19937_64 stream so the drawn values do
// not depend on the standard library's distribution implementations.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t reject_below = (0 - n) % n;  // 2^64 mod n
  std::uint64_t v = rng();
  while (v < reject_below) v = rng();
  return v % n;
}

double draw_range(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + unit * (hi - lo);
}

void check_spec(const GeneratorSpec& spec) {
  const long n = spec.num_nodes;
  if (n < 2) throw std::invalid_argument("generator needs at least 2 nodes");
  if (spec.num_arcs < n || spec.num_arcs > n * (n - 1))
    throw std::invalid_argument(
        "arc count must lie between the node count and all ordered pairs");
  if (spec.num_commodities < 1 || spec.num_commodities > n * (n - 1))
    throw std::invalid_argument("commodity count must fit distinct ordered pairs");
  if (spec.num_scenarios < 1)
    throw std::invalid_argument("need at least one scenario");
  if (!(spec.capacity_ratio > 0.0))
    throw std::invalid_argument("capacity ratio must be positive");
  if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in [0, 1]");
}

}  // namespace

Instance generate_instance(const GeneratorSpec& spec) {
  check_spec(spec);
  std::mt19937_64 rng(spec.seed);
  const int N = spec.num_nodes;
  const int S = spec.num_scenarios;

  Instance inst;
  inst.num_nodes = N;
  inst.alpha = spec.alpha;

  // A directed cycle through a random node order first, so every ordered pair
  // is connected in the all-built network; then distinct extra arcs.
  std::vector<int> perm(N);
  for (int i = 0; i < N; ++i) perm[i] = i;
  for (int i = N - 1; i > 0; --i)
    std::swap(perm[i], perm[draw_below(rng, static_cast<std::uint64_t>(i) + 1)]);

  std::set<std::pair<int, int>> used;
  for (int i = 0; i < N; ++i) {
    const int tail = perm[i];
    const int head = perm[(i + 1) % N];
    used.insert({tail, head});
    inst.arcs.push_back({tail, head, 0.0, 0.0});
  }
  while (static_cast<int>(inst.arcs.size()) < spec.num_arcs) {
    const int tail = static_cast<int>(draw_below(rng, N));
    const int head = static_cast<int>(draw_below(rng, N));
    if (tail == head || !used.insert({tail, head}).second) continue;
    inst.arcs.push_back({tail, head, 0.0, 0.0});
  }
  for (Arc& arc : inst.arcs) {
    arc.capacity = draw_range(rng, 10.0, 50.0);
    arc.fixed_cost = draw_range(rng, 20.0, 100.0);
  }

  std::set<std::pair<int, int>> pairs;
  while (static_cast<int>(inst.commodities.size()) < spec.num_commodities) {
    const int origin = static_cast<int>(draw_below(rng, N));
    const int destination = static_cast<int>(draw_below(rng, N));
    if (origin == destination || !pairs.insert({origin, destination}).second)
      continue;
    inst.commodities.push_back({origin, destination});
  }

  const int need = std::clamp(
      static_cast<int>(std::ceil((1.0 - spec.alpha) * S - 1e-9)), 0, S);
  const Eigen::VectorXd all_built = Eigen::VectorXd::Ones(inst.num_arcs());

  // Demand ranges are scaled per commodity: capacity_ratio of the commodity's
  // fair share of its all-built max flow. That keeps the rejection loop below
  // from starving while still tightening with higher ratios.
  Eigen::VectorXd demand_cap(spec.num_commodities);
  for (int k = 0; k < spec.num_commodities; ++k) {
    const double flow = oracle::max_flow_value(inst, all_built, k);
    demand_cap[k] = spec.capacity_ratio *
                    std::max(1.0, flow / spec.num_commodities);
  }

  for (int attempt = 0; attempt < 100; ++attempt) {
    inst.scenarios.clear();
    for (int s = 0; s < S; ++s) {
      Scenario sc;
      sc.probability = 1.0 / S;
      sc.demand = Eigen::VectorXd::Zero(spec.num_commodities);
      for (int k = 0; k < spec.num_commodities; ++k)
        sc.demand[k] = draw_range(rng, 0.25 * demand_cap[k], demand_cap[k]);
      inst.scenarios.push_back(std::move(sc));
    }
    int servable = 0;
    for (int s = 0; s < S; ++s)
      if (oracle::sp_feasible(inst, all_built, s)) ++servable;
    if (servable >= need) {
      const std::vector<std::string> problems = validate(inst);
      if (!problems.empty())
        throw std::logic_error("generated an invalid instance: " +
                               problems.front());
      return inst;
    }
  }
  throw std::runtime_error(
      "demand calibration failed: the all-built design kept missing the "
      "required scenario count after 100 redraws");
}

}  // namespace ccnd
