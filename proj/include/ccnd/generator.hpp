#pragma once

#include <cstdint>

#include "ccnd/instance.hpp"

namespace ccnd {

// Random instance recipe. Arcs always contain a directed cycle through all
// nodes, so the all-built network is strongly connected and every commodity
// has an admissible path. Scenarios are equiprobable. Demands are drawn
// uniformly and redrawn (up to 100 times, then std::runtime_error) until the
// all-built design serves at least ceil((1 - alpha) S) scenarios, so the
// feasible region is never empty. capacity_ratio scales demand against
// capacity: higher means tighter.
struct GeneratorSpec {
  int num_nodes = 10;
  int num_arcs = 60;
  int num_commodities = 10;
  int num_scenarios = 16;
  double capacity_ratio = 1.0;
  double alpha = 0.1;
  std::uint64_t seed = 0;
};

// Pure function of its spec: equal specs give byte-identical serializations.
Instance generate_instance(const GeneratorSpec& spec);

}  // namespace ccnd
