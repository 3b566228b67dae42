#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

// Problem data for chance-constrained multicommodity capacitated fixed-charge
// network design. Node ids are dense 0-based integers; arc and commodity ids
// are positions in their vectors.
namespace ccnd {

struct Arc {
  int tail = 0;
  int head = 0;
  double capacity = 0.0;
  double fixed_cost = 0.0;
};

struct Commodity {
  int origin = 0;
  int destination = 0;
};

// One demand realization: probability p and one demand value per commodity.
struct Scenario {
  double probability = 0.0;
  Eigen::VectorXd demand;
};

struct Instance {
  int num_nodes = 0;
  std::vector<Arc> arcs;
  std::vector<Commodity> commodities;
  std::vector<Scenario> scenarios;
  // Allowed probability mass of scenarios left unserved.
  double alpha = 0.0;

  int num_arcs() const { return static_cast<int>(arcs.size()); }
  int num_commodities() const { return static_cast<int>(commodities.size()); }
  int num_scenarios() const { return static_cast<int>(scenarios.size()); }
};

// A candidate design: y_a = 1 iff arc a is built, z_s = 1 iff scenario s may
// be left unserved. Stored as 0/1 doubles so they dot directly with cut rows.
struct DesignVector {
  Eigen::VectorXd y;
  Eigen::VectorXd z;
};

// Returns one human-readable string per violated invariant; empty means valid.
// Checked: endpoint ranges, no self-loops, nonnegative capacities and costs,
// origin != destination, demand vector lengths, positive probabilities summing
// to 1 within 1e-9, alpha within [0, 1], and nonempty commodity/scenario sets.
std::vector<std::string> validate(const Instance& inst);

// Arcs usable by commodity k: every (i, j) with j != origin(k) and
// i != destination(k), in ascending arc id order. Throws std::out_of_range on
// an unknown commodity id.
std::vector<int> admissible_arcs(const Instance& inst, int k);

// JSON form:
//   {"nodes": n, "arcs": [[tail, head, capacity, fixed_cost], ...],
//    "commodities": [[origin, destination], ...],
//    "scenarios": [{"p": p, "d": [d_1, ..., d_K]}, ...], "alpha": a}
// parse_instance rejects malformed documents and unknown keys (top level and
// inside scenario objects) with std::runtime_error. serialize_instance is
// deterministic: equal instances produce byte-identical text.
Instance parse_instance(const std::string& json_text);
std::string serialize_instance(const Instance& inst);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

}  // namespace ccnd
