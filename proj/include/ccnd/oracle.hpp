#pragma once

#include <Eigen/Core>
#include <vector>

#include "ccnd/instance.hpp"

// Independent reference implementations used to verify the Benders path.
// Nothing here touches the subproblem or master modules: feasibility is
// decided by max-flow (single commodity) or a fresh feasibility LP, and
// optima come from the extensive form or exhaustive enumeration.
namespace ccnd::oracle {

// True iff design y serves scenario s. Single-commodity instances go through
// Edmonds-Karp max-flow; multicommodity instances solve a fresh routing LP.
bool sp_feasible(const Instance& inst, const Eigen::VectorXd& y, int s);

// Max-flow feasibility for commodity k alone: routable iff the max
// origin->destination flow over built admissible arcs reaches the demand
// (within 1e-9). Only meaningful as a scenario check when |K| = 1.
bool max_flow_feasible(const Instance& inst, const Eigen::VectorXd& y, int s,
                       int k);
double max_flow_value(const Instance& inst, const Eigen::VectorXd& y, int k);

struct DesignResult {
  bool feasible = false;
  double objective = 0.0;
  Eigen::VectorXd y;
  Eigen::VectorXd z;  // z_s = 1 exactly on the scenarios y fails to serve
};

// Deterministic-equivalent MILP: all scenario flows inlined, demand rows
// relaxed by d^k(omega_s) z_s, knapsack over z. Solved exactly by the
// internal branch-and-bound and audited like the master. Throws
// std::domain_error when the row count S*(K*(N-2) + A + K) + 1 exceeds
// `max_rows`.
DesignResult solve_deq(const Instance& inst, int max_rows = 2500);

// Exhaustive scan of all 2^|A| designs (refused above 20 arcs), scoring each
// by fresh per-scenario feasibility checks. Ties keep the lexicographically
// smallest design (arc 0 = least significant bit).
DesignResult brute_force_design(const Instance& inst);

// One origin/destination node partition of a single-commodity instance,
// mapped to its crossing arcs within the admissible set.
struct CutRecord {
  std::vector<int> cut_set;  // ascending arc ids
  double capacity = 0.0;     // sum of u_a * y_a over the cut set
  int cardinality = 0;
};

struct CutEnumeration {
  std::vector<CutRecord> records;  // one per partition, dedup by cut set
  double min_capacity = 0.0;
  double best_snc_ratio = 0.0;  // max (d - capacity) / (cardinality + 1)
  double best_mis_ratio = 0.0;  // max (d - capacity) / cardinality
  std::vector<std::vector<int>> min_capacity_cuts;
  std::vector<std::vector<int>> best_snc_cuts;
  std::vector<std::vector<int>> best_mis_cuts;
};

// Enumerates every partition with the origin on one side and the destination
// on the other (2^(N-2) of them; refused above 20 nodes, |K| must be 1).
// Demand is taken from scenario s.
CutEnumeration enumerate_cuts(const Instance& inst, const Eigen::VectorXd& y,
                              int s);

}  // namespace ccnd::oracle
