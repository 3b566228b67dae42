#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccnd/instance.hpp"
#include "ccnd/lp.hpp"
#include "ccnd/subproblem.hpp"

// Benders master problem: choose arcs y and scenario exemptions z minimizing
// build cost subject to the knapsack  sum_s p_s z_s <= alpha  and the
// feasibility cuts separated from the subproblems.
namespace ccnd::master {

enum class Strategy : std::uint8_t { SingleTree, Iterative };
enum class Status : std::uint8_t { Optimal, Infeasible, TimeLimit };

const char* to_string(Strategy s);
const char* to_string(Status s);

struct SolveOptions {
  sub::Formulation formulation = sub::Formulation::FlowMIS;
  Strategy strategy = Strategy::SingleTree;
  bool use_vis = true;     // add the marginal-demand flow block
  bool use_metric = false; // metric-strengthen every derived cut
  double time_limit_s = 60.0;
  long node_limit = std::numeric_limits<long>::max();
  unsigned long seed = 0;  // recorded in logs; the solve itself is deterministic
  std::ostream* log = nullptr;        // solver progress lines
  std::ostream* cut_trace = nullptr;  // one line per derived cut
};

// Exact marginal demand of commodity k: the smallest expected served demand
//   min_z sum_s d^k(omega_s) p_s (1 - z_s)  s.t.  sum_s p_s z_s <= alpha,
// z binary. Equiprobable scenarios take the closed form (sort demands
// ascending, keep the first ceil((1-alpha) S), divide by S); anything else is
// solved as an exact knapsack. Both paths evaluate the kept set with the same
// summation so they agree exactly on equiprobable data.
double compute_marginal_demand(const Instance& inst, int k);
double marginal_demand_closed_form(const Instance& inst, int k);
double marginal_demand_knapsack(const Instance& inst, int k);

struct MasterModel {
  lp::LpModel lp;
  std::vector<int> binaries;    // y then z variable ids
  int y_offset = 0;
  int z_offset = 0;
  bool has_vi_block = false;
  Eigen::VectorXd marginal_demand;  // per commodity, empty without the block
  long cut_rows = 0;                // feasibility cut rows appended so far
};

// Variables: y (binary, per arc), z (binary, per scenario), then with the
// valid-inequality block one continuous flow variable per commodity per
// admissible arc. Row 0 is the knapsack; the block adds balance rows,
// capacity rows  sum_k xbar - u_a y_a <= 0, and demand rows with the
// marginal demands as right-hand sides. Cut rows are appended during solve.
MasterModel build_master(const Instance& inst, bool use_vis);

struct SolveStats {
  long iterations = 0;   // incumbent events (SingleTree) or master re-solves
  long cuts_added = 0;
  long bnb_nodes = 0;
  long lp_solves = 0;    // node LPs plus subproblem solves
  double wall_time_s = 0.0;
};

struct SolveResult {
  Status status = Status::Infeasible;
  bool has_solution = false;
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  double objective = 0.0;
  SolveStats stats;
};

// Both strategies terminate with the same objective on the same instance.
// Every Optimal result is audited before being returned: the infeasible
// scenario set of y is recomputed with fresh feasibility solves (the z vector
// is not trusted) and its probability mass must stay within alpha + 1e-9.
// Audit failure throws std::logic_error; an empty feasible region returns
// Status::Infeasible.
SolveResult solve(const Instance& inst, const SolveOptions& options = {});

std::string to_json(const SolveResult& result);

}  // namespace ccnd::master
