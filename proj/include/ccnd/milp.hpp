#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "ccnd/lp.hpp"

// Exact branch-and-bound for mixed binary programs over an LpModel. Best-first
// on the LP relaxation bound, diving first into the child that matches the
// relaxation's leaning; branches on the binary with the largest
// cost-weighted fractionality (ties to the lowest variable id). Supports lazy
// row generation through an incumbent hook, which is how feasibility cuts
// reach the search.
namespace ccnd::milp {

enum class Status : std::uint8_t { Optimal, Infeasible, TimeLimit, NodeLimit };

const char* to_string(Status s);

struct Limits {
  double time_limit_s = lp::kInf;
  long node_limit = std::numeric_limits<long>::max();
  double rel_gap = 1e-6;
};

// Called on every integral LP optimum. Returning true accepts it as the new
// incumbent. Returning false vetoes it; any rows pushed into `new_rows` are
// appended to the model globally (they must be valid for every integer
// solution, not just this node). A veto that supplies no row violated by the
// candidate prunes the node instead of re-enqueuing it.
using IncumbentHook =
    std::function<bool(const Eigen::VectorXd& x, std::vector<lp::Row>& new_rows)>;

struct Result {
  Status status = Status::Infeasible;
  bool has_solution = false;
  Eigen::VectorXd x;       // full variable vector of the best incumbent
  double objective = 0.0;  // meaningful only when has_solution
  double best_bound = -lp::kInf;
  long nodes = 0;          // nodes whose LP relaxation was solved
  long lp_solves = 0;
  long incumbent_events = 0;  // hook invocations
};

// `model` is modified in place: hook rows are appended and remain afterwards.
// Binary variables must have bounds within [0, 1]. Deterministic for a fixed
// model/hook pair. Integer feasibility means |x_j - round(x_j)| <= 1e-6 on
// binaries; the returned incumbent has those entries snapped to exact 0/1.
Result solve(lp::LpModel& model, const std::vector<int>& binaries,
             const IncumbentHook& hook = nullptr, const Limits& limits = {});

}  // namespace ccnd::milp
