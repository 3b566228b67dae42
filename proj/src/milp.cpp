#include "ccnd/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace ccnd::milp {

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::TimeLimit: return "time_limit";
    case Status::NodeLimit: return "node_limit";
  }
  return "unknown";
}

namespace {

constexpr double kIntTol = 1e-6;

struct Node {
  long id = 0;
  double bound = -lp::kInf;  // LP bound when last solved; never overstated
  std::vector<std::pair<int, double>> fixings;  // (binary var, 0 or 1)
  lp::Basis basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;                                // then FIFO
  }
};

// Applies branching fixings to the shared model and restores them on exit.
class BoundGuard {
 public:
  explicit BoundGuard(lp::LpModel& model) : model_(model) {}
  void fix(int var, double value) {
    saved_.emplace_back(var, model_.lower()[var], model_.upper()[var]);
    model_.set_bounds(var, value, value);
  }
  ~BoundGuard() {
    for (auto it = saved_.rbegin(); it != saved_.rend(); ++it)
      model_.set_bounds(std::get<0>(*it), std::get<1>(*it), std::get<2>(*it));
  }

 private:
  lp::LpModel& model_;
  std::vector<std::tuple<int, double, double>> saved_;
};

double prune_threshold(double best_obj, double rel_gap) {
  return best_obj - rel_gap * std::max(1.0, std::abs(best_obj));
}

}  // namespace

Result solve(lp::LpModel& model, const std::vector<int>& binaries,
             const IncumbentHook& hook, const Limits& limits) {
  for (int j : binaries) {
    if (j < 0 || j >= model.num_vars())
      throw std::invalid_argument("binary id out of range");
    if (model.lower()[j] < -kIntTol || model.upper()[j] > 1.0 + kIntTol)
      throw std::invalid_argument("binary variable bounds must sit in [0, 1]");
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  Result res;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> queue;
  long next_id = 0;
  queue.push(Node{next_id++, -lp::kInf, {}, {}});

  double best_obj = lp::kInf;
  Eigen::VectorXd best_x;
  bool done_by_limit = false;
  Status limit_status = Status::Optimal;

  // Plunge-then-backtrack: after branching, dive into the child that matches
  // the relaxation's leaning so an incumbent appears early; the sibling waits
  // in the best-bound queue.
  std::optional<Node> carry;
  while (carry || !queue.empty()) {
    if (elapsed() > limits.time_limit_s || res.nodes >= limits.node_limit) {
      done_by_limit = true;
      limit_status = elapsed() > limits.time_limit_s ? Status::TimeLimit
                                                     : Status::NodeLimit;
      if (carry) queue.push(std::move(*carry));
      break;
    }

    const bool from_queue = !carry;
    Node node;
    if (carry) {
      node = std::move(*carry);
      carry.reset();
    } else {
      node = queue.top();
      queue.pop();
    }
    if (best_obj < lp::kInf &&
        node.bound >= prune_threshold(best_obj, limits.rel_gap)) {
      // Bounds only rise when rows are appended, so once the smallest queued
      // bound clears the incumbent the whole queue is proven. A dive node can
      // sit below the queue front and only prunes itself.
      if (!from_queue) continue;
      while (!queue.empty()) queue.pop();
      break;
    }

    lp::LpSolution sol;
    {
      BoundGuard guard(model);
      for (const auto& [var, value] : node.fixings) guard.fix(var, value);
      sol = lp::solve(model, node.basis.empty() ? nullptr : &node.basis);
    }
    ++res.nodes;
    ++res.lp_solves;

    if (sol.status == lp::Status::Infeasible) continue;
    if (sol.status == lp::Status::Unbounded)
      throw std::logic_error("relaxation is unbounded");
    if (sol.status == lp::Status::IterationLimit)
      throw std::runtime_error("node relaxation hit the simplex pivot limit");

    node.bound = sol.objective;
    if (best_obj < lp::kInf &&
        node.bound >= prune_threshold(best_obj, limits.rel_gap))
      continue;

    // Most fractional binary, ties to the lowest id.
    int branch_var = -1;
    double branch_score = 0.0;
    for (int j : binaries) {
      const double frac = std::abs(sol.primal[j] - std::round(sol.primal[j]));
      if (frac <= kIntTol) continue;
      // Weight fractionality by the objective stake so costly decisions are
      // settled high in the tree.
      const double score = frac * std::max(1.0, std::abs(model.objective()[j]));
      if (score > branch_score) {
        branch_score = score;
        branch_var = j;
      }
    }

    if (branch_var < 0) {
      Eigen::VectorXd x = sol.primal;
      for (int j : binaries) x[j] = x[j] > 0.5 ? 1.0 : 0.0;
      bool accept = true;
      std::vector<lp::Row> new_rows;
      if (hook) {
        ++res.incumbent_events;
        accept = hook(x, new_rows);
      }
      if (accept) {
        const double obj = model.objective().dot(x);
        if (obj < best_obj) {
          best_obj = obj;
          best_x = x;
        }
        continue;
      }
      bool separated = false;
      for (const lp::Row& row : new_rows) {
        double ax = 0.0;
        for (const auto& [var, value] : row.coeffs) ax += value * x[var];
        const double viol = row.sense == lp::Sense::LessEqual ? ax - row.rhs
                            : row.sense == lp::Sense::GreaterEqual
                                ? row.rhs - ax
                                : std::abs(ax - row.rhs);
        if (viol > 1e-9) separated = true;
        model.add_row(row.coeffs, row.sense, row.rhs);
      }
      if (separated) {
        node.id = next_id++;
        node.basis = sol.basis;
        carry = std::move(node);
      }
      // An unseparated veto abandons the node: the hook rejected the point
      // without a row that excludes it, so re-solving would loop forever.
      continue;
    }

    const double lean = sol.primal[branch_var] > 0.5 ? 1.0 : 0.0;
    for (double value : {1.0 - lean, lean}) {
      Node child;
      child.id = next_id++;
      child.bound = node.bound;
      child.fixings = node.fixings;
      child.fixings.emplace_back(branch_var, value);
      child.basis = sol.basis;
      if (value == lean) carry = std::move(child);
      else queue.push(std::move(child));
    }
  }

  res.best_bound = best_obj;
  if (done_by_limit) {
    res.status = limit_status;
    double bound = best_obj;
    // Remaining open nodes cap what optimality could still prove.
    std::priority_queue<Node, std::vector<Node>, NodeOrder> rest(
        std::move(queue));
    if (!rest.empty()) bound = std::min(bound, rest.top().bound);
    res.best_bound = bound;
  } else {
    res.status = best_obj < lp::kInf ? Status::Optimal : Status::Infeasible;
  }
  if (best_obj < lp::kInf) {
    res.has_solution = true;
    res.objective = best_obj;
    res.x = best_x;
  }
  return res;
}

}  // namespace ccnd::milp
