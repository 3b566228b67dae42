#include "ccnd/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace ccnd::sub {

const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::BB: return "bb";
    case Formulation::FlowMIS: return "flowmis";
    case Formulation::MIS: return "mis";
    case Formulation::SNC: return "snc";
  }
  return "unknown";
}

namespace {

constexpr double kFeasibleTol = 1e-6;  // slack optimum at or below is "routable"

struct Layout {
  std::vector<std::vector<int>> admissible;  // arc ids per commodity
  std::vector<int> var_offset;               // first x variable per commodity
  int num_flow_vars = 0;
  int balance_rows = 0;  // K * (N - 2)
  int capacity_begin = 0;
  int demand_begin = 0;

  static Layout make(const Instance& inst) {
    Layout lay;
    const int K = inst.num_commodities();
    lay.admissible.resize(K);
    lay.var_offset.resize(K);
    for (int k = 0; k < K; ++k) {
      lay.var_offset[k] = lay.num_flow_vars;
      lay.admissible[k] = admissible_arcs(inst, k);
      lay.num_flow_vars += static_cast<int>(lay.admissible[k].size());
    }
    lay.balance_rows = K * (inst.num_nodes - 2);
    lay.capacity_begin = lay.balance_rows;
    lay.demand_begin = lay.capacity_begin + inst.num_arcs();
    return lay;
  }
};

void check_args(const Instance& inst, const Eigen::VectorXd& y, int scenario) {
  if (y.size() != inst.num_arcs())
    throw std::invalid_argument("design length does not match arc count");
  if (scenario < 0 || scenario >= inst.num_scenarios())
    throw std::out_of_range("unknown scenario id " + std::to_string(scenario));
}

}  // namespace

lp::LpModel build_subproblem(const Instance& inst, const Eigen::VectorXd& y,
                             int scenario, Formulation f) {
  check_args(inst, y, scenario);
  const Layout lay = Layout::make(inst);
  const int K = inst.num_commodities();
  const int A = inst.num_arcs();
  const Eigen::VectorXd& d = inst.scenarios[scenario].demand;

  // Slack variables come after the flow variables.
  int num_vars = lay.num_flow_vars;
  int t_var = -1, cap_slack0 = -1, dem_slack0 = -1;
  switch (f) {
    case Formulation::FlowMIS:
    case Formulation::SNC:
    case Formulation::MIS:
      t_var = num_vars++;
      break;
    case Formulation::BB:
      cap_slack0 = num_vars;
      num_vars += A;
      dem_slack0 = num_vars;
      num_vars += K;
      break;
  }

  lp::LpModel model(num_vars);
  if (t_var >= 0) model.set_objective(t_var, 1.0);
  for (int a = 0; cap_slack0 >= 0 && a < A; ++a)
    model.set_objective(cap_slack0 + a, 1.0);
  for (int k = 0; dem_slack0 >= 0 && k < K; ++k)
    model.set_objective(dem_slack0 + k, 1.0);

  // Balance: per commodity, per interior node, inflow equals outflow over the
  // admissible arcs.
  for (int k = 0; k < K; ++k) {
    const Commodity& com = inst.commodities[k];
    for (int node = 0; node < inst.num_nodes; ++node) {
      if (node == com.origin || node == com.destination) continue;
      std::vector<std::pair<int, double>> coeffs;
      for (int idx = 0; idx < static_cast<int>(lay.admissible[k].size()); ++idx) {
        const Arc& arc = inst.arcs[lay.admissible[k][idx]];
        if (arc.head == node)
          coeffs.push_back({lay.var_offset[k] + idx, 1.0});
        else if (arc.tail == node)
          coeffs.push_back({lay.var_offset[k] + idx, -1.0});
      }
      model.add_row(std::move(coeffs), lp::Sense::Equal, 0.0);
    }
  }

  // Capacity: total flow on arc a at most u_a y_a, relaxed by the capacity
  // slack where the formulation has one.
  std::vector<std::vector<std::pair<int, double>>> cap_coeffs(A);
  for (int k = 0; k < K; ++k)
    for (int idx = 0; idx < static_cast<int>(lay.admissible[k].size()); ++idx)
      cap_coeffs[lay.admissible[k][idx]].push_back(
          {lay.var_offset[k] + idx, 1.0});
  for (int a = 0; a < A; ++a) {
    if (f == Formulation::SNC || f == Formulation::MIS)
      cap_coeffs[a].push_back({t_var, -1.0});
    else if (f == Formulation::BB)
      cap_coeffs[a].push_back({cap_slack0 + a, -1.0});
    model.add_row(std::move(cap_coeffs[a]), lp::Sense::LessEqual,
                  inst.arcs[a].capacity * y[a]);
  }

  // Demand: inflow at the destination covers the scenario demand, relaxed by
  // the demand slack where the formulation has one.
  for (int k = 0; k < K; ++k) {
    std::vector<std::pair<int, double>> coeffs;
    for (int idx = 0; idx < static_cast<int>(lay.admissible[k].size()); ++idx)
      if (inst.arcs[lay.admissible[k][idx]].head == inst.commodities[k].destination)
        coeffs.push_back({lay.var_offset[k] + idx, 1.0});
    if (f == Formulation::FlowMIS || f == Formulation::SNC)
      coeffs.push_back({t_var, 1.0});
    else if (f == Formulation::BB)
      coeffs.push_back({dem_slack0 + k, 1.0});
    model.add_row(std::move(coeffs), lp::Sense::GreaterEqual, d[k]);
  }

  return model;
}

std::optional<DualSolution> check_feasibility(const Instance& inst,
                                              const Eigen::VectorXd& y,
                                              int scenario, Formulation f,
                                              BasisCache* cache) {
  lp::LpModel model = build_subproblem(inst, y, scenario, f);

  lp::LpSolution sol;
  const auto key = std::make_pair(scenario, static_cast<int>(f));
  const lp::Basis* warm = nullptr;
  if (cache) {
    auto it = cache->find(key);
    if (it != cache->end()) warm = &it->second;
  }
  sol = warm ? lp::resolve_rhs(model, model.rhs_vector(), *warm)
             : lp::solve(model);

  if (sol.status == lp::Status::IterationLimit)
    throw std::runtime_error("subproblem solve hit the simplex pivot limit");
  if (sol.status == lp::Status::Infeasible)
    throw std::runtime_error(
        "subproblem is infeasible even with slack: some positive demand has "
        "no admissible path");
  if (sol.status != lp::Status::Optimal)
    throw std::logic_error("subproblem solve ended in an impossible state");

  if (cache) (*cache)[key] = sol.basis;
  if (sol.objective <= kFeasibleTol) return std::nullopt;

  const Layout lay = Layout::make(inst);
  const int K = inst.num_commodities();
  const int A = inst.num_arcs();

  DualSolution dual;
  dual.objective = sol.objective;
  dual.pi = Eigen::VectorXd::Zero(A);
  for (int a = 0; a < A; ++a)
    dual.pi[a] = std::max(0.0, -sol.dual[lay.capacity_begin + a]);
  dual.lambda = Eigen::VectorXd::Zero(K);
  for (int k = 0; k < K; ++k)
    dual.lambda[k] = std::max(0.0, sol.dual[lay.demand_begin + k]);
  dual.mu = Eigen::MatrixXd::Zero(K, inst.num_nodes);
  int row = 0;
  for (int k = 0; k < K; ++k) {
    const Commodity& com = inst.commodities[k];
    for (int node = 0; node < inst.num_nodes; ++node) {
      if (node == com.origin || node == com.destination) continue;
      dual.mu(k, node) = sol.dual[row++];
    }
    dual.mu(k, com.destination) = dual.lambda[k];
  }
  return dual;
}

FeasibilityCut derive_cut(const DualSolution& dual, const Instance& inst,
                          int scenario) {
  if (scenario < 0 || scenario >= inst.num_scenarios())
    throw std::out_of_range("unknown scenario id " + std::to_string(scenario));
  FeasibilityCut cut;
  cut.scenario = scenario;
  cut.gamma = inst.scenarios[scenario].demand.dot(dual.lambda);
  cut.beta.resize(inst.num_arcs());
  for (int a = 0; a < inst.num_arcs(); ++a)
    cut.beta[a] = std::max(0.0, inst.arcs[a].capacity * dual.pi[a]);
  cut.big_m = cut.gamma;
  return cut;
}

FeasibilityCut strengthen_metric(const FeasibilityCut& cut,
                                 const DualSolution& dual,
                                 const Instance& inst, int scenario) {
  const Eigen::VectorXd& d = inst.scenarios[scenario].demand;
  double repriced = 0.0;
  for (int k = 0; k < inst.num_commodities(); ++k) {
    if (d[k] <= 0.0) continue;
    // Shortest origin->destination path under the pi weights, restricted to
    // the commodity's admissible arcs (Dijkstra; weights are nonnegative).
    const std::vector<int> adm = admissible_arcs(inst, k);
    const int N = inst.num_nodes;
    std::vector<double> dist(N, lp::kInf);
    std::vector<bool> fixed(N, false);
    dist[inst.commodities[k].origin] = 0.0;
    for (int round = 0; round < N; ++round) {
      int best = -1;
      for (int i = 0; i < N; ++i)
        if (!fixed[i] && std::isfinite(dist[i]) &&
            (best < 0 || dist[i] < dist[best]))
          best = i;
      if (best < 0) break;
      fixed[best] = true;
      for (int a : adm) {
        const Arc& arc = inst.arcs[a];
        if (arc.tail != best) continue;
        dist[arc.head] = std::min(dist[arc.head], dist[best] + dual.pi[a]);
      }
    }
    const double len = dist[inst.commodities[k].destination];
    if (!std::isfinite(len)) return cut;  // unroutable commodity: keep as-is
    repriced += d[k] * len;
  }

  FeasibilityCut out = cut;
  if (repriced > cut.gamma + 1e-12 * (1.0 + std::abs(cut.gamma))) {
    out.gamma = repriced;
    out.big_m = repriced;
    out.strengthened = true;
  }
  return out;
}

void write_cut_trace(std::ostream& out, const FeasibilityCut& cut,
                     Formulation f) {
  int support = 0;
  for (int a = 0; a < cut.beta.size(); ++a)
    if (cut.beta[a] > 1e-9) ++support;
  out << "cut scenario=" << cut.scenario << " formulation=" << to_string(f)
      << " gamma=" << cut.gamma << " support=" << support
      << " strengthened=" << (cut.strengthened ? 1 : 0) << "\n";
}

}  // namespace ccnd::sub
