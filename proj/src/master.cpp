#include "ccnd/master.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "ccnd/milp.hpp"
#include "ccnd/oracle.hpp"

namespace ccnd::master {

const char* to_string(Strategy s) {
  return s == Strategy::SingleTree ? "tree" : "iterative";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::TimeLimit: return "time_limit";
  }
  return "unknown";
}

namespace {

constexpr double kMassTol = 1e-9;

void check_commodity(const Instance& inst, int k) {
  if (k < 0 || k >= inst.num_commodities())
    throw std::out_of_range("unknown commodity id " + std::to_string(k));
}

// Shared by both marginal-demand paths so that when they pick the same kept
// multiset they return the same double, bit for bit.
double kept_mass(std::vector<std::pair<double, double>> kept) {
  std::sort(kept.begin(), kept.end());
  double total = 0.0;
  for (const auto& [demand, prob] : kept) total += prob * demand;
  return total;
}

bool equiprobable(const Instance& inst) {
  const double uniform = 1.0 / inst.num_scenarios();
  for (const Scenario& sc : inst.scenarios)
    if (std::abs(sc.probability - uniform) > 1e-12) return false;
  return true;
}

}  // namespace

double marginal_demand_closed_form(const Instance& inst, int k) {
  check_commodity(inst, k);
  if (!equiprobable(inst))
    throw std::invalid_argument(
        "closed-form marginal demand needs equiprobable scenarios");
  const int S = inst.num_scenarios();
  int keep = static_cast<int>(std::ceil((1.0 - inst.alpha) * S - 1e-9));
  keep = std::clamp(keep, 0, S);

  std::vector<std::pair<double, double>> all;
  for (const Scenario& sc : inst.scenarios)
    all.push_back({sc.demand[k], sc.probability});
  std::sort(all.begin(), all.end());
  all.resize(keep);
  return kept_mass(std::move(all));
}

double marginal_demand_knapsack(const Instance& inst, int k) {
  check_commodity(inst, k);
  const int S = inst.num_scenarios();

  // Maximize the excluded mass sum_s p_s d^k_s z_s subject to the knapsack.
  lp::LpModel model(S);
  std::vector<std::pair<int, double>> knap;
  std::vector<int> binaries(S);
  for (int s = 0; s < S; ++s) {
    model.set_bounds(s, 0.0, 1.0);
    model.set_objective(s, -inst.scenarios[s].probability *
                               inst.scenarios[s].demand[k]);
    knap.push_back({s, inst.scenarios[s].probability});
    binaries[s] = s;
  }
  model.add_row(std::move(knap), lp::Sense::LessEqual, inst.alpha);
  milp::Result res = milp::solve(model, binaries);
  if (res.status != milp::Status::Optimal)
    throw std::logic_error("marginal-demand knapsack must solve");

  std::vector<std::pair<double, double>> kept;
  for (int s = 0; s < S; ++s)
    if (res.x[s] < 0.5)
      kept.push_back({inst.scenarios[s].demand[k],
                      inst.scenarios[s].probability});
  return kept_mass(std::move(kept));
}

double compute_marginal_demand(const Instance& inst, int k) {
  return equiprobable(inst) ? marginal_demand_closed_form(inst, k)
                            : marginal_demand_knapsack(inst, k);
}

MasterModel build_master(const Instance& inst, bool use_vis) {
  const int N = inst.num_nodes;
  const int K = inst.num_commodities();
  const int A = inst.num_arcs();
  const int S = inst.num_scenarios();

  MasterModel m;
  m.y_offset = 0;
  m.z_offset = A;
  m.has_vi_block = use_vis;

  std::vector<std::vector<int>> adm(K);
  std::vector<int> offset(K);
  int nflow = 0;
  if (use_vis) {
    for (int k = 0; k < K; ++k) {
      adm[k] = admissible_arcs(inst, k);
      offset[k] = A + S + nflow;
      nflow += static_cast<int>(adm[k].size());
    }
  }

  m.lp = lp::LpModel(A + S + nflow);
  for (int a = 0; a < A; ++a) {
    m.lp.set_bounds(a, 0.0, 1.0);
    m.lp.set_objective(a, inst.arcs[a].fixed_cost);
    m.binaries.push_back(a);
  }
  for (int s = 0; s < S; ++s) {
    m.lp.set_bounds(A + s, 0.0, 1.0);
    m.binaries.push_back(A + s);
  }

  std::vector<std::pair<int, double>> knap;
  for (int s = 0; s < S; ++s)
    knap.push_back({A + s, inst.scenarios[s].probability});
  m.lp.add_row(std::move(knap), lp::Sense::LessEqual, inst.alpha);

  if (!use_vis) return m;

  // Aggregate-scenario flow block: one artificial scenario whose demands are
  // the marginal demands, feasible in any optimal design, so it tightens the
  // relaxation without cutting the optimum.
  m.marginal_demand = Eigen::VectorXd::Zero(K);
  for (int k = 0; k < K; ++k)
    m.marginal_demand[k] = compute_marginal_demand(inst, k);

  std::vector<std::vector<std::pair<int, double>>> arc_terms(A);
  for (int k = 0; k < K; ++k) {
    const Commodity& com = inst.commodities[k];
    std::vector<std::vector<std::pair<int, double>>> node_terms(N);
    for (int i = 0; i < static_cast<int>(adm[k].size()); ++i) {
      const int var = offset[k] + i;
      const Arc& arc = inst.arcs[adm[k][i]];
      node_terms[arc.head].push_back({var, 1.0});
      node_terms[arc.tail].push_back({var, -1.0});
      arc_terms[adm[k][i]].push_back({var, 1.0});
    }
    for (int node = 0; node < N; ++node) {
      if (node == com.origin || node == com.destination) continue;
      m.lp.add_row(std::move(node_terms[node]), lp::Sense::Equal, 0.0);
    }
    std::vector<std::pair<int, double>> demand =
        node_terms[com.destination];
    m.lp.add_row(std::move(demand), lp::Sense::GreaterEqual,
                 m.marginal_demand[k]);
  }
  for (int a = 0; a < A; ++a) {
    arc_terms[a].push_back({a, -inst.arcs[a].capacity});
    m.lp.add_row(std::move(arc_terms[a]), lp::Sense::LessEqual, 0.0);
  }
  return m;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Separator {
  const Instance& inst;
  const SolveOptions& opts;
  int z_offset;
  sub::BasisCache cache;
  long sp_solves = 0;
  long cuts = 0;

  // Returns the cut row for scenario s at design y, or nothing if y serves s.
  std::optional<lp::Row> operator()(const Eigen::VectorXd& y, int s) {
    ++sp_solves;
    std::optional<sub::DualSolution> dual =
        sub::check_feasibility(inst, y, s, opts.formulation, &cache);
    if (!dual) return std::nullopt;
    sub::FeasibilityCut cut = sub::derive_cut(*dual, inst, s);
    if (opts.use_metric) cut = sub::strengthen_metric(cut, *dual, inst, s);
    ++cuts;
    if (opts.cut_trace) sub::write_cut_trace(*opts.cut_trace, cut, opts.formulation);

    lp::Row row;
    row.sense = lp::Sense::GreaterEqual;
    row.rhs = cut.gamma;
    row.coeffs.push_back({z_offset + s, cut.big_m});
    for (int a = 0; a < cut.beta.size(); ++a)
      if (cut.beta[a] > 1e-12) row.coeffs.push_back({a, cut.beta[a]});
    return row;
  }
};

Eigen::VectorXd audit_design(const Instance& inst, const Eigen::VectorXd& y) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(inst.num_scenarios());
  double mass = 0.0;
  for (int s = 0; s < inst.num_scenarios(); ++s) {
    if (oracle::sp_feasible(inst, y, s)) continue;
    z[s] = 1.0;
    mass += inst.scenarios[s].probability;
  }
  if (mass > inst.alpha + kMassTol)
    throw std::logic_error("returned design fails the chance-constraint audit");
  return z;
}

}  // namespace

SolveResult solve(const Instance& inst, const SolveOptions& options) {
  {
    const std::vector<std::string> problems = validate(inst);
    if (!problems.empty())
      throw std::invalid_argument("invalid instance: " + problems.front());
  }
  const Clock::time_point start = Clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };

  if (options.log)
    *options.log << "master start formulation="
                 << sub::to_string(options.formulation)
                 << " strategy=" << to_string(options.strategy)
                 << " vi=" << (options.use_vis ? 1 : 0)
                 << " metric=" << (options.use_metric ? 1 : 0)
                 << " alpha=" << inst.alpha << " seed=" << options.seed << "\n";

  MasterModel model = build_master(inst, options.use_vis);
  const int A = inst.num_arcs();
  const int S = inst.num_scenarios();
  Separator separate{inst, options, model.z_offset, {}, 0, 0};

  SolveResult res;
  if (options.strategy == Strategy::SingleTree) {
    milp::IncumbentHook hook = [&](const Eigen::VectorXd& x,
                                   std::vector<lp::Row>& new_rows) {
      const Eigen::VectorXd y = x.segment(model.y_offset, A);
      for (int s = 0; s < S; ++s) {
        if (x[model.z_offset + s] >= 0.5) continue;
        if (std::optional<lp::Row> row = separate(y, s))
          new_rows.push_back(std::move(*row));
      }
      return new_rows.empty();
    };
    milp::Limits lim;
    lim.time_limit_s = options.time_limit_s;
    lim.node_limit = options.node_limit;
    milp::Result mip = milp::solve(model.lp, model.binaries, hook, lim);
    res.stats.iterations = mip.incumbent_events;
    res.stats.bnb_nodes = mip.nodes;
    res.stats.lp_solves = mip.lp_solves + separate.sp_solves;
    switch (mip.status) {
      case milp::Status::Optimal: res.status = Status::Optimal; break;
      case milp::Status::Infeasible: res.status = Status::Infeasible; break;
      default: res.status = Status::TimeLimit; break;
    }
    if (mip.has_solution) {
      res.has_solution = true;
      res.y = mip.x.segment(model.y_offset, A);
      res.objective = mip.objective;
    }
  } else {
    long rounds = 0;
    while (true) {
      const double remaining = options.time_limit_s - elapsed();
      if (remaining <= 0.0) {
        res.status = Status::TimeLimit;
        break;
      }
      milp::Limits lim;
      lim.time_limit_s = remaining;
      lim.node_limit = options.node_limit;
      milp::Result mip = milp::solve(model.lp, model.binaries, nullptr, lim);
      ++rounds;
      res.stats.iterations = rounds;
      res.stats.bnb_nodes += mip.nodes;
      res.stats.lp_solves += mip.lp_solves;
      if (mip.status == milp::Status::Infeasible) {
        res.status = Status::Infeasible;
        break;
      }
      if (mip.status != milp::Status::Optimal) {
        res.status = Status::TimeLimit;
        break;
      }
      const Eigen::VectorXd y = mip.x.segment(model.y_offset, A);
      std::vector<lp::Row> violated;
      for (int s = 0; s < S; ++s) {
        if (mip.x[model.z_offset + s] >= 0.5) continue;
        if (std::optional<lp::Row> row = separate(y, s))
          violated.push_back(std::move(*row));
      }
      if (options.log)
        *options.log << "round " << rounds << ": objective=" << mip.objective
                     << " new_cuts=" << violated.size() << "\n";
      if (violated.empty()) {
        res.status = Status::Optimal;
        res.has_solution = true;
        res.y = y;
        res.objective = mip.objective;
        break;
      }
      for (lp::Row& row : violated) {
        model.lp.add_row(std::move(row.coeffs), row.sense, row.rhs);
        ++model.cut_rows;
      }
    }
  }

  if (options.strategy == Strategy::Iterative)
    res.stats.lp_solves += separate.sp_solves;
  res.stats.cuts_added = separate.cuts;
  model.cut_rows = separate.cuts;

  // Any solution handed back must survive a fresh audit of which scenarios y
  // really serves; the solver's own z is never trusted.
  if (res.has_solution) res.z = audit_design(inst, res.y);

  res.stats.wall_time_s = elapsed();
  if (options.log)
    *options.log << "done status=" << to_string(res.status)
                 << " objective=" << (res.has_solution ? res.objective : 0.0)
                 << " cuts=" << res.stats.cuts_added
                 << " nodes=" << res.stats.bnb_nodes
                 << " time=" << res.stats.wall_time_s << "s\n";
  return res;
}

std::string to_json(const SolveResult& result) {
  nlohmann::json j;
  j["status"] = to_string(result.status);
  j["has_solution"] = result.has_solution;
  j["objective"] = result.objective;
  j["y"] = nlohmann::json::array();
  j["z"] = nlohmann::json::array();
  for (int a = 0; a < result.y.size(); ++a) j["y"].push_back(result.y[a]);
  for (int s = 0; s < result.z.size(); ++s) j["z"].push_back(result.z[s]);
  j["stats"] = {{"iterations", result.stats.iterations},
                {"cuts_added", result.stats.cuts_added},
                {"bnb_nodes", result.stats.bnb_nodes},
                {"lp_solves", result.stats.lp_solves},
                {"wall_time_s", result.stats.wall_time_s}};
  return j.dump(2) + "\n";
}

}  // namespace ccnd::master
