#include "ccnd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>
#include <utility>

#include "ccnd/lp.hpp"
#include "ccnd/milp.hpp"

namespace ccnd::oracle {

namespace {

constexpr double kFlowTol = 1e-9;
constexpr double kRouteTol = 1e-6;  // residual unserved demand counted as zero
constexpr double kMassTol = 1e-9;

void check_design(const Instance& inst, const Eigen::VectorXd& y) {
  if (y.size() != inst.num_arcs())
    throw std::invalid_argument("design length does not match arc count");
}

void check_scenario(const Instance& inst, int s) {
  if (s < 0 || s >= inst.num_scenarios())
    throw std::out_of_range("unknown scenario id " + std::to_string(s));
}

// Minimum total unserved demand over all commodities at once: flows on built
// admissible arcs, shared capacities, and one shortfall variable per
// commodity. Zero optimum means the scenario is routable. Kept deliberately
// separate from the Benders subproblem construction.
double min_shortfall(const Instance& inst, const Eigen::VectorXd& y, int s) {
  const int N = inst.num_nodes;
  const int K = inst.num_commodities();
  const int A = inst.num_arcs();

  std::vector<std::vector<int>> adm(K);
  std::vector<int> offset(K);
  int nflow = 0;
  for (int k = 0; k < K; ++k) {
    adm[k] = admissible_arcs(inst, k);
    offset[k] = nflow;
    nflow += static_cast<int>(adm[k].size());
  }

  lp::LpModel model(nflow + K);
  for (int k = 0; k < K; ++k) model.set_objective(nflow + k, 1.0);

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
      model.add_row(std::move(node_terms[node]), lp::Sense::Equal, 0.0);
    }
    std::vector<std::pair<int, double>> demand = node_terms[com.destination];
    demand.push_back({nflow + k, 1.0});
    model.add_row(std::move(demand), lp::Sense::GreaterEqual,
                  inst.scenarios[s].demand[k]);
  }
  for (int a = 0; a < A; ++a)
    model.add_row(std::move(arc_terms[a]), lp::Sense::LessEqual,
                  inst.arcs[a].capacity * y[a]);

  lp::LpSolution sol = lp::solve(model);
  if (sol.status != lp::Status::Optimal)
    throw std::logic_error("shortfall LP must have an optimum, got status " +
                           std::to_string(static_cast<int>(sol.status)));
  return sol.objective;
}

double failed_mass(const Instance& inst, const Eigen::VectorXd& y,
                   Eigen::VectorXd* z_out) {
  const int S = inst.num_scenarios();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(S);
  double mass = 0.0;
  for (int s = 0; s < S; ++s) {
    if (sp_feasible(inst, y, s)) continue;
    z[s] = 1.0;
    mass += inst.scenarios[s].probability;
  }
  if (z_out) *z_out = std::move(z);
  return mass;
}

}  // namespace

double max_flow_value(const Instance& inst, const Eigen::VectorXd& y, int k) {
  check_design(inst, y);
  const std::vector<int> adm = admissible_arcs(inst, k);
  const int N = inst.num_nodes;
  const int E = static_cast<int>(adm.size());
  const int source = inst.commodities[k].origin;
  const int sink = inst.commodities[k].destination;

  // Residual edges: forward copy of each admissible arc plus its reverse.
  std::vector<int> head(2 * E), prev_edge(2 * E);
  std::vector<double> residual(2 * E);
  std::vector<int> first(N, -1);
  for (int i = 0; i < E; ++i) {
    const Arc& arc = inst.arcs[adm[i]];
    head[2 * i] = arc.head;
    residual[2 * i] = arc.capacity * y[adm[i]];
    prev_edge[2 * i] = first[arc.tail];
    first[arc.tail] = 2 * i;
    head[2 * i + 1] = arc.tail;
    residual[2 * i + 1] = 0.0;
    prev_edge[2 * i + 1] = first[arc.head];
    first[arc.head] = 2 * i + 1;
  }

  double total = 0.0;
  std::vector<int> via(N);
  while (true) {
    std::fill(via.begin(), via.end(), -1);
    via[source] = -2;
    std::deque<int> queue{source};
    while (!queue.empty() && via[sink] == -1) {
      const int node = queue.front();
      queue.pop_front();
      for (int e = first[node]; e >= 0; e = prev_edge[e]) {
        if (residual[e] <= kFlowTol || via[head[e]] != -1) continue;
        via[head[e]] = e;
        queue.push_back(head[e]);
      }
    }
    if (via[sink] == -1) break;
    double bottleneck = lp::kInf;
    for (int node = sink; node != source; node = head[via[node] ^ 1])
      bottleneck = std::min(bottleneck, residual[via[node]]);
    for (int node = sink; node != source; node = head[via[node] ^ 1]) {
      residual[via[node]] -= bottleneck;
      residual[via[node] ^ 1] += bottleneck;
    }
    total += bottleneck;
  }
  return total;
}

bool max_flow_feasible(const Instance& inst, const Eigen::VectorXd& y, int s,
                       int k) {
  check_scenario(inst, s);
  return max_flow_value(inst, y, k) >=
         inst.scenarios[s].demand[k] - kFlowTol;
}

bool sp_feasible(const Instance& inst, const Eigen::VectorXd& y, int s) {
  check_design(inst, y);
  check_scenario(inst, s);
  if (inst.num_commodities() == 1) return max_flow_feasible(inst, y, s, 0);
  return min_shortfall(inst, y, s) <= kRouteTol;
}

DesignResult solve_deq(const Instance& inst, int max_rows) {
  const int N = inst.num_nodes;
  const int K = inst.num_commodities();
  const int A = inst.num_arcs();
  const int S = inst.num_scenarios();
  const long rows = static_cast<long>(S) * (static_cast<long>(K) * (N - 2) + A + K) + 1;
  if (rows > max_rows)
    throw std::domain_error("extensive form needs " + std::to_string(rows) +
                            " rows, over the budget of " +
                            std::to_string(max_rows));

  std::vector<std::vector<int>> adm(K);
  std::vector<int> offset(K);
  int flows_per_scenario = 0;
  for (int k = 0; k < K; ++k) {
    adm[k] = admissible_arcs(inst, k);
    offset[k] = flows_per_scenario;
    flows_per_scenario += static_cast<int>(adm[k].size());
  }
  const int y0 = flows_per_scenario * S;
  const int z0 = y0 + A;
  lp::LpModel model(z0 + S);
  for (int v = y0; v < z0 + S; ++v) model.set_bounds(v, 0.0, 1.0);
  for (int a = 0; a < A; ++a) model.set_objective(y0 + a, inst.arcs[a].fixed_cost);

  std::vector<std::pair<int, double>> knap;
  for (int s = 0; s < S; ++s)
    knap.push_back({z0 + s, inst.scenarios[s].probability});
  model.add_row(std::move(knap), lp::Sense::LessEqual, inst.alpha);

  for (int s = 0; s < S; ++s) {
    const int base = flows_per_scenario * s;
    std::vector<std::vector<std::pair<int, double>>> arc_terms(A);
    for (int k = 0; k < K; ++k) {
      const Commodity& com = inst.commodities[k];
      std::vector<std::vector<std::pair<int, double>>> node_terms(N);
      for (int i = 0; i < static_cast<int>(adm[k].size()); ++i) {
        const int var = base + offset[k] + i;
        const Arc& arc = inst.arcs[adm[k][i]];
        node_terms[arc.head].push_back({var, 1.0});
        node_terms[arc.tail].push_back({var, -1.0});
        arc_terms[adm[k][i]].push_back({var, 1.0});
      }
      for (int node = 0; node < N; ++node) {
        if (node == com.origin || node == com.destination) continue;
        model.add_row(std::move(node_terms[node]), lp::Sense::Equal, 0.0);
      }
      // Demand row relaxed by the exemption: inflow + d z_s >= d.
      std::vector<std::pair<int, double>> demand =
          node_terms[com.destination];
      const double d = inst.scenarios[s].demand[k];
      demand.push_back({z0 + s, d});
      model.add_row(std::move(demand), lp::Sense::GreaterEqual, d);
    }
    for (int a = 0; a < A; ++a) {
      arc_terms[a].push_back({y0 + a, -inst.arcs[a].capacity});
      model.add_row(std::move(arc_terms[a]), lp::Sense::LessEqual, 0.0);
    }
  }

  std::vector<int> binaries;
  for (int v = y0; v < z0 + S; ++v) binaries.push_back(v);
  milp::Result mip = milp::solve(model, binaries, nullptr, {});

  DesignResult res;
  if (mip.status != milp::Status::Optimal || !mip.has_solution) return res;
  res.feasible = true;
  res.objective = mip.objective;
  res.y = mip.x.segment(y0, A);
  for (int a = 0; a < A; ++a) res.y[a] = res.y[a] > 0.5 ? 1.0 : 0.0;
  const double mass = failed_mass(inst, res.y, &res.z);
  if (mass > inst.alpha + kMassTol)
    throw std::logic_error("extensive-form design fails the scenario audit");
  return res;
}

DesignResult brute_force_design(const Instance& inst) {
  const int A = inst.num_arcs();
  if (A > 20)
    throw std::invalid_argument("exhaustive design scan refused above 20 arcs");

  DesignResult best;
  for (std::uint32_t mask = 0; mask < (1u << A); ++mask) {
    double cost = 0.0;
    for (int a = 0; a < A; ++a)
      if (mask & (1u << a)) cost += inst.arcs[a].fixed_cost;
    if (best.feasible && cost >= best.objective) continue;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(A);
    for (int a = 0; a < A; ++a)
      if (mask & (1u << a)) y[a] = 1.0;
    Eigen::VectorXd z;
    if (failed_mass(inst, y, &z) > inst.alpha + kMassTol) continue;
    best.feasible = true;
    best.objective = cost;
    best.y = std::move(y);
    best.z = std::move(z);
  }
  return best;
}

CutEnumeration enumerate_cuts(const Instance& inst, const Eigen::VectorXd& y,
                              int s) {
  check_design(inst, y);
  check_scenario(inst, s);
  if (inst.num_commodities() != 1)
    throw std::invalid_argument("cut enumeration needs a single commodity");
  if (inst.num_nodes > 20)
    throw std::invalid_argument("cut enumeration refused above 20 nodes");

  const std::vector<int> adm = admissible_arcs(inst, 0);
  const int origin = inst.commodities[0].origin;
  const int destination = inst.commodities[0].destination;
  const double d = inst.scenarios[s].demand[0];

  std::vector<int> interior;
  for (int node = 0; node < inst.num_nodes; ++node)
    if (node != origin && node != destination) interior.push_back(node);

  CutEnumeration out;
  out.min_capacity = lp::kInf;
  out.best_snc_ratio = -lp::kInf;
  out.best_mis_ratio = -lp::kInf;
  std::set<std::vector<int>> seen;
  std::vector<bool> in_s(inst.num_nodes, false);

  for (std::uint32_t mask = 0; mask < (1u << interior.size()); ++mask) {
    std::fill(in_s.begin(), in_s.end(), false);
    in_s[origin] = true;
    for (std::size_t i = 0; i < interior.size(); ++i)
      if (mask & (1u << i)) in_s[interior[i]] = true;

    CutRecord rec;
    for (int a : adm)
      if (in_s[inst.arcs[a].tail] && !in_s[inst.arcs[a].head]) {
        rec.cut_set.push_back(a);
        rec.capacity += inst.arcs[a].capacity * y[a];
      }
    rec.cardinality = static_cast<int>(rec.cut_set.size());
    if (!seen.insert(rec.cut_set).second) continue;

    const double snc = (d - rec.capacity) / (rec.cardinality + 1);
    if (snc > out.best_snc_ratio + kFlowTol) {
      out.best_snc_ratio = snc;
      out.best_snc_cuts.clear();
    }
    if (snc >= out.best_snc_ratio - kFlowTol)
      out.best_snc_cuts.push_back(rec.cut_set);

    if (rec.cardinality > 0) {
      const double mis = (d - rec.capacity) / rec.cardinality;
      if (mis > out.best_mis_ratio + kFlowTol) {
        out.best_mis_ratio = mis;
        out.best_mis_cuts.clear();
      }
      if (mis >= out.best_mis_ratio - kFlowTol)
        out.best_mis_cuts.push_back(rec.cut_set);
    }

    if (rec.capacity < out.min_capacity - kFlowTol) {
      out.min_capacity = rec.capacity;
      out.min_capacity_cuts.clear();
    }
    if (rec.capacity <= out.min_capacity + kFlowTol)
      out.min_capacity_cuts.push_back(rec.cut_set);

    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace ccnd::oracle
