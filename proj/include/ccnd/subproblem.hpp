#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>

#include "ccnd/instance.hpp"
#include "ccnd/lp.hpp"

// Per-scenario feasibility subproblems. For a design y and scenario s the
// subproblem asks whether all demands d^k(omega_s) can be routed through the
// built arcs. Four slack placements turn that question into an LP whose
// optimum is 0 exactly when routing is possible, and whose dual yields a
// feasibility cut otherwise. They differ only in where the slack sits, which
// fixes the normalization of the dual the simplex returns:
//   FlowMIS  one slack relaxing every demand row         (sum_k lambda_k <= 1)
//   SNC      one slack on capacity and demand rows       (sum pi + sum lambda <= 1)
//   MIS      one slack relaxing every capacity row       (sum pi <= 1)
//   BB       one slack per capacity row and demand row   (pi_ij <= 1, lambda_k <= 1)
namespace ccnd::sub {

enum class Formulation : std::uint8_t { BB, FlowMIS, MIS, SNC };

const char* to_string(Formulation f);

// Dual of an infeasible subproblem, mapped back to instance coordinates with
// all signs normalized nonnegative: pi per arc (capacity rows), lambda per
// commodity (demand rows), mu per (commodity, node) with mu(k, origin) = 0 and
// mu(k, destination) = lambda_k. objective equals
//   sum_k d^k(omega_s) lambda_k - sum_ij u_ij y_ij pi_ij  > 0.
struct DualSolution {
  Eigen::VectorXd pi;
  Eigen::VectorXd lambda;
  Eigen::MatrixXd mu;  // num_commodities x num_nodes
  double objective = 0.0;
};

// Cut  M z_s + beta' y >= gamma  with beta = u .* pi >= 0, gamma = d' lambda,
// and M = gamma (tight: beta' y >= 0 makes the row vacuous once z_s = 1).
struct FeasibilityCut {
  int scenario = 0;
  double gamma = 0.0;
  Eigen::VectorXd beta;
  double big_m = 0.0;
  bool strengthened = false;
};

// Warm-start store, keyed by (scenario, formulation). The LP matrix for a
// fixed key never changes - only capacity right-hand sides move with y - so a
// terminal basis from one design re-solves the next in a handful of pivots.
using BasisCache = std::map<std::pair<int, int>, lp::Basis>;

// Row layout: balance rows (commodity-major, interior nodes ascending), then
// one capacity row per arc, then one demand row per commodity. Variables:
// x^k_a for each commodity over its admissible arcs (commodity-major), then
// the slack variable(s) of the chosen formulation.
lp::LpModel build_subproblem(const Instance& inst, const Eigen::VectorXd& y,
                             int scenario, Formulation f);

// Solves the subproblem (warm-started through `cache` when possible; pass
// nullptr to force cold solves). Returns std::nullopt when the slack optimum
// is <= 1e-6, i.e. the design serves scenario s; otherwise the extracted
// dual. Throws on LP iteration limit and on structurally unroutable
// commodities (only the MIS subproblem can be infeasible, and only when some
// positive demand has no admissible path at all).
std::optional<DualSolution> check_feasibility(const Instance& inst,
                                              const Eigen::VectorXd& y,
                                              int scenario, Formulation f,
                                              BasisCache* cache);

FeasibilityCut derive_cut(const DualSolution& dual, const Instance& inst,
                          int scenario);

// Metric strengthening: reprices gamma as sum_k d^k(omega_s) * (shortest
// pi-path length from origin(k) to destination(k) over admissible arcs) and
// keeps the larger of the two gammas; beta is unchanged and M tracks gamma.
// A commodity with no admissible path contributes nothing when its demand is
// zero; if its demand is positive the original gamma is kept unchanged.
FeasibilityCut strengthen_metric(const FeasibilityCut& cut,
                                 const DualSolution& dual,
                                 const Instance& inst, int scenario);

// One line per derived cut: scenario, formulation, gamma, support size,
// strengthened flag.
void write_cut_trace(std::ostream& out, const FeasibilityCut& cut,
                     Formulation f);

}  // namespace ccnd::sub
