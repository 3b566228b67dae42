#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ccnd/master.hpp"

// Benchmark harness: runs a formulation/flag grid over an instance suite in a
// worker pool and aggregates the records. Wall times vary between runs;
// everything else is deterministic and records are merged in a fixed order.
namespace ccnd::bench {

struct RunSpec {
  std::string instance_path;
  std::string instance_name;
  master::SolveOptions options;
};

struct RunRecord {
  std::string instance;
  sub::Formulation formulation = sub::Formulation::FlowMIS;
  bool vi = false;
  bool metric = false;
  master::Strategy strategy = master::Strategy::SingleTree;
  master::Status status = master::Status::Infeasible;
  bool has_objective = false;
  double objective = 0.0;
  long iterations = 0;
  long cuts_added = 0;
  long bnb_nodes = 0;
  double wall_time_s = 0.0;
};

// Runs every spec (jobs > 1 uses that many worker threads) and returns the
// records sorted by (instance, formulation, vi, metric, strategy). A solve
// that throws is recorded with status Infeasible and no objective rather than
// aborting the sweep.
std::vector<RunRecord> run_suite(const std::vector<RunSpec>& specs, int jobs);

// Aggregate over one instance group and configuration slice.
struct GroupSummary {
  std::string group;  // instance name up to the last '-'
  sub::Formulation formulation = sub::Formulation::FlowMIS;
  bool vi = false;
  bool metric = false;
  master::Strategy strategy = master::Strategy::SingleTree;
  int solved = 0;
  int total = 0;
  double mean_iterations = 0.0;
  double mean_time_s = 0.0;
  int fastest = 0;              // runs where this formulation was fastest
  bool has_speedup = false;
  double speedup_vs_bb = 1.0;   // geometric mean over commonly solved runs
};

std::string group_of(const std::string& instance_name);
std::vector<GroupSummary> aggregate(const std::vector<RunRecord>& records);

// Geometric mean of pairwise time ratios base/other over commonly solved
// instances; false when no instance was solved by both.
bool geometric_speedup(const std::vector<double>& base_times,
                       const std::vector<double>& other_times, double* out);

// CSV with the fixed column order
// instance,formulation,vi,metric,strategy,status,objective,iterations,
// cuts_added,bnb_nodes,wall_time_s
void write_records_csv(const std::vector<RunRecord>& records, std::ostream& out);
void write_summary_csv(const std::vector<GroupSummary>& groups, std::ostream& out);
std::string records_json(const std::vector<RunRecord>& records);

}  // namespace ccnd::bench
