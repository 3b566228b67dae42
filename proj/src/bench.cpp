#include "ccnd/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace ccnd::bench {

namespace {

using Key = std::tuple<std::string, int, int, int, int>;

Key key_of(const RunRecord& r) {
  return {r.instance, static_cast<int>(r.formulation), r.vi ? 1 : 0,
          r.metric ? 1 : 0, static_cast<int>(r.strategy)};
}

RunRecord run_one(const RunSpec& spec) {
  RunRecord rec;
  rec.instance = spec.instance_name;
  rec.formulation = spec.options.formulation;
  rec.vi = spec.options.use_vis;
  rec.metric = spec.options.use_metric;
  rec.strategy = spec.options.strategy;
  try {
    const Instance inst = load_instance(spec.instance_path);
    const master::SolveResult res = master::solve(inst, spec.options);
    rec.status = res.status;
    rec.has_objective = res.has_solution;
    rec.objective = res.has_solution ? res.objective : 0.0;
    rec.iterations = res.stats.iterations;
    rec.cuts_added = res.stats.cuts_added;
    rec.bnb_nodes = res.stats.bnb_nodes;
    rec.wall_time_s = res.stats.wall_time_s;
  } catch (const std::exception&) {
    rec.status = master::Status::Infeasible;
    rec.has_objective = false;
  }
  return rec;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::vector<RunRecord> run_suite(const std::vector<RunSpec>& specs, int jobs) {
  std::vector<RunRecord> records(specs.size());
  jobs = std::clamp<int>(jobs, 1, static_cast<int>(specs.size()) + 1);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < specs.size(); ++i) records[i] = run_one(specs[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < specs.size(); i = next++)
          records[i] = run_one(specs[i]);
      });
    for (std::thread& t : pool) t.join();
  }
  std::sort(records.begin(), records.end(),
            [](const RunRecord& a, const RunRecord& b) {
              return key_of(a) < key_of(b);
            });
  return records;
}

std::string group_of(const std::string& instance_name) {
  const std::size_t pos = instance_name.rfind('-');
  return pos == std::string::npos ? instance_name : instance_name.substr(0, pos);
}

bool geometric_speedup(const std::vector<double>& base_times,
                       const std::vector<double>& other_times, double* out) {
  if (base_times.empty() || base_times.size() != other_times.size())
    return false;
  double log_sum = 0.0;
  for (std::size_t i = 0; i < base_times.size(); ++i)
    log_sum += std::log(std::max(base_times[i], 1e-9) /
                        std::max(other_times[i], 1e-9));
  *out = std::exp(log_sum / static_cast<double>(base_times.size()));
  return true;
}

std::vector<GroupSummary> aggregate(const std::vector<RunRecord>& records) {
  // slice = everything but the formulation; within a slice formulations are
  // compared pairwise on the instances they share.
  using Slice = std::tuple<std::string, int, int, int>;  // group, vi, metric, strategy
  std::map<Slice, std::map<std::string, std::map<int, const RunRecord*>>> slices;
  for (const RunRecord& r : records)
    slices[{group_of(r.instance), r.vi ? 1 : 0, r.metric ? 1 : 0,
            static_cast<int>(r.strategy)}][r.instance]
          [static_cast<int>(r.formulation)] = &r;

  std::vector<GroupSummary> out;
  for (const auto& [slice, by_instance] : slices) {
    std::map<int, GroupSummary> by_form;
    for (const auto& [instance, forms] : by_instance) {
      // Fastest solved formulation on this instance (first wins ties).
      int winner = -1;
      for (const auto& [f, rec] : forms)
        if (rec->status == master::Status::Optimal &&
            (winner < 0 || rec->wall_time_s < forms.at(winner)->wall_time_s))
          winner = f;
      for (const auto& [f, rec] : forms) {
        GroupSummary& g = by_form[f];
        if (g.total == 0) {
          g.group = std::get<0>(slice);
          g.formulation = static_cast<sub::Formulation>(f);
          g.vi = std::get<1>(slice) != 0;
          g.metric = std::get<2>(slice) != 0;
          g.strategy = static_cast<master::Strategy>(std::get<3>(slice));
        }
        ++g.total;
        if (rec->status == master::Status::Optimal) {
          ++g.solved;
          g.mean_iterations += static_cast<double>(rec->iterations);
          g.mean_time_s += rec->wall_time_s;
        }
        if (f == winner) ++g.fastest;
      }
    }
    for (auto& [f, g] : by_form) {
      if (g.solved > 0) {
        g.mean_iterations /= g.solved;
        g.mean_time_s /= g.solved;
      }
      if (f != static_cast<int>(sub::Formulation::BB)) {
        std::vector<double> bb_times, f_times;
        for (const auto& [instance, forms] : by_instance) {
          const auto bb = forms.find(static_cast<int>(sub::Formulation::BB));
          const auto me = forms.find(f);
          if (bb == forms.end() || me == forms.end()) continue;
          if (bb->second->status != master::Status::Optimal ||
              me->second->status != master::Status::Optimal)
            continue;
          bb_times.push_back(bb->second->wall_time_s);
          f_times.push_back(me->second->wall_time_s);
        }
        g.has_speedup = geometric_speedup(bb_times, f_times, &g.speedup_vs_bb);
      }
      out.push_back(g);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const GroupSummary& a, const GroupSummary& b) {
              return std::tuple(a.group, static_cast<int>(a.formulation), a.vi,
                                a.metric, static_cast<int>(a.strategy)) <
                     std::tuple(b.group, static_cast<int>(b.formulation), b.vi,
                                b.metric, static_cast<int>(b.strategy));
            });
  return out;
}

void write_records_csv(const std::vector<RunRecord>& records,
                       std::ostream& out) {
  out << "instance,formulation,vi,metric,strategy,status,objective,iterations,"
         "cuts_added,bnb_nodes,wall_time_s\n";
  for (const RunRecord& r : records) {
    out << r.instance << ',' << sub::to_string(r.formulation) << ','
        << (r.vi ? 1 : 0) << ',' << (r.metric ? 1 : 0) << ','
        << master::to_string(r.strategy) << ',' << master::to_string(r.status)
        << ',' << (r.has_objective ? fmt(r.objective) : "") << ','
        << r.iterations << ',' << r.cuts_added << ',' << r.bnb_nodes << ','
        << fmt(r.wall_time_s) << '\n';
  }
}

void write_summary_csv(const std::vector<GroupSummary>& groups,
                       std::ostream& out) {
  out << "group,formulation,vi,metric,strategy,solved,total,mean_iterations,"
         "mean_time_s,fastest,speedup_vs_bb\n";
  for (const GroupSummary& g : groups) {
    out << g.group << ',' << sub::to_string(g.formulation) << ','
        << (g.vi ? 1 : 0) << ',' << (g.metric ? 1 : 0) << ','
        << master::to_string(g.strategy) << ',' << g.solved << ',' << g.total
        << ',' << fmt(g.mean_iterations) << ',' << fmt(g.mean_time_s) << ','
        << g.fastest << ',' << (g.has_speedup ? fmt(g.speedup_vs_bb) : "")
        << '\n';
  }
}

std::string records_json(const std::vector<RunRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const RunRecord& r : records) {
    nlohmann::json j;
    j["instance"] = r.instance;
    j["formulation"] = sub::to_string(r.formulation);
    j["vi"] = r.vi;
    j["metric"] = r.metric;
    j["strategy"] = master::to_string(r.strategy);
    j["status"] = master::to_string(r.status);
    if (r.has_objective) j["objective"] = r.objective;
    j["iterations"] = r.iterations;
    j["cuts_added"] = r.cuts_added;
    j["bnb_nodes"] = r.bnb_nodes;
    j["wall_time_s"] = r.wall_time_s;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace ccnd::bench
