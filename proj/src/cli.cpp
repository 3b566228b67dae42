#include "ccnd/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "ccnd/bench.hpp"
#include "ccnd/generator.hpp"
#include "ccnd/instance.hpp"
#include "ccnd/master.hpp"
#include "ccnd/oracle.hpp"

namespace ccnd::cli {

namespace {

sub::Formulation formulation_from(const std::string& name) {
  if (name == "bb") return sub::Formulation::BB;
  if (name == "flowmis") return sub::Formulation::FlowMIS;
  if (name == "mis") return sub::Formulation::MIS;
  if (name == "snc") return sub::Formulation::SNC;
  throw std::invalid_argument("unknown formulation: " + name);
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> parts;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

std::string instance_name_of(const std::string& path) {
  std::string name = path;
  const std::size_t slash = name.find_last_of("/\\");
  if (slash != std::string::npos) name = name.substr(slash + 1);
  if (name.size() > 5 && name.substr(name.size() - 5) == ".json")
    name = name.substr(0, name.size() - 5);
  return name;
}

int log_level() {
  const char* env = std::getenv("CCND_LOG");
  if (!env || !*env) return 0;
  return std::atoi(env);
}

std::string design_json(const oracle::DesignResult& res) {
  std::ostringstream os;
  os << "{\n  \"feasible\": " << (res.feasible ? "true" : "false")
     << ",\n  \"objective\": " << res.objective << ",\n  \"y\": [";
  for (int a = 0; a < res.y.size(); ++a)
    os << (a ? ", " : "") << res.y[a];
  os << "],\n  \"z\": [";
  for (int s = 0; s < res.z.size(); ++s)
    os << (s ? ", " : "") << res.z[s];
  os << "]\n}\n";
  return os.str();
}

Instance load_overridden(const std::string& path,
                         const std::optional<double>& alpha) {
  Instance inst = load_instance(path);
  if (alpha) inst.alpha = *alpha;
  return inst;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"chance-constrained capacitated network design solver"};
  app.require_subcommand(1);

  // solve
  std::string sv_path, sv_formulation = "flowmis", sv_strategy = "tree";
  std::string sv_out;
  bool sv_vi = true, sv_metric = false;
  std::optional<double> sv_alpha;
  double sv_time = 60.0;
  long sv_nodes = std::numeric_limits<long>::max();
  unsigned long sv_seed = 0;
  int sv_deq_rows = 2500;
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one instance");
  solve_cmd->add_option("instance", sv_path, "instance file")->required();
  solve_cmd->add_option("--formulation", sv_formulation,
                        "bb|flowmis|mis|snc|deq");
  solve_cmd->add_flag("--vi,!--no-vi", sv_vi, "marginal-demand flow block");
  solve_cmd->add_flag("--metric,!--no-metric", sv_metric,
                      "strengthen cut right-hand sides");
  solve_cmd->add_option("--strategy", sv_strategy, "tree|iterative");
  solve_cmd->add_option("--alpha", sv_alpha, "override the instance alpha");
  solve_cmd->add_option("--time-limit", sv_time, "seconds, default 60");
  solve_cmd->add_option("--node-limit", sv_nodes, "branch-and-bound nodes");
  solve_cmd->add_option("--seed", sv_seed, "recorded in the log");
  solve_cmd->add_option("--deq-rows", sv_deq_rows,
                        "row budget for --formulation deq");
  solve_cmd->add_option("--out", sv_out, "also write the JSON result here");

  // generate
  GeneratorSpec gn_spec;
  int gn_count = 1;
  bool gn_single = false;
  std::string gn_out;
  CLI::App* gen_cmd = app.add_subcommand("generate", "write random instances");
  gen_cmd->add_option("--nodes", gn_spec.num_nodes, "default 10");
  gen_cmd->add_option("--arcs", gn_spec.num_arcs, "default 60");
  gen_cmd->add_option("--commodities", gn_spec.num_commodities, "default 10");
  gen_cmd->add_option("--scenarios", gn_spec.num_scenarios, "default 16");
  gen_cmd->add_option("--ratio", gn_spec.capacity_ratio,
                      "demand tightness, default 1");
  gen_cmd->add_option("--alpha", gn_spec.alpha, "default 0.1");
  gen_cmd->add_option("--seed", gn_spec.seed, "default 0");
  gen_cmd->add_option("--count", gn_count,
                      "instances to write (seeds seed..seed+count-1)");
  gen_cmd->add_flag("--single-commodity", gn_single,
                    "keep only commodity 0 of each instance");
  gen_cmd->add_option("--out", gn_out,
                      "output file (count 1) or prefix for <out>-<i>.json");

  // validate
  std::string vd_path;
  CLI::App* val_cmd = app.add_subcommand("validate", "check an instance file");
  val_cmd->add_option("instance", vd_path, "instance file")->required();

  // oracle
  std::string or_path, or_method = "deq";
  std::optional<double> or_alpha;
  int or_deq_rows = 2500;
  CLI::App* orc_cmd =
      app.add_subcommand("oracle", "reference solves of one instance");
  orc_cmd->add_option("instance", or_path, "instance file")->required();
  orc_cmd->add_option("--method", or_method, "deq|brute");
  orc_cmd->add_option("--alpha", or_alpha, "override the instance alpha");
  orc_cmd->add_option("--deq-rows", or_deq_rows, "row budget for deq");

  // bench
  std::vector<std::string> bn_paths;
  std::string bn_formulations = "bb,flowmis,mis,snc";
  std::string bn_vi = "on", bn_metric = "off", bn_strategy = "tree";
  std::string bn_records, bn_summary, bn_json;
  double bn_time = 60.0;
  int bn_jobs = 1;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "run a configuration grid over a suite");
  bench_cmd->add_option("instances", bn_paths, "instance files");
  bench_cmd->add_option("--formulations", bn_formulations,
                        "comma list of bb|flowmis|mis|snc");
  bench_cmd->add_option("--vi", bn_vi, "comma list of on|off");
  bench_cmd->add_option("--metric", bn_metric, "comma list of on|off");
  bench_cmd->add_option("--strategy", bn_strategy, "tree|iterative");
  bench_cmd->add_option("--time-limit", bn_time, "seconds per run");
  bench_cmd->add_option("--jobs", bn_jobs, "worker threads");
  bench_cmd->add_option("--records", bn_records, "write per-run CSV here");
  bench_cmd->add_option("--summary", bn_summary, "write summary CSV here");
  bench_cmd->add_option("--json", bn_json, "write per-run JSON here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve_cmd->parsed()) {
      const Instance inst = load_overridden(sv_path, sv_alpha);
      master::SolveResult res;
      if (sv_formulation == "deq") {
        const oracle::DesignResult deq = oracle::solve_deq(inst, sv_deq_rows);
        res.status = deq.feasible ? master::Status::Optimal
                                  : master::Status::Infeasible;
        res.has_solution = deq.feasible;
        res.objective = deq.objective;
        res.y = deq.y;
        res.z = deq.z;
      } else {
        master::SolveOptions opts;
        opts.formulation = formulation_from(sv_formulation);
        opts.strategy = sv_strategy == "iterative" ? master::Strategy::Iterative
                                                   : master::Strategy::SingleTree;
        if (sv_strategy != "tree" && sv_strategy != "iterative")
          throw std::invalid_argument("unknown strategy: " + sv_strategy);
        opts.use_vis = sv_vi;
        opts.use_metric = sv_metric;
        opts.time_limit_s = sv_time;
        opts.node_limit = sv_nodes;
        opts.seed = sv_seed;
        if (log_level() >= 1) opts.log = &err;
        if (log_level() >= 2) opts.cut_trace = &err;
        res = master::solve(inst, opts);
      }
      const std::string json = master::to_json(res);
      out << json;
      if (!sv_out.empty()) write_text_file(sv_out, json);
      if (res.status == master::Status::Optimal) return 0;
      return res.status == master::Status::TimeLimit ? 2 : 1;
    }

    if (gen_cmd->parsed()) {
      if (gn_count < 1) throw std::invalid_argument("count must be positive");
      if (gn_count > 1 && gn_out.empty())
        throw std::invalid_argument("--count above 1 needs --out as a prefix");
      for (int i = 0; i < gn_count; ++i) {
        GeneratorSpec spec = gn_spec;
        spec.seed = gn_spec.seed + static_cast<std::uint64_t>(i);
        Instance inst = generate_instance(spec);
        if (gn_single) {
          inst.commodities.resize(1);
          for (Scenario& sc : inst.scenarios)
            sc.demand.conservativeResize(1);
        }
        const std::string text = serialize_instance(inst);
        if (gn_out.empty())
          out << text;
        else if (gn_count == 1)
          write_text_file(gn_out, text);
        else
          write_text_file(gn_out + "-" + std::to_string(i) + ".json", text);
      }
      return 0;
    }

    if (val_cmd->parsed()) {
      Instance inst;
      try {
        inst = load_instance(vd_path);
      } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
      }
      const std::vector<std::string> problems = validate(inst);
      for (const std::string& p : problems) err << p << "\n";
      if (!problems.empty()) return 1;
      out << "ok\n";
      return 0;
    }

    if (orc_cmd->parsed()) {
      const Instance inst = load_overridden(or_path, or_alpha);
      oracle::DesignResult res;
      if (or_method == "deq")
        res = oracle::solve_deq(inst, or_deq_rows);
      else if (or_method == "brute")
        res = oracle::brute_force_design(inst);
      else
        throw std::invalid_argument("unknown method: " + or_method);
      out << design_json(res);
      return res.feasible ? 0 : 1;
    }

    if (bench_cmd->parsed()) {
      std::vector<bool> vi_grid, metric_grid;
      for (const std::string& v : split_list(bn_vi)) {
        if (v != "on" && v != "off")
          throw std::invalid_argument("--vi entries must be on or off");
        vi_grid.push_back(v == "on");
      }
      for (const std::string& v : split_list(bn_metric)) {
        if (v != "on" && v != "off")
          throw std::invalid_argument("--metric entries must be on or off");
        metric_grid.push_back(v == "on");
      }
      if (bn_strategy != "tree" && bn_strategy != "iterative")
        throw std::invalid_argument("unknown strategy: " + bn_strategy);

      std::vector<bench::RunSpec> specs;
      for (const std::string& path : bn_paths)
        for (const std::string& fname : split_list(bn_formulations))
          for (const bool vi : vi_grid)
            for (const bool metric : metric_grid) {
              bench::RunSpec spec;
              spec.instance_path = path;
              spec.instance_name = instance_name_of(path);
              spec.options.formulation = formulation_from(fname);
              spec.options.strategy = bn_strategy == "iterative"
                                          ? master::Strategy::Iterative
                                          : master::Strategy::SingleTree;
              spec.options.use_vis = vi;
              spec.options.use_metric = metric;
              spec.options.time_limit_s = bn_time;
              specs.push_back(std::move(spec));
            }

      const std::vector<bench::RunRecord> records =
          bench::run_suite(specs, bn_jobs);
      const std::vector<bench::GroupSummary> groups = bench::aggregate(records);
      bench::write_summary_csv(groups, out);
      if (!bn_records.empty()) {
        std::ostringstream os;
        bench::write_records_csv(records, os);
        write_text_file(bn_records, os.str());
      }
      if (!bn_summary.empty()) {
        std::ostringstream os;
        bench::write_summary_csv(groups, os);
        write_text_file(bn_summary, os.str());
      }
      if (!bn_json.empty()) write_text_file(bn_json, bench::records_json(records));
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace ccnd::cli
