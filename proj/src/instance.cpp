#include "ccnd/instance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ccnd {

namespace {

std::string arc_label(int a) { return "arc " + std::to_string(a); }

}  // namespace

std::vector<std::string> validate(const Instance& inst) {
  std::vector<std::string> out;
  auto bad = [&out](const std::string& msg) { out.push_back(msg); };

  if (inst.num_nodes < 2) bad("instance needs at least 2 nodes");
  if (inst.commodities.empty()) bad("instance has no commodities");
  if (inst.scenarios.empty()) bad("instance has no scenarios");
  if (!(inst.alpha >= 0.0 && inst.alpha <= 1.0))
    bad("alpha " + std::to_string(inst.alpha) + " outside [0, 1]");

  for (int a = 0; a < inst.num_arcs(); ++a) {
    const Arc& arc = inst.arcs[a];
    if (arc.tail < 0 || arc.tail >= inst.num_nodes ||
        arc.head < 0 || arc.head >= inst.num_nodes)
      bad("endpoint out of range on " + arc_label(a));
    if (arc.tail == arc.head) bad("self-loop on " + arc_label(a));
    if (!(arc.capacity >= 0.0)) bad("negative capacity on " + arc_label(a));
    if (!(arc.fixed_cost >= 0.0)) bad("negative fixed cost on " + arc_label(a));
  }

  for (int k = 0; k < inst.num_commodities(); ++k) {
    const Commodity& com = inst.commodities[k];
    if (com.origin < 0 || com.origin >= inst.num_nodes ||
        com.destination < 0 || com.destination >= inst.num_nodes)
      bad("endpoint out of range on commodity " + std::to_string(k));
    else if (com.origin == com.destination)
      bad("commodity " + std::to_string(k) + " has origin == destination");
  }

  double mass = 0.0;
  for (int s = 0; s < inst.num_scenarios(); ++s) {
    const Scenario& sc = inst.scenarios[s];
    if (!(sc.probability > 0.0))
      bad("scenario " + std::to_string(s) + " has nonpositive probability");
    mass += sc.probability;
    if (sc.demand.size() != inst.num_commodities())
      bad("scenario " + std::to_string(s) + " demand length " +
          std::to_string(sc.demand.size()) + " != commodity count");
    for (int k = 0; k < sc.demand.size(); ++k)
      if (!(sc.demand[k] >= 0.0))
        bad("negative demand in scenario " + std::to_string(s));
  }
  if (!inst.scenarios.empty() && std::abs(mass - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "probabilities sum to " << mass;
    bad(msg.str());
  }
  return out;
}

std::vector<int> admissible_arcs(const Instance& inst, int k) {
  if (k < 0 || k >= inst.num_commodities())
    throw std::out_of_range("unknown commodity id " + std::to_string(k));
  const Commodity& com = inst.commodities[k];
  std::vector<int> ids;
  ids.reserve(inst.arcs.size());
  for (int a = 0; a < inst.num_arcs(); ++a) {
    const Arc& arc = inst.arcs[a];
    if (arc.head != com.origin && arc.tail != com.destination) ids.push_back(a);
  }
  return ids;
}

namespace {

using nlohmann::json;

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) { known = true; break; }
    if (!known)
      throw std::runtime_error(std::string("unknown key \"") + it.key() +
                               "\" in " + where);
  }
  for (const char* key : allowed)
    if (!obj.contains(key))
      throw std::runtime_error(std::string("missing key \"") + key + "\" in " +
                               where);
}

int as_int(const json& v, const char* what) {
  if (!v.is_number_integer())
    throw std::runtime_error(std::string(what) + " must be an integer");
  return v.get<int>();
}

double as_real(const json& v, const char* what) {
  if (!v.is_number())
    throw std::runtime_error(std::string(what) + " must be a number");
  return v.get<double>();
}

}  // namespace

Instance parse_instance(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("document is not an object");
  require_keys(doc, {"nodes", "arcs", "commodities", "scenarios", "alpha"},
               "instance");

  Instance inst;
  inst.num_nodes = as_int(doc["nodes"], "nodes");
  inst.alpha = as_real(doc["alpha"], "alpha");

  if (!doc["arcs"].is_array()) throw std::runtime_error("arcs must be an array");
  for (const json& row : doc["arcs"]) {
    if (!row.is_array() || row.size() != 4)
      throw std::runtime_error("each arc must be [tail, head, capacity, fixed_cost]");
    Arc arc;
    arc.tail = as_int(row[0], "arc tail");
    arc.head = as_int(row[1], "arc head");
    arc.capacity = as_real(row[2], "arc capacity");
    arc.fixed_cost = as_real(row[3], "arc fixed cost");
    inst.arcs.push_back(arc);
  }

  if (!doc["commodities"].is_array())
    throw std::runtime_error("commodities must be an array");
  for (const json& row : doc["commodities"]) {
    if (!row.is_array() || row.size() != 2)
      throw std::runtime_error("each commodity must be [origin, destination]");
    inst.commodities.push_back(
        {as_int(row[0], "origin"), as_int(row[1], "destination")});
  }

  if (!doc["scenarios"].is_array())
    throw std::runtime_error("scenarios must be an array");
  for (const json& row : doc["scenarios"]) {
    if (!row.is_object())
      throw std::runtime_error("each scenario must be an object");
    require_keys(row, {"p", "d"}, "scenario");
    Scenario sc;
    sc.probability = as_real(row["p"], "scenario probability");
    if (!row["d"].is_array())
      throw std::runtime_error("scenario demands must be an array");
    sc.demand.resize(static_cast<Eigen::Index>(row["d"].size()));
    Eigen::Index i = 0;
    for (const json& v : row["d"]) sc.demand[i++] = as_real(v, "demand");
    inst.scenarios.push_back(std::move(sc));
  }
  return inst;
}

std::string serialize_instance(const Instance& inst) {
  json arcs = json::array();
  for (const Arc& arc : inst.arcs)
    arcs.push_back({arc.tail, arc.head, arc.capacity, arc.fixed_cost});

  json commodities = json::array();
  for (const Commodity& com : inst.commodities)
    commodities.push_back({com.origin, com.destination});

  json scenarios = json::array();
  for (const Scenario& sc : inst.scenarios) {
    json d = json::array();
    for (Eigen::Index k = 0; k < sc.demand.size(); ++k) d.push_back(sc.demand[k]);
    scenarios.push_back({{"p", sc.probability}, {"d", d}});
  }

  // nlohmann::json orders object keys alphabetically, so the layout below is
  // stable across runs and platforms.
  json doc{{"nodes", inst.num_nodes},
           {"arcs", arcs},
           {"commodities", commodities},
           {"scenarios", scenarios},
           {"alpha", inst.alpha}};
  return doc.dump(2) + "\n";
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize_instance(inst);
}

}  // namespace ccnd
