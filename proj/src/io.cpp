#include "moldsched/io.hpp"

#include <fstream>

#include "json.hpp"

namespace moldsched {

using nlohmann::json;

namespace {

json spec_to_json(const SpeedupSpec& spec) {
  json m;
  m["kind"] = model_name(spec.kind);
  switch (spec.kind) {
    case Model::Roofline:
      m["w"] = spec.w;
      if (spec.pbar > 0) m["pbar"] = spec.pbar;
      break;
    case Model::Communication:
      m["w"] = spec.w;
      m["c"] = spec.c;
      break;
    case Model::Amdahl:
      m["w"] = spec.w;
      m["d"] = spec.d;
      break;
    case Model::General:
      m["w"] = spec.w;
      m["d"] = spec.d;
      m["c"] = spec.c;
      if (spec.pbar > 0) m["pbar"] = spec.pbar;
      break;
    case Model::Tabulated:
      m["table"] = spec.table_values();
      break;
  }
  return m;
}

SpeedupSpec spec_from_json(const json& m, int procs, const std::string& where) {
  if (!m.contains("kind") || !m["kind"].is_string()) {
    throw GraphIoError(where + ": model needs a string \"kind\"");
  }
  Model kind;
  try {
    kind = model_from_name(m["kind"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw GraphIoError(where + ": " + e.what());
  }
  auto num = [&](const char* field) -> double {
    if (!m.contains(field)) return 0.0;
    if (!m[field].is_number()) {
      throw GraphIoError(where + ": \"" + field + "\" must be a number");
    }
    return m[field].get<double>();
  };
  SpeedupSpec spec;
  spec.kind = kind;
  spec.w = num("w");
  spec.d = num("d");
  spec.c = num("c");
  if (m.contains("pbar")) {
    if (!m["pbar"].is_number_integer()) {
      throw GraphIoError(where + ": \"pbar\" must be an integer");
    }
    spec.pbar = m["pbar"].get<int>();
  } else if (kind == Model::Roofline || kind == Model::General) {
    spec.pbar = procs;  // the parallelism limit defaults to the platform
  }
  if (kind == Model::Tabulated) {
    if (!m.contains("table") || !m["table"].is_array()) {
      throw GraphIoError(where + ": tabulated model needs a \"table\" array");
    }
    std::vector<double> table;
    for (const auto& v : m["table"]) {
      if (!v.is_number()) {
        throw GraphIoError(where + ": table entries must be numbers");
      }
      table.push_back(v.get<double>());
    }
    spec = SpeedupSpec::tabulated(std::move(table));
  }
  return spec;
}

}  // namespace

GraphFile read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphIoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw GraphIoError(path + ": " + e.what());
  }
  if (!j.is_object()) throw GraphIoError(path + ": top level must be an object");
  if (!j.contains("procs") || !j["procs"].is_number_integer()) {
    throw GraphIoError(path + ": missing integer \"procs\"");
  }
  GraphFile gf;
  gf.procs = j["procs"].get<int>();
  if (gf.procs < 1) throw GraphIoError(path + ": procs must be positive");
  if (!j.contains("tasks") || !j["tasks"].is_array()) {
    throw GraphIoError(path + ": missing \"tasks\" array");
  }
  if (!j.contains("edges") || !j["edges"].is_array()) {
    throw GraphIoError(path + ": missing \"edges\" array");
  }
  int index = 0;
  for (const auto& tj : j["tasks"]) {
    const std::string where = path + ": tasks[" + std::to_string(index) + "]";
    if (!tj.is_object() || !tj.contains("id") ||
        !tj["id"].is_number_integer()) {
      throw GraphIoError(where + ": needs an integer \"id\"");
    }
    if (!tj.contains("model") || !tj["model"].is_object()) {
      throw GraphIoError(where + ": needs a \"model\" object");
    }
    Task t;
    t.id = tj["id"].get<int>();
    t.spec = spec_from_json(tj["model"], gf.procs, where);
    const auto issues = t.spec.validate(gf.procs);
    if (!issues.empty()) {
      throw GraphIoError(where + ": " + issues.front());
    }
    gf.graph.tasks.push_back(std::move(t));
    ++index;
  }
  index = 0;
  for (const auto& ej : j["edges"]) {
    const std::string where = path + ": edges[" + std::to_string(index) + "]";
    if (!ej.is_array() || ej.size() != 2 || !ej[0].is_number_integer() ||
        !ej[1].is_number_integer()) {
      throw GraphIoError(where + ": must be an [pred, succ] integer pair");
    }
    gf.graph.edges.push_back({ej[0].get<int>(), ej[1].get<int>()});
    ++index;
  }
  return gf;
}

void write_graph(const TaskGraph& graph, int procs, const std::string& path) {
  json j;
  j["version"] = 1;
  j["procs"] = procs;
  j["tasks"] = json::array();
  for (const auto& t : graph.tasks) {
    j["tasks"].push_back({{"id", t.id}, {"model", spec_to_json(t.spec)}});
  }
  j["edges"] = json::array();
  for (const auto& [u, v] : graph.edges) {
    j["edges"].push_back({u, v});
  }
  std::ofstream out(path);
  if (!out) throw GraphIoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::string schedule_to_json(const Schedule& sched) {
  json j;
  j["makespan"] = sched.makespan;
  j["entries"] = json::array();
  for (const auto& [id, e] : sched.entries) {
    j["entries"].push_back({{"id", id},
                            {"start", e.start},
                            {"end", e.end},
                            {"procs", e.procs}});
  }
  return j.dump(2);
}

void write_schedule(const Schedule& sched, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw GraphIoError("cannot write " + path);
  out << schedule_to_json(sched) << "\n";
}

std::string report_to_json(const CompetitiveReport& rep) {
  json j;
  j["makespan"] = rep.makespan;
  j["lower_bound"] = {{"area_bound", rep.lb.area_bound},
                      {"cp_bound", rep.lb.cp_bound},
                      {"value", rep.lb.value}};
  j["oracle_opt"] = rep.oracle_opt ? json(*rep.oracle_opt) : json(nullptr);
  j["oracle_exact"] = rep.oracle_exact;
  j["ratio_vs_lb"] = rep.ratio_vs_lb;
  j["ratio_vs_opt"] =
      rep.ratio_vs_opt ? json(*rep.ratio_vs_opt) : json(nullptr);
  j["model"] = model_name(rep.kind);
  j["model_ratio"] = rep.model_ratio;
  j["intervals"] = {{"low_util_time", rep.intervals.low_util},
                    {"high_util_time", rep.intervals.high_util}};
  return j.dump(2);
}

void write_report(const CompetitiveReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw GraphIoError("cannot write " + path);
  out << report_to_json(rep) << "\n";
}

std::string lb_meta_to_json(const LBInstance& inst) {
  json j;
  j["model"] = model_name(inst.kind);
  j["procs"] = inst.P;
  j["eps"] = inst.eps;
  j["wbar"] = inst.wbar;
  j["X"] = inst.X;
  j["K"] = inst.K;
  j["Y"] = inst.Y;
  j["Z"] = inst.Z;
  j["specs"] = {{"A", spec_to_json(inst.spec_A)},
                {"B", spec_to_json(inst.spec_B)},
                {"C", spec_to_json(inst.spec_C)},
                {"D", spec_to_json(inst.spec_D)}};
  j["policy_alloc"] = {{"A", inst.p_A}, {"B", inst.p_B},
                       {"C", inst.p_C}, {"D", inst.p_D}};
  j["policy_time"] = {{"A", inst.t_A}, {"B", inst.t_B},
                      {"C", inst.t_C}, {"D", inst.t_D}};
  j["reference_alloc"] = {{"A", inst.pstar_A}, {"B", inst.pstar_B}};
  j["reference_time"] = {{"A", inst.tstar_A}, {"B", inst.tstar_B}};
  j["id_layout"] = {{"layer_stride", inst.X + 2},
                    {"layers", inst.Z},
                    {"tail_chain", inst.Y},
                    {"order", "D, B_1..B_X, C per layer, then the A chain"}};
  j["constraints"] = json::object();
  for (const auto& c : inst.constraint_report) {
    j["constraints"][c.label] = {{"ok", c.ok}, {"detail", c.detail}};
  }
  return j.dump(2);
}

}  // namespace moldsched
