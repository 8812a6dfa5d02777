#include "moldsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace moldsched {

const char* model_name(Model m) {
  switch (m) {
    case Model::Roofline: return "roofline";
    case Model::Communication: return "communication";
    case Model::Amdahl: return "amdahl";
    case Model::General: return "general";
    case Model::Tabulated: return "tabulated";
  }
  return "unknown";
}

Model model_from_name(const std::string& name) {
  if (name == "roofline") return Model::Roofline;
  if (name == "communication") return Model::Communication;
  if (name == "amdahl") return Model::Amdahl;
  if (name == "general") return Model::General;
  if (name == "tabulated") return Model::Tabulated;
  throw std::invalid_argument("unknown model kind: " + name);
}

SpeedupSpec SpeedupSpec::roofline(double w, int pbar) {
  SpeedupSpec s;
  s.kind = Model::Roofline;
  s.w = w;
  s.pbar = pbar;
  return s;
}

SpeedupSpec SpeedupSpec::communication(double w, double c) {
  SpeedupSpec s;
  s.kind = Model::Communication;
  s.w = w;
  s.c = c;
  return s;
}

SpeedupSpec SpeedupSpec::amdahl(double w, double d) {
  SpeedupSpec s;
  s.kind = Model::Amdahl;
  s.w = w;
  s.d = d;
  return s;
}

SpeedupSpec SpeedupSpec::general(double w, double d, double c, int pbar) {
  SpeedupSpec s;
  s.kind = Model::General;
  s.w = w;
  s.d = d;
  s.c = c;
  s.pbar = pbar;
  return s;
}

SpeedupSpec SpeedupSpec::tabulated(std::vector<double> table) {
  SpeedupSpec s;
  s.kind = Model::Tabulated;
  s.table = std::make_shared<const std::vector<double>>(std::move(table));
  return s;
}

const std::vector<double>& SpeedupSpec::table_values() const {
  static const std::vector<double> empty;
  return table ? *table : empty;
}

std::vector<std::string> SpeedupSpec::validate(int P) const {
  std::vector<std::string> issues;
  auto bad = [&](const std::string& msg) { issues.push_back(msg); };
  if (!std::isfinite(w) || w < 0) bad("w must be a finite nonnegative real");
  if (!std::isfinite(d) || d < 0) bad("d must be a finite nonnegative real");
  if (!std::isfinite(c) || c < 0) bad("c must be a finite nonnegative real");
  if (pbar < 0) bad("pbar must be positive when given");
  switch (kind) {
    case Model::Roofline:
      if (w <= 0) bad("roofline requires w > 0");
      if (d != 0 || c != 0) bad("roofline requires d = c = 0");
      break;
    case Model::Communication:
      if (d != 0) bad("communication requires d = 0");
      break;
    case Model::Amdahl:
      if (c != 0) bad("amdahl requires c = 0");
      break;
    case Model::General:
      break;
    case Model::Tabulated:
      if (static_cast<int>(table_values().size()) != P) {
        bad("tabulated table length must equal P");
      }
      for (double t : table_values()) {
        if (!std::isfinite(t) || t <= 0) {
          bad("tabulated entries must be finite positive");
          break;
        }
      }
      break;
  }
  return issues;
}

std::string SpeedupSpec::key() const {
  std::ostringstream os;
  os.precision(17);
  os << model_name(kind) << '|' << w << '|' << d << '|' << c << '|' << pbar;
  if (kind == Model::Tabulated) {
    // FNV-1a over the entries; full tables can be very long.
    std::uint64_t h = 1469598103934665603ull;
    for (double t : table_values()) {
      std::uint64_t bits;
      std::memcpy(&bits, &t, sizeof(bits));
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xff;
        h *= 1099511628211ull;
      }
    }
    os << "|n" << table_values().size() << "|h" << h;
  }
  return os.str();
}

bool SpeedupSpec::operator==(const SpeedupSpec& other) const {
  return kind == other.kind && w == other.w && d == other.d && c == other.c &&
         pbar == other.pbar &&
         (table == other.table || table_values() == other.table_values());
}

const Task* TaskGraph::find(int id) const {
  for (const auto& t : tasks) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

namespace {

int effective_pbar(const SpeedupSpec& spec, int P) {
  // Communication and Amdahl have no parallelism limit by definition.
  if (spec.kind == Model::Communication || spec.kind == Model::Amdahl) return P;
  if (spec.pbar <= 0) return P;
  return std::min(spec.pbar, P);
}

// Convex closed-form time without the pbar clamp; valid for p in [1, pbar].
double unclamped_time(const SpeedupSpec& spec, double p) {
  return spec.w / p + spec.d + spec.c * (p - 1.0);
}

}  // namespace

Time exec_time(const SpeedupSpec& spec, int p, int P) {
  if (p < 1 || p > P) {
    throw std::domain_error("processor count " + std::to_string(p) +
                            " outside [1, " + std::to_string(P) + "]");
  }
  if (spec.kind == Model::Tabulated) {
    const auto& tab = spec.table_values();
    if (p > static_cast<int>(tab.size())) {
      throw std::domain_error("tabulated spec has no entry for p = " +
                              std::to_string(p));
    }
    return tab[static_cast<std::size_t>(p - 1)];
  }
  const int limit = effective_pbar(spec, P);
  return spec.w / std::min(p, limit) + spec.d + spec.c * (p - 1.0);
}

Area area(const SpeedupSpec& spec, int p, int P) {
  return static_cast<double>(p) * exec_time(spec, p, P);
}

ExtremalStats extremal_stats(const SpeedupSpec& spec, int P) {
  ExtremalStats st;
  if (spec.kind == Model::Tabulated) {
    const auto& tab = spec.table_values();
    if (tab.empty()) {
      throw std::domain_error("tabulated spec has an empty table");
    }
    int best = 1;
    for (int p = 2; p <= static_cast<int>(tab.size()); ++p) {
      if (tab[p - 1] < tab[best - 1]) best = p;
    }
    st.p_max = best;
    st.t_min = tab[best - 1];
    double amin = tab[0];
    for (int p = 2; p <= static_cast<int>(tab.size()); ++p) {
      amin = std::min(amin, p * tab[p - 1]);
    }
    st.a_min = amin;
    return st;
  }

  if (spec.w <= 0) {
    // Degenerate: time is d + c(p-1), nondecreasing, so one processor wins.
    st.p_max = 1;
  } else if (spec.c <= 0) {
    st.p_max = effective_pbar(spec, P);
  } else {
    const double s = std::sqrt(spec.w / spec.c);
    const int lo = std::max(1, static_cast<int>(std::floor(s)));
    const int hi = std::max(1, static_cast<int>(std::ceil(s)));
    const int ptilde =
        unclamped_time(spec, lo) <= unclamped_time(spec, hi) ? lo : hi;
    st.p_max = std::min(effective_pbar(spec, P), ptilde);
  }
  st.t_min = exec_time(spec, st.p_max, P);
  st.a_min = area(spec, 1, P);
  return st;
}

GraphCheck validate_graph(const TaskGraph& graph) {
  GraphCheck check;
  std::set<int> ids;
  for (const auto& t : graph.tasks) {
    if (!ids.insert(t.id).second) {
      check.violations.push_back("duplicate task id " + std::to_string(t.id));
    }
  }
  for (const auto& [u, v] : graph.edges) {
    if (!ids.count(u)) {
      check.violations.push_back("edge references missing task " +
                                 std::to_string(u));
    }
    if (!ids.count(v)) {
      check.violations.push_back("edge references missing task " +
                                 std::to_string(v));
    }
  }
  if (!check.violations.empty()) return check;

  // Kahn's algorithm with a min-heap gives the deterministic topological
  // order (ascending id among ready tasks).
  std::map<int, int> indeg;
  std::map<int, std::vector<int>> succs;
  for (int id : ids) indeg[id] = 0;
  for (const auto& [u, v] : graph.edges) {
    ++indeg[v];
    succs[u].push_back(v);
  }
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (const auto& [id, deg] : indeg) {
    if (deg == 0) ready.push(id);
  }
  std::vector<int> order;
  while (!ready.empty()) {
    int id = ready.top();
    ready.pop();
    order.push_back(id);
    for (int v : succs[id]) {
      if (--indeg[v] == 0) ready.push(v);
    }
  }
  if (order.size() != ids.size()) {
    check.violations.push_back("graph contains a cycle");
    return check;
  }
  check.ok = true;
  check.topo_order = std::move(order);
  return check;
}

}  // namespace moldsched
