#pragma once

#include <memory>
#include <string>
#include <vector>

namespace moldsched {

using Time = double;
using Area = double;

/// Speedup law families supported by the simulator. The first four are
/// closed-form; Tabulated carries an explicit time-per-processor-count
/// vector and may be an arbitrary (non-monotonic) function.
enum class Model { Roofline, Communication, Amdahl, General, Tabulated };

const char* model_name(Model m);
Model model_from_name(const std::string& name);

/// Execution-time law of a single task:
///
///   t(p) = w / min(p, pbar) + d + c * (p - 1)
///
/// where w is the parallelizable work, d the sequential work, c the
/// per-processor overhead and pbar the maximum degree of parallelism.
/// Roofline fixes d = c = 0, Communication fixes d = 0 (pbar unbounded),
/// Amdahl fixes c = 0 (pbar unbounded). Tabulated specs ignore the
/// parameters and read times straight from `table` (1-based by processor
/// count, stored 0-based).
struct SpeedupSpec {
  Model kind = Model::General;
  double w = 0.0;
  double d = 0.0;
  double c = 0.0;
  int pbar = 0;  // 0 means "no limit" (clamped to P at evaluation time)
  // Immutable and shared: a tabulated graph typically reuses one table
  // across thousands of tasks.
  std::shared_ptr<const std::vector<double>> table;

  static SpeedupSpec roofline(double w, int pbar = 0);
  static SpeedupSpec communication(double w, double c);
  static SpeedupSpec amdahl(double w, double d);
  static SpeedupSpec general(double w, double d, double c, int pbar = 0);
  static SpeedupSpec tabulated(std::vector<double> table);

  const std::vector<double>& table_values() const;

  /// Per-kind field constraints; empty result means the spec is valid for
  /// a platform with P processors.
  std::vector<std::string> validate(int P) const;

  /// Canonical text form; equal specs produce equal keys.
  std::string key() const;

  bool operator==(const SpeedupSpec& other) const;
};

struct Task {
  int id = 0;
  SpeedupSpec spec;
};

/// Immutable DAG of moldable tasks. Edges are (predecessor, successor)
/// id pairs. Construction does not validate; see validate_graph().
struct TaskGraph {
  std::vector<Task> tasks;
  std::vector<std::pair<int, int>> edges;

  const Task* find(int id) const;
  std::size_t size() const { return tasks.size(); }
};

/// Time/area extremes of a spec on a P-processor platform:
/// p_max is the smallest processor count minimizing execution time,
/// t_min the time at p_max, and a_min the minimum achievable area.
struct ExtremalStats {
  int p_max = 1;
  Time t_min = 0.0;
  Area a_min = 0.0;
};

/// Execution time of `spec` on p of P processors.
/// Throws std::domain_error unless 1 <= p <= P.
Time exec_time(const SpeedupSpec& spec, int p, int P);

/// Area p * t(p).
Area area(const SpeedupSpec& spec, int p, int P);

ExtremalStats extremal_stats(const SpeedupSpec& spec, int P);

struct GraphCheck {
  bool ok = false;
  std::vector<std::string> violations;
  std::vector<int> topo_order;  // ascending-id tie-break; empty unless ok
};

/// Structural validation: duplicate ids, dangling edge endpoints, cycles.
/// Violations are reported as data, never thrown.
GraphCheck validate_graph(const TaskGraph& graph);

}  // namespace moldsched
