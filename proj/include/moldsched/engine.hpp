#pragma once

#include <map>
#include <string>
#include <vector>

#include "moldsched/allocation.hpp"
#include "moldsched/model.hpp"

namespace moldsched {

/// Relative tolerance under which two event times are treated as the same
/// instant. Adversarial instances are tie-heavy by construction.
constexpr double kTimeTol = 1e-9;

inline double time_tol(double t) {
  return kTimeTol * (t < 1.0 ? 1.0 : t);
}

/// Deterministic processor-allocation rule. All kinds except EvenSplit are
/// local: the choice depends only on the task's speedup spec and the
/// platform size, never on the task's position in the graph. EvenSplit
/// divides P as evenly as possible among the tasks revealed at the same
/// instant (spare processors to the lowest ids); it is not local, but it
/// treats identical tasks symmetrically.
class AllocationPolicy {
 public:
  enum class Kind { Paper, MinTime, Sequential, Fixed, Custom, EvenSplit };

  /// Two-step rule with the per-model parameter row.
  static AllocationPolicy paper();
  /// Always p_max (greedy time-minimal).
  static AllocationPolicy mintime();
  /// Always one processor.
  static AllocationPolicy sequential();
  /// Always k processors (validated against P at simulation time).
  static AllocationPolicy fixed(int k);
  /// Lookup by spec key; throws for specs not in the table.
  static AllocationPolicy custom(std::map<std::string, int> table);
  /// Split P among the simultaneous reveal batch.
  static AllocationPolicy even_split();

  /// Parses "paper" | "mintime" | "seq" | "fixed:<k>" | "fig6b".
  static AllocationPolicy from_name(const std::string& name);

  /// Per-task allocation; throws for EvenSplit, which has no per-task form.
  int operator()(const SpeedupSpec& spec, int P) const;
  bool local() const { return kind_ != Kind::EvenSplit; }
  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  Kind kind_ = Kind::Paper;
  int fixed_k_ = 1;
  std::map<std::string, int> table_;
  std::string name_ = "paper";
};

struct ScheduleEntry {
  Time start = 0.0;
  Time end = 0.0;
  int procs = 1;
};

/// Non-preemptive schedule: per-task (start, end, processors) plus the
/// makespan. Keyed by task id.
struct Schedule {
  std::map<int, ScheduleEntry> entries;
  Time makespan = 0.0;
};

/// Online list scheduling. At time zero and at every completion event,
/// tasks whose predecessors have all completed are revealed in ascending
/// id order, allocated through the policy, and appended to a FIFO queue.
/// The whole queue is then scanned in order and every task that fits in
/// the currently free processors starts immediately; a task that does not
/// fit is skipped without blocking later ones.
///
/// Throws std::invalid_argument when the graph does not validate or the
/// policy yields an allocation outside [1, P].
Schedule simulate(const TaskGraph& graph, int P, const AllocationPolicy& policy);

struct ScheduleCheck {
  bool ok = false;
  std::vector<std::string> violations;
};

/// Checks the three schedule invariants: durations match the specs'
/// execution times, successors never start before predecessors end, and
/// total usage stays within P at every instant.
ScheduleCheck validate_schedule(const TaskGraph& graph, const Schedule& sched,
                                int P);

enum class IntervalClass { Low, High };

/// A maximal span between consecutive schedule events with constant
/// processor utilization. High means utilization >= ceil((1 - mu) * P).
struct IntervalRecord {
  Time start = 0.0;
  Time end = 0.0;
  int utilization = 0;
  IntervalClass cls = IntervalClass::Low;
};

/// Cuts the schedule at every distinct start/end and classifies each
/// interval against the ceil((1-mu)P) utilization threshold. Intervals
/// partition [0, makespan).
std::vector<IntervalRecord> interval_profile(const Schedule& sched, int P,
                                             double mu);

/// Dependency path built backwards from a task finishing at the makespan,
/// always prepending the predecessor with the latest end time. Under the
/// paper-policy simulation every low-utilization instant is covered by a
/// task of this chain.
std::vector<int> blocking_chain(const TaskGraph& graph, const Schedule& sched);

/// Instant at which a task became available: max predecessor end (0 for
/// sources). The task sat in the waiting queue during [reveal, start).
std::map<int, Time> reveal_times(const TaskGraph& graph, const Schedule& sched);

}  // namespace moldsched
