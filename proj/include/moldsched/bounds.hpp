#pragma once

#include <optional>

#include "moldsched/engine.hpp"
#include "moldsched/model.hpp"

namespace moldsched {

/// Makespan lower bound from the per-task extremes: total minimum area
/// spread over P processors, and the critical path weighted by minimum
/// execution times. Both undercut any feasible schedule's allocations, so
/// value <= T_opt <= T for every valid schedule.
struct LowerBound {
  Time area_bound = 0.0;  // sum of a_min over P
  Time cp_bound = 0.0;    // longest path by t_min
  Time value = 0.0;       // max of the two
};

LowerBound lower_bound(const TaskGraph& graph, int P);

struct OracleLimits {
  int max_tasks = 6;
  int max_procs = 8;
  long long node_budget = 30'000'000;
};

struct OracleResult {
  Schedule schedule;
  bool optimal = true;  // false when the node budget ran out
  long long nodes = 0;
};

/// Exact minimum makespan for tiny instances: enumerates per-task
/// allocations in [1, p_max] (with area/critical-path pruning against the
/// incumbent) and, per allocation vector, searches left-shifted schedules
/// by branching over every subset of ready tasks that fits at each event
/// time, including deliberate delays.
///
/// Throws std::invalid_argument when the instance exceeds the limits. A
/// drained node budget returns the best schedule found with optimal=false.
OracleResult brute_force_optimal(const TaskGraph& graph, int P,
                                 const OracleLimits& limits = {});

/// The least general model family covering every task in the graph
/// (Tabulated counts as General).
Model graph_kind(const TaskGraph& graph);

struct IntervalSummary {
  Time low_util = 0.0;   // total duration below the ceil((1-mu)P) threshold
  Time high_util = 0.0;  // total duration at or above it
};

struct CompetitiveReport {
  Time makespan = 0.0;
  LowerBound lb;
  std::optional<Time> oracle_opt;
  bool oracle_exact = true;
  double ratio_vs_lb = 0.0;
  std::optional<double> ratio_vs_opt;
  double model_ratio = 0.0;  // 1/mu for the graph's model family
  Model kind = Model::General;
  IntervalSummary intervals;
};

/// Simulates, bounds, and (optionally, within the oracle limits) solves the
/// instance exactly, then assembles the ratios.
CompetitiveReport competitive_report(const TaskGraph& graph, int P,
                                     const AllocationPolicy& policy,
                                     bool with_oracle,
                                     const OracleLimits& limits = {});

}  // namespace moldsched
