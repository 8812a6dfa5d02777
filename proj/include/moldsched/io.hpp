#pragma once

#include <stdexcept>
#include <string>

#include "moldsched/bounds.hpp"
#include "moldsched/engine.hpp"
#include "moldsched/instances.hpp"
#include "moldsched/model.hpp"

namespace moldsched {

/// Parse failure with field context.
struct GraphIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GraphFile {
  TaskGraph graph;
  int procs = 1;
};

/// Graph file format (JSON):
///   {"version":1, "procs":P,
///    "tasks":[{"id":int, "model":{"kind":..., "w":..., "d":..., "c":...,
///              "pbar":..., "table":[...]}}, ...],
///    "edges":[[pred,succ], ...]}
/// Absent numeric fields default to 0; absent pbar defaults to P.
GraphFile read_graph(const std::string& path);
void write_graph(const TaskGraph& graph, int procs, const std::string& path);

/// {"makespan":num, "entries":[{"id":int,"start":num,"end":num,"procs":int}]}
std::string schedule_to_json(const Schedule& sched);
void write_schedule(const Schedule& sched, const std::string& path);

std::string report_to_json(const CompetitiveReport& rep);
void write_report(const CompetitiveReport& rep, const std::string& path);

/// Generator metadata and the constraint checklist for a layered
/// lower-bound instance, written alongside its graph file.
std::string lb_meta_to_json(const LBInstance& inst);

}  // namespace moldsched
