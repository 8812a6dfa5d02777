#include "moldsched/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace moldsched {

LowerBound lower_bound(const TaskGraph& graph, int P) {
  GraphCheck check = validate_graph(graph);
  if (!check.ok) {
    throw std::invalid_argument("graph does not validate: " +
                                check.violations.front());
  }
  LowerBound lb;
  std::map<int, double> tmin;
  for (const auto& t : graph.tasks) {
    const ExtremalStats st = extremal_stats(t.spec, P);
    lb.area_bound += st.a_min;
    tmin[t.id] = st.t_min;
  }
  lb.area_bound /= P;

  std::map<int, std::vector<int>> preds;
  for (const auto& [u, v] : graph.edges) preds[v].push_back(u);
  std::map<int, double> reach;  // longest path ending at id, inclusive
  for (int id : check.topo_order) {
    double before = 0.0;
    for (int p : preds[id]) before = std::max(before, reach[p]);
    reach[id] = before + tmin[id];
    lb.cp_bound = std::max(lb.cp_bound, reach[id]);
  }
  lb.value = std::max(lb.area_bound, lb.cp_bound);
  return lb;
}

namespace {

constexpr int kHardTaskCap = 20;

struct OracleCtx {
  int n = 0;
  int P = 0;
  std::vector<int> ids;                       // index -> task id
  std::vector<std::vector<double>> time_at;   // [i][p]
  std::vector<std::vector<double>> area_at;   // [i][p]
  std::vector<int> pmax;
  std::vector<double> amin;
  std::vector<double> tmin;
  std::vector<uint32_t> pred_mask;
  std::vector<int> topo;                      // indices in topological order
  std::vector<std::vector<int>> pred_idx;

  // per enumerated allocation vector
  std::vector<int> alloc;
  std::vector<double> t_of;   // time under current (partial) vector
  std::vector<double> suffix_amin;

  // best schedule found so far
  double best = 0.0;
  std::vector<double> best_start;
  std::vector<int> best_alloc;
  bool have_best = false;

  long long nodes = 0;
  long long budget = 0;
  bool exhausted = false;

  // scratch for the DFS
  std::vector<double> start_of;

  double cp_with(const std::vector<double>& weight) const {
    double cp = 0.0;
    std::vector<double> reach(n, 0.0);
    for (int i : topo) {
      double before = 0.0;
      for (int p : pred_idx[i]) before = std::max(before, reach[p]);
      reach[i] = before + weight[i];
      cp = std::max(cp, reach[i]);
    }
    return cp;
  }

  bool improves(double candidate) const {
    return !have_best || candidate < best * (1.0 - 1e-12);
  }
};

struct Running {
  int idx;
  double end;
};

void oracle_dfs(OracleCtx& ctx, double now, std::vector<Running> running,
                uint32_t done, uint32_t started, int free) {
  if (ctx.exhausted) return;
  if (++ctx.nodes > ctx.budget) {
    ctx.exhausted = true;
    return;
  }

  const uint32_t all = (1u << ctx.n) - 1;
  if (done == all) {
    if (ctx.improves(now)) {
      ctx.best = now;
      ctx.best_start = ctx.start_of;
      ctx.best_alloc = ctx.alloc;
      ctx.have_best = true;
    }
    return;
  }

  // Remaining critical path: running tasks contribute their residual time,
  // unfinished ones their full time under the current allocation vector.
  {
    std::vector<double> weight(ctx.n, 0.0);
    double run_area = 0.0;
    for (const auto& r : running) {
      weight[r.idx] = r.end - now;
      run_area += (r.end - now) * ctx.alloc[r.idx];
    }
    double rest_area = 0.0;
    for (int i = 0; i < ctx.n; ++i) {
      if (!(started & (1u << i))) {
        weight[i] = ctx.t_of[i];
        rest_area += ctx.area_at[i][ctx.alloc[i]];
      }
    }
    const double bound = now + std::max(ctx.cp_with(weight),
                                        (run_area + rest_area) / ctx.P);
    if (!ctx.improves(bound)) return;
  }

  std::vector<int> ready;
  for (int i = 0; i < ctx.n; ++i) {
    if (!(started & (1u << i)) && (ctx.pred_mask[i] & ~done) == 0) {
      ready.push_back(i);
    }
  }

  // Every subset of ready tasks that fits is a candidate decision,
  // including the empty one (a deliberate delay) while work remains in
  // flight. Subsets are tried by decreasing total area to reach strong
  // incumbents early.
  const int m = static_cast<int>(ready.size());
  std::vector<std::pair<double, uint32_t>> choices;
  for (uint32_t s = 0; s < (1u << m); ++s) {
    int need = 0;
    double a = 0.0;
    for (int b = 0; b < m; ++b) {
      if (s & (1u << b)) {
        need += ctx.alloc[ready[b]];
        a += ctx.area_at[ready[b]][ctx.alloc[ready[b]]];
      }
    }
    if (need > free) continue;
    if (s == 0 && running.empty()) continue;  // idling forever is never optimal
    choices.push_back({a, s});
  }
  std::sort(choices.begin(), choices.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });

  for (const auto& [a_total, s] : choices) {
    (void)a_total;
    std::vector<Running> next_running = running;
    uint32_t next_started = started;
    int next_free = free;
    for (int b = 0; b < m; ++b) {
      if (s & (1u << b)) {
        const int i = ready[b];
        ctx.start_of[i] = now;
        next_running.push_back({i, now + ctx.t_of[i]});
        next_started |= 1u << i;
        next_free -= ctx.alloc[i];
      }
    }
    // Advance to the earliest completion and retire everything tied to it.
    double tnext = next_running.front().end;
    for (const auto& r : next_running) tnext = std::min(tnext, r.end);
    uint32_t next_done = done;
    std::vector<Running> keep;
    int freed = 0;
    double cluster_end = tnext;
    for (const auto& r : next_running) {
      if (r.end <= tnext + 1e-12 * std::max(1.0, tnext)) {
        next_done |= 1u << r.idx;
        freed += ctx.alloc[r.idx];
        cluster_end = std::max(cluster_end, r.end);
      } else {
        keep.push_back(r);
      }
    }
    oracle_dfs(ctx, cluster_end, std::move(keep), next_done, next_started,
               next_free + freed);
    if (ctx.exhausted) return;
  }
}

void enumerate_vectors(OracleCtx& ctx, int i, double area_so_far) {
  if (ctx.exhausted) return;
  if (i == ctx.n) {
    ctx.start_of.assign(ctx.n, 0.0);
    oracle_dfs(ctx, 0.0, {}, 0, 0, ctx.P);
    return;
  }
  for (int p = 1; p <= ctx.pmax[i]; ++p) {
    ctx.alloc[i] = p;
    ctx.t_of[i] = ctx.time_at[i][p];
    const double area_next = area_so_far + ctx.area_at[i][p];
    // Prefix bound: assigned tasks at their chosen allocation, the rest at
    // their per-task minima.
    const double area_bound =
        (area_next + ctx.suffix_amin[i + 1]) / ctx.P;
    std::vector<double> weight(ctx.n);
    for (int j = 0; j < ctx.n; ++j) {
      weight[j] = j <= i ? ctx.t_of[j] : ctx.tmin[j];
    }
    const double bound = std::max(area_bound, ctx.cp_with(weight));
    if (!ctx.improves(bound)) continue;
    enumerate_vectors(ctx, i + 1, area_next);
    if (ctx.exhausted) return;
  }
}

}  // namespace

OracleResult brute_force_optimal(const TaskGraph& graph, int P,
                                 const OracleLimits& limits) {
  const int n = static_cast<int>(graph.tasks.size());
  if (n > limits.max_tasks || P > limits.max_procs || n > kHardTaskCap) {
    throw std::invalid_argument(
        "instance exceeds oracle limits (n <= " +
        std::to_string(std::min(limits.max_tasks, kHardTaskCap)) +
        ", P <= " + std::to_string(limits.max_procs) + ")");
  }
  GraphCheck check = validate_graph(graph);
  if (!check.ok) {
    throw std::invalid_argument("graph does not validate: " +
                                check.violations.front());
  }

  OracleResult result;
  if (n == 0) return result;

  OracleCtx ctx;
  ctx.n = n;
  ctx.P = P;
  ctx.budget = limits.node_budget;
  std::map<int, int> idx_of;
  for (const auto& t : graph.tasks) {
    idx_of[t.id] = static_cast<int>(ctx.ids.size());
    ctx.ids.push_back(t.id);
  }
  ctx.time_at.resize(n);
  ctx.area_at.resize(n);
  for (const auto& t : graph.tasks) {
    const int i = idx_of[t.id];
    const ExtremalStats st = extremal_stats(t.spec, P);
    ctx.pmax.push_back(st.p_max);
    ctx.amin.push_back(st.a_min);
    ctx.tmin.push_back(st.t_min);
    ctx.time_at[i].resize(P + 1, 0.0);
    ctx.area_at[i].resize(P + 1, 0.0);
    for (int p = 1; p <= P; ++p) {
      ctx.time_at[i][p] = exec_time(t.spec, p, P);
      ctx.area_at[i][p] = area(t.spec, p, P);
    }
  }
  ctx.pred_mask.assign(n, 0);
  ctx.pred_idx.assign(n, {});
  for (const auto& [u, v] : graph.edges) {
    ctx.pred_mask[idx_of[v]] |= 1u << idx_of[u];
    ctx.pred_idx[idx_of[v]].push_back(idx_of[u]);
  }
  for (int id : check.topo_order) ctx.topo.push_back(idx_of[id]);
  ctx.alloc.assign(n, 1);
  ctx.t_of.assign(n, 0.0);
  ctx.suffix_amin.assign(n + 1, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    ctx.suffix_amin[i] = ctx.suffix_amin[i + 1] + ctx.amin[i];
  }

  // Seed the incumbent with list schedules; the search then only explores
  // strictly improving branches.
  Schedule seed;
  for (const auto& pol : {AllocationPolicy::paper(), AllocationPolicy::mintime(),
                          AllocationPolicy::sequential()}) {
    Schedule s = simulate(graph, P, pol);
    if (!ctx.have_best || s.makespan < ctx.best) {
      ctx.best = s.makespan;
      ctx.have_best = true;
      seed = s;
    }
  }

  ctx.best_start.clear();
  enumerate_vectors(ctx, 0, 0.0);

  result.nodes = ctx.nodes;
  result.optimal = !ctx.exhausted;
  if (ctx.best_start.empty()) {
    result.schedule = seed;  // no enumerated schedule beat the list seeds
  } else {
    for (int i = 0; i < n; ++i) {
      const double t = ctx.time_at[i][ctx.best_alloc[i]];
      result.schedule.entries[ctx.ids[i]] = {ctx.best_start[i],
                                             ctx.best_start[i] + t,
                                             ctx.best_alloc[i]};
    }
    for (const auto& [id, e] : result.schedule.entries) {
      result.schedule.makespan = std::max(result.schedule.makespan, e.end);
    }
  }
  return result;
}

Model graph_kind(const TaskGraph& graph) {
  bool any = false;
  bool comm = false, amdahl = false, general = false;
  for (const auto& t : graph.tasks) {
    any = true;
    switch (t.spec.kind) {
      case Model::Roofline: break;
      case Model::Communication: comm = true; break;
      case Model::Amdahl: amdahl = true; break;
      case Model::General:
      case Model::Tabulated: general = true; break;
    }
  }
  if (!any) return Model::Roofline;
  if (general || (comm && amdahl)) return Model::General;
  if (comm) return Model::Communication;
  if (amdahl) return Model::Amdahl;
  return Model::Roofline;
}

CompetitiveReport competitive_report(const TaskGraph& graph, int P,
                                     const AllocationPolicy& policy,
                                     bool with_oracle,
                                     const OracleLimits& limits) {
  CompetitiveReport rep;
  rep.kind = graph_kind(graph);
  const AllocationParams params = params_for(rep.kind);
  rep.model_ratio = 1.0 / params.mu;

  const Schedule sched = simulate(graph, P, policy);
  rep.makespan = sched.makespan;
  rep.lb = lower_bound(graph, P);
  rep.ratio_vs_lb = rep.lb.value > 0.0 ? rep.makespan / rep.lb.value : 1.0;

  for (const auto& rec : interval_profile(sched, P, params.mu)) {
    (rec.cls == IntervalClass::High ? rep.intervals.high_util
                                    : rep.intervals.low_util) +=
        rec.end - rec.start;
  }

  if (with_oracle) {
    OracleResult oracle = brute_force_optimal(graph, P, limits);
    rep.oracle_opt = oracle.schedule.makespan;
    rep.oracle_exact = oracle.optimal;
    rep.ratio_vs_opt = oracle.schedule.makespan > 0.0
                           ? rep.makespan / oracle.schedule.makespan
                           : 1.0;
  }
  return rep;
}

}  // namespace moldsched
