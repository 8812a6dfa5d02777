#include "moldsched/engine.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace moldsched {

AllocationPolicy AllocationPolicy::paper() {
  AllocationPolicy p;
  p.kind_ = Kind::Paper;
  p.name_ = "paper";
  return p;
}

AllocationPolicy AllocationPolicy::mintime() {
  AllocationPolicy p;
  p.kind_ = Kind::MinTime;
  p.name_ = "mintime";
  return p;
}

AllocationPolicy AllocationPolicy::sequential() {
  AllocationPolicy p;
  p.kind_ = Kind::Sequential;
  p.name_ = "seq";
  return p;
}

AllocationPolicy AllocationPolicy::fixed(int k) {
  AllocationPolicy p;
  p.kind_ = Kind::Fixed;
  p.fixed_k_ = k;
  p.name_ = "fixed:" + std::to_string(k);
  return p;
}

AllocationPolicy AllocationPolicy::custom(std::map<std::string, int> table) {
  AllocationPolicy p;
  p.kind_ = Kind::Custom;
  p.table_ = std::move(table);
  p.name_ = "custom";
  return p;
}

AllocationPolicy AllocationPolicy::even_split() {
  AllocationPolicy p;
  p.kind_ = Kind::EvenSplit;
  p.name_ = "fig6b";
  return p;
}

AllocationPolicy AllocationPolicy::from_name(const std::string& name) {
  if (name == "paper") return paper();
  if (name == "mintime") return mintime();
  if (name == "seq" || name == "sequential") return sequential();
  if (name.rfind("fixed:", 0) == 0) {
    return fixed(std::stoi(name.substr(6)));
  }
  if (name == "fig6b" || name == "fixed-fig6b" || name == "evensplit") {
    return even_split();
  }
  throw std::invalid_argument("unknown policy: " + name);
}

int AllocationPolicy::operator()(const SpeedupSpec& spec, int P) const {
  switch (kind_) {
    case Kind::Paper:
      return allocate(spec, P, params_for(spec.kind)).procs;
    case Kind::MinTime:
      return extremal_stats(spec, P).p_max;
    case Kind::Sequential:
      return 1;
    case Kind::Fixed:
      return fixed_k_;
    case Kind::Custom: {
      auto it = table_.find(spec.key());
      if (it == table_.end()) {
        throw std::invalid_argument("custom policy has no entry for spec " +
                                    spec.key());
      }
      return it->second;
    }
    case Kind::EvenSplit:
      throw std::invalid_argument(
          "the even-split rule has no per-task allocation");
  }
  return 1;
}

namespace {

struct TaskRef {
  int id;
  const SpeedupSpec* spec;
  int alloc = 0;
};

}  // namespace

Schedule simulate(const TaskGraph& graph, int P,
                  const AllocationPolicy& policy) {
  if (P < 1) throw std::invalid_argument("P must be at least 1");
  GraphCheck check = validate_graph(graph);
  if (!check.ok) {
    throw std::invalid_argument("graph does not validate: " +
                                check.violations.front());
  }

  std::map<int, const Task*> by_id;
  std::map<int, int> indeg;
  std::map<int, std::vector<int>> succs;
  for (const auto& t : graph.tasks) {
    by_id[t.id] = &t;
    indeg[t.id] = 0;
  }
  for (const auto& [u, v] : graph.edges) {
    ++indeg[v];
    succs[u].push_back(v);
  }

  Schedule sched;
  std::map<int, int> alloc_of;
  std::vector<int> waiting;  // FIFO of revealed, not-yet-started ids
  using Event = std::pair<double, int>;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> running;
  int free = P;

  auto reveal = [&](const std::vector<int>& ids) {
    // ids must already be in ascending order
    const int m = static_cast<int>(ids.size());
    for (int k = 0; k < m; ++k) {
      const int id = ids[k];
      int a;
      if (policy.kind() == AllocationPolicy::Kind::EvenSplit) {
        a = std::max(1, P / m + (k < P % m ? 1 : 0));
      } else {
        a = policy(by_id[id]->spec, P);
      }
      if (a < 1 || a > P) {
        throw std::invalid_argument(
            "policy allocated " + std::to_string(a) + " processors for task " +
            std::to_string(id) + " on a " + std::to_string(P) +
            "-processor platform");
      }
      alloc_of[id] = a;
      waiting.push_back(id);
    }
  };

  auto scan = [&](double now) {
    std::vector<int> still_waiting;
    for (int id : waiting) {
      const int a = alloc_of[id];
      if (a <= free) {
        const double t = exec_time(by_id[id]->spec, a, P);
        sched.entries[id] = {now, now + t, a};
        free -= a;
        running.push({now + t, id});
      } else {
        still_waiting.push_back(id);
      }
    }
    waiting = std::move(still_waiting);
  };

  std::vector<int> roots;
  for (const auto& [id, deg] : indeg) {
    if (deg == 0) roots.push_back(id);
  }
  reveal(roots);
  scan(0.0);

  while (!running.empty()) {
    // Pop the cluster of completions within tolerance of the earliest one;
    // all of them are processed before any reveal or scan at this instant.
    const double first = running.top().first;
    double now = first;
    std::vector<int> done;
    while (!running.empty() && running.top().first <= first + time_tol(first)) {
      now = std::max(now, running.top().first);
      done.push_back(running.top().second);
      running.pop();
    }
    std::sort(done.begin(), done.end());
    std::vector<int> newly;
    for (int id : done) {
      free += sched.entries[id].procs;
      for (int v : succs[id]) {
        if (--indeg[v] == 0) newly.push_back(v);
      }
    }
    std::sort(newly.begin(), newly.end());
    reveal(newly);
    scan(now);
  }

  for (const auto& [id, e] : sched.entries) {
    sched.makespan = std::max(sched.makespan, e.end);
  }
  return sched;
}

ScheduleCheck validate_schedule(const TaskGraph& graph, const Schedule& sched,
                                int P) {
  ScheduleCheck check;
  auto flag = [&](const std::string& msg) { check.violations.push_back(msg); };

  for (const auto& t : graph.tasks) {
    auto it = sched.entries.find(t.id);
    if (it == sched.entries.end()) {
      flag("task " + std::to_string(t.id) + " has no schedule entry");
      continue;
    }
    const ScheduleEntry& e = it->second;
    if (e.procs < 1 || e.procs > P) {
      flag("task " + std::to_string(t.id) + " uses " +
           std::to_string(e.procs) + " processors");
      continue;
    }
    const double t_exec = exec_time(t.spec, e.procs, P);
    if (std::fabs(e.end - (e.start + t_exec)) > time_tol(e.end)) {
      std::ostringstream os;
      os << "task " << t.id << " duration " << (e.end - e.start)
         << " does not match execution time " << t_exec;
      flag(os.str());
    }
    if (e.start < -time_tol(0.0)) {
      flag("task " + std::to_string(t.id) + " starts before time 0");
    }
  }
  for (const auto& e : sched.entries) {
    if (!graph.find(e.first)) {
      flag("schedule entry for unknown task " + std::to_string(e.first));
    }
  }
  if (!check.violations.empty()) return check;

  for (const auto& [u, v] : graph.edges) {
    const auto& pu = sched.entries.at(u);
    const auto& pv = sched.entries.at(v);
    if (pv.start < pu.end - time_tol(pu.end)) {
      std::ostringstream os;
      os << "task " << v << " starts at " << pv.start
         << " before predecessor " << u << " ends at " << pu.end;
      flag(os.str());
    }
  }

  // Capacity sweep over merged event points.
  std::vector<std::pair<double, int>> deltas;
  for (const auto& [id, e] : sched.entries) {
    if (e.end - e.start <= 0.0) continue;
    deltas.push_back({e.start, e.procs});
    deltas.push_back({e.end, -e.procs});
  }
  std::sort(deltas.begin(), deltas.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  int used = 0;
  std::size_t i = 0;
  while (i < deltas.size()) {
    const double t = deltas[i].first;
    // Releases within tolerance of t happen before acquisitions at t.
    int minus = 0, plus = 0;
    std::size_t j = i;
    while (j < deltas.size() && deltas[j].first <= t + time_tol(t)) {
      (deltas[j].second < 0 ? minus : plus) += deltas[j].second;
      ++j;
    }
    used += minus + plus;
    if (used > P) {
      std::ostringstream os;
      os << "utilization " << used << " exceeds P = " << P << " from time "
         << t;
      flag(os.str());
      break;
    }
    i = j;
  }

  check.ok = check.violations.empty();
  return check;
}

std::vector<IntervalRecord> interval_profile(const Schedule& sched, int P,
                                             double mu) {
  std::vector<IntervalRecord> out;
  std::vector<std::pair<double, int>> deltas;
  for (const auto& [id, e] : sched.entries) {
    if (e.end - e.start <= 0.0) continue;
    deltas.push_back({e.start, e.procs});
    deltas.push_back({e.end, -e.procs});
  }
  if (deltas.empty()) return out;
  std::sort(deltas.begin(), deltas.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const int threshold = static_cast<int>(std::ceil((1.0 - mu) * P));
  double prev = 0.0;
  int used = 0;
  std::size_t i = 0;
  while (i < deltas.size()) {
    const double t = deltas[i].first;
    if (t > prev + time_tol(prev)) {
      out.push_back({prev, t, used,
                     used >= threshold ? IntervalClass::High
                                       : IntervalClass::Low});
      prev = t;
    }
    std::size_t j = i;
    while (j < deltas.size() && deltas[j].first <= t + time_tol(t)) {
      used += deltas[j].second;
      ++j;
    }
    i = j;
  }
  return out;
}

std::vector<int> blocking_chain(const TaskGraph& graph,
                                const Schedule& sched) {
  if (sched.entries.empty()) return {};

  std::map<int, std::vector<int>> preds;
  for (const auto& [u, v] : graph.edges) preds[v].push_back(u);

  int cur = -1;
  for (const auto& [id, e] : sched.entries) {
    if (cur < 0 || e.end > sched.entries.at(cur).end) cur = id;
  }
  std::vector<int> chain{cur};
  while (true) {
    const auto it = preds.find(cur);
    if (it == preds.end() || it->second.empty()) break;
    int best = -1;
    for (int p : it->second) {
      if (best < 0 || sched.entries.at(p).end > sched.entries.at(best).end ||
          (sched.entries.at(p).end == sched.entries.at(best).end && p < best)) {
        best = p;
      }
    }
    chain.push_back(best);
    cur = best;
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

std::map<int, Time> reveal_times(const TaskGraph& graph,
                                 const Schedule& sched) {
  std::map<int, Time> reveal;
  for (const auto& t : graph.tasks) reveal[t.id] = 0.0;
  for (const auto& [u, v] : graph.edges) {
    reveal[v] = std::max(reveal[v], sched.entries.at(u).end);
  }
  return reveal;
}

}  // namespace moldsched
