#include "moldsched/instances.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

#include "moldsched/allocation.hpp"

namespace moldsched {

// ---------------------------------------------------------------------------
// Chains instance
// ---------------------------------------------------------------------------

ChainsInstance gen_chains_instance(int ell) {
  if (ell < 2) {
    throw std::domain_error("chains instance requires ell >= 2");
  }
  ChainsInstance inst;
  inst.ell = ell;
  inst.K = 1 << ell;
  inst.P = inst.K * (1 << (inst.K - 1));
  inst.num_chains = (1 << inst.K) - 1;

  std::vector<double> table(inst.P);
  for (int p = 1; p <= inst.P; ++p) {
    table[p - 1] = 1.0 / (std::log2(static_cast<double>(p)) + 1.0);
  }
  inst.task_spec = SpeedupSpec::tabulated(std::move(table));

  inst.group_of_chain.assign(inst.num_chains + 1, 0);
  int chain = 1;
  for (int g = 1; g <= inst.K; ++g) {
    const int count = 1 << (inst.K - g);
    for (int k = 0; k < count; ++k, ++chain) {
      inst.group_of_chain[chain] = g;
      for (int pos = 1; pos <= g; ++pos) {
        inst.graph.tasks.push_back({inst.task_id(chain, pos), inst.task_spec});
        if (pos > 1) {
          inst.graph.edges.push_back(
              {inst.task_id(chain, pos - 1), inst.task_id(chain, pos)});
        }
      }
    }
  }
  return inst;
}

Schedule reference_chain_schedule(const ChainsInstance& inst) {
  Schedule sched;
  const auto& table = inst.task_spec.table_values();
  for (int chain = 1; chain <= inst.num_chains; ++chain) {
    const int g = inst.group_of_chain[chain];
    const int procs = 1 << (g - 1);
    const double t = table[procs - 1];  // equals 1/g
    double at = 0.0;
    for (int pos = 1; pos <= g; ++pos) {
      sched.entries[inst.task_id(chain, pos)] = {at, at + t, procs};
      at += t;
    }
  }
  for (const auto& [id, e] : sched.entries) {
    sched.makespan = std::max(sched.makespan, e.end);
  }
  return sched;
}

ChainAllocator ChainAllocator::local(AllocationPolicy p) {
  ChainAllocator a;
  a.mode = p.local() ? Mode::Local : Mode::EvenSplit;
  a.policy = std::move(p);
  return a;
}

ChainAllocator ChainAllocator::even_split() {
  ChainAllocator a;
  a.mode = Mode::EvenSplit;
  return a;
}

ChainAllocator ChainAllocator::from_name(const std::string& name) {
  return local(AllocationPolicy::from_name(name));
}

std::string ChainAllocator::name() const {
  return mode == Mode::EvenSplit ? "fig6b" : policy.name();
}

AdversaryRun chains_adversary_simulate(const ChainsInstance& inst,
                                       const ChainAllocator& alloc) {
  const int K = inst.K;
  const int P = inst.P;
  const int n = inst.num_chains;
  const SpeedupSpec& spec = inst.task_spec;

  // Termination quotas: exactly 2^(K-i) chains may end at length i.
  std::vector<long long> quota(K + 1, 0);
  for (int i = 1; i <= K; ++i) quota[i] = 1ll << (K - i);

  AdversaryRun run;
  run.final_length_of_chain.assign(n + 1, 0);
  run.trace.t.assign(K + 1, -1.0);
  run.trace.t[0] = 0.0;

  int local_procs = 0;
  if (alloc.mode == ChainAllocator::Mode::Local) {
    local_procs = alloc.policy(spec, P);
    if (local_procs < 1 || local_procs > P) {
      throw std::invalid_argument("policy allocation outside [1, P]");
    }
  }

  struct Waiting {
    int chain;
    int pos;
    int procs;
  };
  std::vector<Waiting> queue;
  using Event = std::pair<double, std::pair<int, int>>;  // end, (pos, chain)
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> running;
  std::map<std::pair<int, int>, int> procs_of;  // (chain,pos) -> allocation
  int free = P;

  auto reveal = [&](const std::vector<std::pair<int, int>>& batch) {
    // batch is ascending by chain id
    const int m = static_cast<int>(batch.size());
    for (int k = 0; k < m; ++k) {
      int procs = local_procs;
      if (alloc.mode == ChainAllocator::Mode::EvenSplit) {
        procs = P / m + (k < P % m ? 1 : 0);
        if (procs < 1) procs = 1;
      }
      queue.push_back({batch[k].first, batch[k].second, procs});
    }
  };

  auto scan = [&](double now) {
    std::vector<Waiting> kept;
    for (const auto& w : queue) {
      if (w.procs <= free) {
        const double t = exec_time(spec, w.procs, P);
        run.schedule.entries[inst.task_id(w.chain, w.pos)] = {now, now + t,
                                                              w.procs};
        procs_of[{w.chain, w.pos}] = w.procs;
        free -= w.procs;
        running.push({now + t, {w.pos, w.chain}});
      } else {
        kept.push_back(w);
      }
    }
    queue = std::move(kept);
  };

  {
    std::vector<std::pair<int, int>> batch;
    for (int c = 1; c <= n; ++c) batch.push_back({c, 1});
    reveal(batch);
    scan(0.0);
  }

  while (!running.empty()) {
    const double first = running.top().first;
    double now = first;
    std::vector<std::pair<int, int>> done;  // (pos, chain)
    while (!running.empty() && running.top().first <= first + time_tol(first)) {
      now = std::max(now, running.top().first);
      done.push_back(running.top().second);
      running.pop();
    }
    std::sort(done.begin(), done.end());
    std::vector<std::pair<int, int>> batch;
    for (const auto& [pos, chain] : done) {
      free += procs_of[{chain, pos}];
      if (quota[pos] > 0) {
        --quota[pos];
        run.final_length_of_chain[chain] = pos;
      } else {
        if (run.trace.t[pos] < 0.0) run.trace.t[pos] = now;
        batch.push_back({chain, pos + 1});
      }
    }
    std::sort(batch.begin(), batch.end());  // queue in task-id order
    reveal(batch);
    scan(now);
  }

  for (const auto& [id, e] : run.schedule.entries) {
    run.schedule.makespan = std::max(run.schedule.makespan, e.end);
  }
  run.trace.t[K] = run.schedule.makespan;
  for (int i = 1; i < K; ++i) {
    if (run.trace.t[i] < 0.0) run.trace.t[i] = run.schedule.makespan;
  }

  for (int c = 1; c <= n; ++c) {
    const int len = run.final_length_of_chain[c];
    for (int pos = 1; pos <= len; ++pos) {
      run.effective_graph.tasks.push_back({inst.task_id(c, pos), spec});
      if (pos > 1) {
        run.effective_graph.edges.push_back(
            {inst.task_id(c, pos - 1), inst.task_id(c, pos)});
      }
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// Layered lower-bound instance
// ---------------------------------------------------------------------------

namespace {

long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

// Locates the supremum of the region where `in_one_proc_region` holds, to
// the given resolution. The predicate must flip exactly once in [lo, hi].
double bisect_threshold(const std::function<bool(double)>& pred, double lo,
                        double hi, double resolution,
                        const std::string& what) {
  if (!pred(lo)) {
    throw std::runtime_error("threshold search for " + what +
                             ": lower bracket " + std::to_string(lo) +
                             " is already outside the region");
  }
  if (pred(hi)) {
    throw std::runtime_error("threshold search for " + what +
                             ": upper bracket " + std::to_string(hi) +
                             " is still inside the region");
  }
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  if (pred(lo + resolution)) {
    throw std::runtime_error("threshold search for " + what +
                             ": region is not an interval near " +
                             std::to_string(lo));
  }
  return lo;
}

}  // namespace

bool LBInstance::constraint(const std::string& label) const {
  for (const auto& c : constraint_report) {
    if (c.label == label) return c.ok;
  }
  throw std::invalid_argument("no constraint labeled " + label);
}

LBInstance gen_lb_graph(Model kind, int P, double eps,
                        const AllocationPolicy& policy) {
  if (P < 16) throw std::invalid_argument("lb instance requires P >= 16");
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("lb instance requires eps in (0, 1)");
  }

  LBInstance inst;
  inst.kind = kind;
  inst.P = P;
  inst.eps = eps;
  const double tiny = eps / (121.0 * P * P);
  const double sqrtP = std::sqrt(static_cast<double>(P));

  switch (kind) {
    case Model::Roofline:
      inst.spec_A = SpeedupSpec::roofline(1.0, 1);
      inst.spec_B = inst.spec_A;
      inst.spec_C = SpeedupSpec::roofline(tiny);
      inst.spec_D = SpeedupSpec::roofline(tiny, 1);
      inst.pstar_A = 1;
      break;
    case Model::Communication: {
      auto one_proc = [&](double x) {
        return policy(SpeedupSpec::communication(x, 1.0), P) == 1;
      };
      inst.wbar = bisect_threshold(one_proc, 0.1, 64.0, 1.0 / P,
                                   "single-processor communication tasks");
      inst.spec_A = SpeedupSpec::communication(inst.wbar, 1.0);
      inst.spec_B = SpeedupSpec::communication(inst.wbar + 1.0 / P, 1.0);
      inst.spec_C = SpeedupSpec::communication(tiny, 0.0);
      inst.spec_D = SpeedupSpec::communication(tiny, 1.0);
      inst.pstar_A = inst.wbar <= 6.0 ? 2 : 3;
      break;
    }
    case Model::Amdahl: {
      const double seq = 1.0 / sqrtP;
      auto below_sqrt = [&](double x) {
        return policy(SpeedupSpec::amdahl(x, seq), P) < sqrtP;
      };
      inst.wbar = bisect_threshold(below_sqrt, 0.1, 10.0, seq,
                                   "sub-sqrt(P) Amdahl allocations");
      inst.spec_A = SpeedupSpec::amdahl(inst.wbar, seq);
      inst.spec_B = SpeedupSpec::amdahl(inst.wbar + seq, seq);
      inst.spec_C = SpeedupSpec::amdahl(tiny, 0.0);
      inst.spec_D = SpeedupSpec::amdahl(0.0, tiny);
      inst.pstar_A = static_cast<int>(std::floor(std::pow(P, 0.75)));
      break;
    }
    default:
      throw std::invalid_argument(
          "lb construction is defined for roofline, communication and amdahl");
  }
  inst.pstar_B = 1;

  inst.p_A = policy(inst.spec_A, P);
  inst.p_B = policy(inst.spec_B, P);
  inst.p_C = policy(inst.spec_C, P);
  inst.p_D = policy(inst.spec_D, P);
  inst.t_A = exec_time(inst.spec_A, inst.p_A, P);
  inst.t_B = exec_time(inst.spec_B, inst.p_B, P);
  inst.t_C = exec_time(inst.spec_C, inst.p_C, P);
  inst.t_D = exec_time(inst.spec_D, inst.p_D, P);
  inst.tstar_A = exec_time(inst.spec_A, inst.pstar_A, P);
  inst.tstar_B = exec_time(inst.spec_B, inst.pstar_B, P);

  inst.X = ceil_div(P - inst.p_C + 1, inst.p_B);
  inst.K = static_cast<long long>(
      std::ceil(5.0 * inst.tstar_A / (eps * inst.X * inst.tstar_B)));
  if (inst.K < 1) inst.K = 1;
  inst.Y = static_cast<long long>(
      std::floor(inst.X * inst.K * inst.tstar_B / inst.tstar_A));
  inst.Z = inst.K * (P - inst.pstar_A);

  const long long total = inst.Z * (inst.X + 2) + inst.Y;
  if (total > 5'000'000) {
    throw std::runtime_error("lb instance would have " + std::to_string(total) +
                             " tasks; refusing to build");
  }

  for (long long i = 1; i <= inst.Z; ++i) {
    inst.graph.tasks.push_back({inst.id_D(i), inst.spec_D});
    for (long long j = 1; j <= inst.X; ++j) {
      inst.graph.tasks.push_back({inst.id_B(i, j), inst.spec_B});
    }
    inst.graph.tasks.push_back({inst.id_C(i), inst.spec_C});
    inst.graph.edges.push_back({inst.id_D(i), inst.id_C(i)});
    if (i > 1) {
      inst.graph.edges.push_back({inst.id_C(i - 1), inst.id_D(i)});
      for (long long j = 1; j <= inst.X; ++j) {
        inst.graph.edges.push_back({inst.id_C(i - 1), inst.id_B(i, j)});
      }
    }
  }
  for (long long k = 1; k <= inst.Y; ++k) {
    inst.graph.tasks.push_back({inst.id_A(k), inst.spec_A});
    inst.graph.edges.push_back(
        {k == 1 ? inst.id_C(inst.Z) : inst.id_A(k - 1), inst.id_A(k)});
  }

  const double mu = params_for(kind).mu;
  const double p34 = std::pow(P, 0.75);
  const double tmin_C = extremal_stats(inst.spec_C, P).t_min;
  const double slack = 1e-9;
  auto add = [&](const std::string& label, bool ok, const std::string& detail) {
    inst.constraint_report.push_back({label, ok, detail});
  };
  std::ostringstream os;
  os.precision(6);

  auto fmt2 = [](double a, double b) {
    std::ostringstream o;
    o.precision(6);
    o << a << " vs " << b;
    return o.str();
  };

  add("R1", inst.pstar_A <= p34, fmt2(inst.pstar_A, p34));
  add("R2", 0.1 <= inst.tstar_B && inst.tstar_B <= 100.0,
      "t*_B = " + std::to_string(inst.tstar_B));
  add("R3", inst.p_B <= p34, fmt2(inst.p_B, p34));
  add("R4", inst.t_D <= inst.t_B * (1.0 + slack), fmt2(inst.t_D, inst.t_B));
  add("R5", exec_time(inst.spec_D, 1, P) <= tiny * (1.0 + slack),
      fmt2(exec_time(inst.spec_D, 1, P), tiny));
  add("R6", inst.p_D <= 4, "p_D = " + std::to_string(inst.p_D));
  add("R7", inst.tstar_A <= 24.0 * inst.tstar_B,
      fmt2(inst.tstar_A, 24.0 * inst.tstar_B));
  add("R8", true, "reference B runs on one processor, so t*_B = a*_B");
  add("R9", inst.t_A <= 5.0 * inst.tstar_A * (1.0 + slack),
      fmt2(inst.t_A, 5.0 * inst.tstar_A));
  add("R10", inst.p_B * inst.t_B <= 5.0 * inst.tstar_B * (1.0 + slack),
      fmt2(inst.p_B * inst.t_B, 5.0 * inst.tstar_B));
  add("R11", tmin_C <= tiny * (1.0 + slack), fmt2(tmin_C, tiny));
  add("R12", inst.p_C >= mu * P, fmt2(inst.p_C, mu * P));
  add("R13", 1 <= inst.X && inst.X <= P, "X = " + std::to_string(inst.X));
  {
    const double lhs = inst.X * inst.K * inst.tstar_B * (1.0 - eps / 5.0);
    const double mid = inst.Y * inst.tstar_A;
    const double rhs = inst.X * inst.K * inst.tstar_B;
    add("R14", lhs <= mid * (1.0 + slack) && mid <= rhs * (1.0 + slack),
        fmt2(lhs, mid) + " vs " + std::to_string(rhs));
  }
  {
    const double lhs = inst.K * (P - p34);
    const double rhs = 121.0 * P / eps;
    add("R15", lhs <= inst.Z && inst.Z <= rhs,
        fmt2(lhs, static_cast<double>(inst.Z)) + " vs " + std::to_string(rhs));
  }
  add("F1", static_cast<double>(P) >= std::pow(120900.0 / eps, 4.0),
      fmt2(P, std::pow(120900.0 / eps, 4.0)));

  return inst;
}

// ---------------------------------------------------------------------------
// Random layered DAGs
// ---------------------------------------------------------------------------

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_uniform(rng);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

int below(std::mt19937_64& rng, int n) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

}  // namespace

TaskGraph gen_random_dag(std::uint64_t seed, int n, int P, Model kind,
                         const ParamRanges& ranges, double density,
                         int layers) {
  if (n < 1) throw std::invalid_argument("need at least one task");
  if (density < 0.0 || density > 1.0) {
    throw std::invalid_argument("density must be in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  const int L = layers > 0 ? layers : 1 + below(rng, n);

  std::vector<int> layer_of(n);
  for (int i = 0; i < n; ++i) {
    layer_of[i] = static_cast<int>(static_cast<long long>(i) * L / n);
  }

  TaskGraph g;
  for (int i = 0; i < n; ++i) {
    SpeedupSpec spec;
    switch (kind) {
      case Model::Roofline:
        spec = SpeedupSpec::roofline(
            log_uniform(rng, ranges.w_min, ranges.w_max), 1 + below(rng, P));
        break;
      case Model::Communication:
        spec = SpeedupSpec::communication(
            log_uniform(rng, ranges.w_min, ranges.w_max),
            log_uniform(rng, ranges.c_min, ranges.c_max));
        break;
      case Model::Amdahl:
        spec = SpeedupSpec::amdahl(log_uniform(rng, ranges.w_min, ranges.w_max),
                                   log_uniform(rng, ranges.d_min, ranges.d_max));
        break;
      case Model::General:
        spec = SpeedupSpec::general(
            log_uniform(rng, ranges.w_min, ranges.w_max),
            log_uniform(rng, ranges.d_min, ranges.d_max),
            log_uniform(rng, ranges.c_min, ranges.c_max), 1 + below(rng, P));
        break;
      case Model::Tabulated: {
        std::vector<double> table(P);
        for (int p = 0; p < P; ++p) {
          table[p] = uniform(rng, ranges.table_min, ranges.table_max);
        }
        spec = SpeedupSpec::tabulated(std::move(table));
        break;
      }
    }
    g.tasks.push_back({i + 1, std::move(spec)});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (layer_of[i] < layer_of[j] && unit_uniform(rng) < density) {
        g.edges.push_back({i + 1, j + 1});
      }
    }
  }
  return g;
}

}  // namespace moldsched
