#include "moldsched/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "moldsched/engine.hpp"

namespace moldsched {

namespace {

constexpr double kTol = 1e-9;

void note(GridCheck& check, const std::string& msg) {
  if (check.violations.size() < 8) check.violations.push_back(msg);
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(std::log(lo) +
                  (std::log(hi) - std::log(lo)) * unit_uniform(rng));
}

// A value near one of the case boundaries, the boundary itself, or a broad
// log-uniform draw, in roughly equal proportion.
double boundary_heavy(std::mt19937_64& rng, const std::vector<double>& marks,
                      double lo, double hi) {
  const auto pick = rng() % 3;
  if (pick == 0) return marks[rng() % marks.size()];
  if (pick == 1) {
    const double m = marks[rng() % marks.size()];
    return m * (1.0 + (unit_uniform(rng) - 0.5) * 1e-3);
  }
  return log_uniform(rng, lo, hi);
}

}  // namespace

ParamsCheck verify_params() {
  ParamsCheck check;
  const double r2 = std::sqrt(2.0);
  const struct {
    Model kind;
    double mu_closed;
  } expected[] = {
      {Model::Roofline, (3.0 - std::sqrt(5.0)) / 2.0},
      {Model::Communication, (23.0 - std::sqrt(313.0)) / 18.0},
      {Model::Amdahl, (1.0 - std::sqrt(8.0 * r2 - 11.0)) / 2.0},
      {Model::General, (33.0 - std::sqrt(738.0)) / 27.0},
  };
  check.pass = true;
  for (const auto& e : expected) {
    ParamsRow row;
    row.kind = e.kind;
    row.params = params_for(e.kind);
    row.mu_closed_form = e.mu_closed;
    const RatioResult r = ratio_from(row.params.alpha, row.params.beta);
    row.ratio = r.ratio;
    auto fail = [&](const std::string& what) {
      check.pass = false;
      check.violations.push_back(std::string(model_name(e.kind)) + ": " + what);
    };
    if (std::fabs(r.mu - e.mu_closed) > kTol) {
      fail("ratio_from mu does not match the closed form");
    }
    if (std::fabs(r.mu - row.params.mu) > kTol) {
      fail("parameter row mu does not match ratio_from");
    }
    if (params_relation_error(row.params) > 1e-12) {
      fail("defining relation beta + alpha/(1-mu) = 1/mu violated");
    }
    if (!params_side_condition(row.params)) {
      fail("side condition beta >= mu(alpha-1)/(1-mu)^2 violated");
    }
    if (!r.constraint_ok) fail("ratio_from reports the side condition failed");
    check.rows.push_back(row);
  }
  return check;
}

std::vector<SpeedupSpec> sample_specs(Model kind, int P, int count,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ull * (P + 1)));
  std::vector<SpeedupSpec> specs;
  specs.reserve(count);
  for (int i = 0; i < count; ++i) {
    switch (kind) {
      case Model::Roofline: {
        const double w = boundary_heavy(rng, {0.1, 1.0, 10.0, 1000.0}, 0.1, 1e3);
        const int pbar = 1 + static_cast<int>(rng() % P);
        specs.push_back(SpeedupSpec::roofline(w, pbar));
        break;
      }
      case Model::Communication: {
        const double wprime = boundary_heavy(
            rng, {0.5, 1.0, 6.0, 25.0, 49.0, 1e4}, 0.05, 2e4);
        const double c = (rng() % 2) ? 1.0 : log_uniform(rng, 0.01, 10.0);
        specs.push_back(SpeedupSpec::communication(wprime * c, c));
        break;
      }
      case Model::Amdahl: {
        const double ratio = boundary_heavy(
            rng, {1e-3, 0.1, 1.0, 10.0, 1e4}, 1e-3, 1e4);
        const double d = log_uniform(rng, 0.01, 10.0);
        specs.push_back(SpeedupSpec::amdahl(ratio * d, d));
        break;
      }
      case Model::General: {
        const double wprime =
            boundary_heavy(rng, {4.0, 49.0, 1.0, 400.0}, 0.05, 1e4);
        const double dprime = log_uniform(rng, 1e-3, 1e3);
        const double c = (rng() % 2) ? 1.0 : log_uniform(rng, 0.01, 10.0);
        int pbar;
        switch (rng() % 4) {
          case 0: pbar = 1; break;
          case 1: pbar = 2; break;
          case 2: pbar = P; break;
          default: pbar = 1 + static_cast<int>(rng() % P);
        }
        specs.push_back(
            SpeedupSpec::general(wprime * c, dprime * c, c, pbar));
        break;
      }
      case Model::Tabulated: {
        std::vector<double> table(P);
        for (int p = 0; p < P; ++p) {
          table[p] = log_uniform(rng, 0.1, 10.0);
        }
        specs.push_back(SpeedupSpec::tabulated(std::move(table)));
        break;
      }
    }
  }
  return specs;
}

GridCheck verify_alloc_bounds(Model kind, int P, int samples,
                              std::uint64_t seed) {
  GridCheck check;
  const AllocationParams params = params_for(kind);
  const int cap = static_cast<int>(std::ceil(params.mu * P));
  for (const SpeedupSpec& spec : sample_specs(kind, P, samples, seed)) {
    const ExtremalStats st = extremal_stats(spec, P);
    const int p0 = initial_allocation(spec, P, params);
    ++check.checked;

    // Independent route: plain scan for the largest feasible allocation.
    int scan = 1;
    if (st.a_min > 0.0) {
      for (int p = 1; p <= st.p_max; ++p) {
        if (area(spec, p, P) / st.a_min <= params.alpha + 1e-12) scan = p;
      }
    }
    if (scan != p0) {
      std::ostringstream os;
      os << model_name(kind) << " spec " << spec.key() << ": binary search "
         << p0 << " != scan " << scan;
      note(check, os.str());
      continue;
    }

    const double g = st.a_min > 0.0 ? area(spec, p0, P) / st.a_min : 1.0;
    const double f = st.t_min > 0.0 ? exec_time(spec, p0, P) / st.t_min : 1.0;
    check.worst_area_ratio = std::max(check.worst_area_ratio, g);
    check.worst_time_ratio = std::max(check.worst_time_ratio, f);
    if (g > params.alpha + kTol) {
      std::ostringstream os;
      os << model_name(kind) << " spec " << spec.key() << ": area ratio " << g
         << " above alpha " << params.alpha;
      note(check, os.str());
    }
    if (f > params.beta + kTol) {
      std::ostringstream os;
      os << model_name(kind) << " spec " << spec.key() << ": time ratio " << f
         << " above beta " << params.beta;
      note(check, os.str());
    }
    const int adjusted = adjust_allocation(p0, P, params.mu);
    if (adjusted > cap || adjusted > p0 ||
        (p0 <= cap && adjusted != p0)) {
      note(check, std::string(model_name(kind)) + ": adjustment cap broken");
    }
  }
  return check;
}

GridCheck verify_monotonic(Model kind, int P, int samples,
                           std::uint64_t seed) {
  GridCheck check;
  std::mt19937_64 pick(seed + 17);
  for (const SpeedupSpec& spec : sample_specs(kind, P, samples, seed)) {
    const ExtremalStats st = extremal_stats(spec, P);
    ++check.checked;
    bool bad = false;
    for (int p = 1; p < st.p_max && !bad; ++p) {
      const double tp = exec_time(spec, p, P), tq = exec_time(spec, p + 1, P);
      const double ap = area(spec, p, P), aq = area(spec, p + 1, P);
      if (tp < tq * (1.0 - kTol)) {
        note(check, std::string(model_name(kind)) + " spec " + spec.key() +
                        ": time increases at p=" + std::to_string(p));
        bad = true;
      }
      if (ap > aq * (1.0 + kTol)) {
        note(check, std::string(model_name(kind)) + " spec " + spec.key() +
                        ": area decreases at p=" + std::to_string(p));
        bad = true;
      }
    }
    // Random (p, q) pairs for the speedup bound.
    for (int k = 0; k < 8 && st.p_max >= 2; ++k) {
      int p = 1 + static_cast<int>(pick() % st.p_max);
      int q = 1 + static_cast<int>(pick() % st.p_max);
      if (p == q) continue;
      if (p > q) std::swap(p, q);
      const double lhs = exec_time(spec, p, P) / exec_time(spec, q, P);
      if (lhs > static_cast<double>(q) / p + kTol) {
        note(check, std::string(model_name(kind)) + " spec " + spec.key() +
                        ": speedup bound broken at (" + std::to_string(p) +
                        "," + std::to_string(q) + ")");
      }
    }
    // Extremal stats against a full scan.
    double tmin = exec_time(spec, 1, P);
    double amin = area(spec, 1, P);
    for (int p = 2; p <= P; ++p) {
      tmin = std::min(tmin, exec_time(spec, p, P));
      amin = std::min(amin, area(spec, p, P));
    }
    if (std::fabs(tmin - st.t_min) > kTol * std::max(1.0, tmin) ||
        std::fabs(amin - st.a_min) > kTol * std::max(1.0, amin)) {
      note(check, std::string(model_name(kind)) + " spec " + spec.key() +
                      ": extremal stats disagree with the scan");
    }
  }
  return check;
}

PhaseGapCheck verify_phase_gaps(int ell, const ChainAllocator& alloc) {
  PhaseGapCheck check;
  const ChainsInstance inst = gen_chains_instance(ell);
  const AdversaryRun run = chains_adversary_simulate(inst, alloc);
  check.trace = run.trace;
  check.makespan = run.schedule.makespan;
  check.pass = true;

  for (int i = 1; i <= inst.K; ++i) {
    const double gap = run.trace.t[i] - run.trace.t[i - 1];
    const double floor_i = 1.0 / (ell + i);
    if (gap < floor_i - kTol) {
      check.pass = false;
      std::ostringstream os;
      os << "phase " << i << " gap " << gap << " below 1/(ell+i) = " << floor_i;
      check.violations.push_back(os.str());
    }
  }
  const ScheduleCheck sc =
      validate_schedule(run.effective_graph, run.schedule, inst.P);
  if (!sc.ok) {
    check.pass = false;
    check.violations.push_back("adversary schedule invalid: " +
                               sc.violations.front());
  }
  std::vector<long long> ended(inst.K + 1, 0);
  for (int c = 1; c <= inst.num_chains; ++c) {
    const int len = run.final_length_of_chain[c];
    if (len >= 1 && len <= inst.K) ++ended[len];
  }
  for (int i = 1; i <= inst.K; ++i) {
    if (ended[i] != (1ll << (inst.K - i))) {
      check.pass = false;
      std::ostringstream os;
      os << "termination quota broken at length " << i << ": " << ended[i]
         << " chains instead of " << (1ll << (inst.K - i));
      check.violations.push_back(os.str());
    }
  }
  return check;
}

}  // namespace moldsched
