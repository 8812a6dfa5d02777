#include "moldsched/allocation.hpp"

#include <cmath>
#include <stdexcept>

namespace moldsched {

namespace {

// Slack for the alpha-feasibility comparison: alpha is irrational for two
// of the rows while g(p) is computed in floating point, and grid points can
// sit exactly on the boundary (e.g. communication w/c = 6 at p = 2).
constexpr double kFeasSlack = 1e-12;

}  // namespace

AllocationParams params_for(Model kind) {
  const double r2 = std::sqrt(2.0);
  switch (kind) {
    case Model::Roofline:
      return {1.0, 1.0, (3.0 - std::sqrt(5.0)) / 2.0};
    case Model::Communication:
      return {4.0 / 3.0, 3.0 / 2.0, (23.0 - std::sqrt(313.0)) / 18.0};
    case Model::Amdahl:
      return {(r2 + 1.0 + std::sqrt(2.0 * r2 - 1.0)) / 2.0,
              (1.0 + std::sqrt(4.0 * r2 + 5.0)) / 2.0,
              (1.0 - std::sqrt(8.0 * r2 - 11.0)) / 2.0};
    case Model::General:
    case Model::Tabulated:
      return {2.0, 27.0 / 13.0, (33.0 - std::sqrt(738.0)) / 27.0};
  }
  throw std::invalid_argument("unknown model kind");
}

double params_relation_error(const AllocationParams& p) {
  return std::fabs(p.beta + p.alpha / (1.0 - p.mu) - 1.0 / p.mu);
}

bool params_side_condition(const AllocationParams& p) {
  return p.beta >= p.mu * (p.alpha - 1.0) / ((1.0 - p.mu) * (1.0 - p.mu)) -
                       kFeasSlack;
}

RatioResult ratio_from(double alpha, double beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || beta <= 0.0) {
    throw std::domain_error("ratio_from requires finite alpha and beta > 0");
  }
  const double s = alpha + beta + 1.0;
  const double disc = s * s - 4.0 * beta;
  if (disc < 0.0) {
    throw std::domain_error("ratio_from discriminant is negative");
  }
  RatioResult r;
  r.mu = (s - std::sqrt(disc)) / (2.0 * beta);
  r.ratio = 1.0 / r.mu;
  r.constraint_ok =
      beta >= r.mu * (alpha - 1.0) / ((1.0 - r.mu) * (1.0 - r.mu)) - kFeasSlack;
  return r;
}

int initial_allocation(const SpeedupSpec& spec, int P,
                       const AllocationParams& params) {
  const ExtremalStats st = extremal_stats(spec, P);
  if (st.a_min <= 0.0) return 1;  // zero-work task; any allocation is free
  const double cap = params.alpha + kFeasSlack;

  if (spec.kind == Model::Tabulated) {
    int best = -1;
    double best_t = 0.0;
    for (int p = 1; p <= P; ++p) {
      if (area(spec, p, P) / st.a_min > cap) continue;
      const double t = exec_time(spec, p, P);
      if (best < 0 || t < best_t) {
        best = p;
        best_t = t;
      }
    }
    return best < 0 ? 1 : best;
  }

  // Area ratio is nondecreasing and time nonincreasing on [1, p_max], so
  // the largest feasible p is time-minimal; binary search for it.
  int lo = 1, hi = st.p_max;
  while (lo < hi) {
    const int mid = lo + (hi - lo + 1) / 2;
    if (area(spec, mid, P) / st.a_min <= cap) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

int adjust_allocation(int p, int P, double mu) {
  if (p < 1 || p > P) {
    throw std::domain_error("allocation outside [1, P]");
  }
  const int cap = static_cast<int>(std::ceil(mu * P));
  return p > cap ? cap : p;
}

Allocation allocate(const SpeedupSpec& spec, int P,
                    const AllocationParams& params, int task_id) {
  Allocation a;
  a.task_id = task_id;
  const int initial = initial_allocation(spec, P, params);
  a.procs = adjust_allocation(initial, P, params.mu);
  a.exec = exec_time(spec, a.procs, P);
  a.area = area(spec, a.procs, P);
  return a;
}

}  // namespace moldsched
