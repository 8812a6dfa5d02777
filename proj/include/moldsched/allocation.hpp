#pragma once

#include "moldsched/model.hpp"

namespace moldsched {

/// Constants driving the two-step allocation rule for one speedup-model
/// family: alpha caps the area ratio a(p)/a_min of the initial allocation,
/// beta bounds the resulting time ratio t(p)/t_min, and mu is the capping
/// fraction of the second step. A consistent triple satisfies
///   beta + alpha / (1 - mu) = 1 / mu   and   beta >= mu (alpha - 1) / (1 - mu)^2,
/// which makes the list scheduler (1/mu)-competitive for graphs of that
/// model family.
struct AllocationParams {
  double alpha = 1.0;
  double beta = 1.0;
  double mu = 0.5;
};

/// Closed-form parameter row for a model family. Tabulated specs use the
/// General row (the most conservative constants).
AllocationParams params_for(Model kind);

/// |beta + alpha/(1-mu) - 1/mu| and the side-condition slack, for checking
/// a triple against the defining relations.
double params_relation_error(const AllocationParams& p);
bool params_side_condition(const AllocationParams& p);

struct RatioResult {
  double mu = 0.0;
  double ratio = 0.0;      // 1 / mu
  bool constraint_ok = false;
};

/// Solves beta + alpha/(1-mu) = 1/mu for mu given (alpha, beta):
///   mu = (alpha + beta + 1 - sqrt((alpha+beta+1)^2 - 4 beta)) / (2 beta).
/// Throws std::domain_error for non-finite input.
RatioResult ratio_from(double alpha, double beta);

/// Step 1: the time-minimal allocation in [1, p_max] whose area ratio
/// stays within params.alpha. Closed-form models use binary search on the
/// largest feasible p (area nondecreasing, time nonincreasing there);
/// tabulated specs fall back to an exhaustive scan over [1, P] with the
/// smallest p among time ties.
int initial_allocation(const SpeedupSpec& spec, int P,
                       const AllocationParams& params);

/// Step 2: cap the allocation at ceil(mu * P).
int adjust_allocation(int p, int P, double mu);

struct Allocation {
  int task_id = -1;
  int procs = 1;
  Time exec = 0.0;
  Area area = 0.0;
};

/// Both steps composed, with the resulting time and area filled in.
Allocation allocate(const SpeedupSpec& spec, int P,
                    const AllocationParams& params, int task_id = -1);

}  // namespace moldsched
