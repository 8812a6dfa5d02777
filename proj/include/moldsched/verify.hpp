#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "moldsched/allocation.hpp"
#include "moldsched/instances.hpp"
#include "moldsched/model.hpp"

namespace moldsched {

/// Property-grid checks shared by the CLI and the acceptance suite.

struct ParamsRow {
  Model kind;
  AllocationParams params;
  double ratio = 0.0;          // from ratio_from(alpha, beta)
  double mu_closed_form = 0.0;  // the closed-form expression for mu
};

struct ParamsCheck {
  bool pass = false;
  std::vector<ParamsRow> rows;
  std::vector<std::string> violations;
};

/// The four parameter rows: recomputes mu through ratio_from and checks it
/// against the closed forms (1e-9) and both defining relations (1e-12).
ParamsCheck verify_params();

/// Model-specific spec sampler. Samples cross the allocation analysis'
/// case boundaries (communication w/c near 0.5, 1, 6, 25, 49, 1e4; general
/// w/c near 4 and 49) as well as broad log-uniform ranges.
std::vector<SpeedupSpec> sample_specs(Model kind, int P, int count,
                                      std::uint64_t seed);

struct GridCheck {
  long long checked = 0;
  std::vector<std::string> violations;  // capped at a handful of messages
  double worst_area_ratio = 0.0;
  double worst_time_ratio = 0.0;
};

/// Initial allocations over a sampled grid: area ratio within alpha + 1e-9,
/// time ratio within beta + 1e-9, binary search equal to an exhaustive
/// scan, and the adjusted allocation within the ceil(mu P) cap.
GridCheck verify_alloc_bounds(Model kind, int P, int samples,
                              std::uint64_t seed);

/// Time nonincreasing / area nondecreasing on [1, p_max], the speedup
/// bound t(p)/t(q) <= q/p, and extremal stats against an exhaustive scan.
GridCheck verify_monotonic(Model kind, int P, int samples, std::uint64_t seed);

struct PhaseGapCheck {
  bool pass = false;
  PhaseTrace trace;
  double makespan = 0.0;
  std::vector<std::string> violations;
};

/// Adversary run for the chains instance: phase gaps
/// t_i - t_{i-1} >= 1/(ell+i) - 1e-9, schedule validity, and the
/// termination quotas (2^(K-i) chains end at length i).
PhaseGapCheck verify_phase_gaps(int ell, const ChainAllocator& alloc);

}  // namespace moldsched
