#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moldsched/engine.hpp"
#include "moldsched/model.hpp"

namespace moldsched {

// ---------------------------------------------------------------------------
// Independent-chains instance (arbitrary speedup model)
// ---------------------------------------------------------------------------

/// n = 2^K - 1 independent linear chains over identical tabulated tasks
/// with t(p) = 1 / (lg p + 1), on P = K * 2^(K-1) processors, where
/// K = 2^ell. Group i (1 <= i <= K) holds 2^(K-i) chains of i tasks, so
/// the longest path has K tasks. Chains are numbered group by group;
/// task ids are (chain-1)*K + position.
struct ChainsInstance {
  int ell = 2;
  int K = 4;
  int P = 32;
  int num_chains = 15;
  TaskGraph graph;                    // the canonical full instance
  std::vector<int> group_of_chain;    // 1-based chain -> group (chain length)
  SpeedupSpec task_spec;

  int task_id(int chain, int pos) const { return (chain - 1) * K + pos; }
};

/// Throws std::domain_error for ell < 2.
ChainsInstance gen_chains_instance(int ell);

/// The offline schedule: every group-i chain runs its i tasks back to back
/// on 2^(i-1) processors, all chains in parallel; makespan 1.
Schedule reference_chain_schedule(const ChainsInstance& inst);

/// Processor rule used when the chains are scheduled against the adaptive
/// adversary. Local wraps a deterministic local policy (every task gets the
/// same count). EvenSplit divides P as evenly as possible among the chains
/// whose next task is revealed at the same instant, giving the spare
/// processors to the lowest chain ids.
struct ChainAllocator {
  enum class Mode { Local, EvenSplit };
  Mode mode = Mode::Local;
  AllocationPolicy policy = AllocationPolicy::paper();

  static ChainAllocator local(AllocationPolicy p);
  static ChainAllocator even_split();
  /// "paper" | "mintime" | "seq" | "fixed:<k>" | "fig6b"
  static ChainAllocator from_name(const std::string& name);
  std::string name() const;
};

/// Times t_0 .. t_K: t_0 = 0, t_i = first instant a surviving chain
/// completes i tasks, t_K = makespan. Any deterministic chain-symmetric
/// scheduler satisfies t_i - t_{i-1} >= 1/(ell + i).
struct PhaseTrace {
  std::vector<double> t;
};

struct AdversaryRun {
  Schedule schedule;        // entries for the tasks that actually ran
  PhaseTrace trace;
  TaskGraph effective_graph;  // the truncated chains, same id scheme
  std::vector<int> final_length_of_chain;  // 1-based chain -> length
};

/// Runs list scheduling against the adaptive adversary: every chain starts
/// with one revealed task; when a chain completes its i-th task the chain is
/// terminated while group i's termination quota (2^(K-i) chains) lasts,
/// otherwise its next task is revealed. Simultaneous completions consume
/// quotas in ascending chain id order.
AdversaryRun chains_adversary_simulate(const ChainsInstance& inst,
                                       const ChainAllocator& alloc);

// ---------------------------------------------------------------------------
// Layered lower-bound instance (closed-form models)
// ---------------------------------------------------------------------------

/// The adversarial DAG of Z layers, each holding one D task, X B tasks and
/// one C task, followed by a Y-long A chain:
///   D_i and B_{i,j} have no predecessor besides C_{i-1};
///   D_i -> C_i;  C_i -> D_{i+1} and C_i -> B_{i+1,j};  C_Z -> A_1;
///   A_i -> A_{i+1}.
/// The B layer and D fit together but the layer plus C does not, which
/// forces the policy under test into strict layer-by-layer alternation and
/// a makespan of at least Z*t_B + Y*t_A.
struct LBInstance {
  Model kind = Model::Roofline;
  int P = 0;
  double eps = 0.0;
  double wbar = 0.0;  // threshold work located by bisection (0 for roofline)

  SpeedupSpec spec_A, spec_B, spec_C, spec_D;
  int p_A = 1, p_B = 1, p_C = 1, p_D = 1;          // policy under test
  int pstar_A = 1, pstar_B = 1;                     // reference allocation
  double t_A = 0, t_B = 0, t_C = 0, t_D = 0;        // policy times
  double tstar_A = 0, tstar_B = 0;                  // reference times

  long long X = 0, K = 0, Y = 0, Z = 0;

  TaskGraph graph;

  struct Check {
    std::string label;
    bool ok = false;
    std::string detail;
  };
  std::vector<Check> constraint_report;  // R1..R15 plus F1

  bool constraint(const std::string& label) const;

  // Task id layout: layer i in [1, Z] occupies ids
  // (i-1)*(X+2)+1 .. i*(X+2) as D_i, B_{i,1..X}, C_i; the A chain follows.
  int id_D(long long i) const { return static_cast<int>((i - 1) * (X + 2) + 1); }
  int id_B(long long i, long long j) const {
    return static_cast<int>((i - 1) * (X + 2) + 1 + j);
  }
  int id_C(long long i) const { return static_cast<int>(i * (X + 2)); }
  int id_A(long long k) const { return static_cast<int>(Z * (X + 2) + k); }
};

/// Builds the instance for the given model family against the given policy.
/// For the communication and Amdahl families the task work w is located by
/// bisection on the policy's allocation-threshold behaviour (resolution 1/P
/// and 1/sqrt(P) respectively); a policy without such a threshold (for
/// example one that always allocates one processor) makes the construction
/// impossible and raises std::runtime_error naming the missing boundary.
///
/// Every structural constraint is evaluated and recorded; desk-scale
/// platforms are expected to fail the platform-size requirement (F1), which
/// is recorded honestly rather than faked.
LBInstance gen_lb_graph(Model kind, int P, double eps,
                        const AllocationPolicy& policy);

// ---------------------------------------------------------------------------
// Random layered DAGs
// ---------------------------------------------------------------------------

struct ParamRanges {
  double w_min = 0.1, w_max = 100.0;
  double d_min = 0.01, d_max = 10.0;
  double c_min = 0.01, c_max = 5.0;
  double table_min = 0.1, table_max = 10.0;
};

/// Seed-deterministic layered DAG: n tasks spread over a number of layers
/// (drawn from the seed unless `layers` is given), edges only from earlier
/// to later layers, each present with probability `density`. All tasks use
/// the same model family with parameters drawn from `ranges`.
TaskGraph gen_random_dag(std::uint64_t seed, int n, int P, Model kind,
                         const ParamRanges& ranges, double density,
                         int layers = 0);

}  // namespace moldsched
