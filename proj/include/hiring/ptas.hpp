#pragma once

#include <functional>
#include <optional>

#include "hiring/block_build.hpp"
#include "hiring/exact.hpp"

namespace hiring {

enum class Regime { ManyPositions, FewPositions };

struct RegimeDecision {
  Regime regime = Regime::FewPositions;
  double threshold = 0.0;  // 1/eps^2
};

// ManyPositions iff k >= 1/eps^2 (boundary inclusive).
RegimeDecision classify_regime(const Instance& inst, double eps);

// 1 - e^{-k} k^k / k!, the guarantee available in the many-positions regime;
// starts at 1 - 1/e for k = 1 and increases toward 1.
double many_positions_factor(int k);

// Constant-factor under-estimate of the optimum of the mixed-rounded
// instance (the greedy-family DP value), feeding the contribution grid.
double underestimate_opt(const Instance& mixed);

// One point of the enumeration grid for a leftmost path of length F:
// class-to-block contribution estimates (integer multiples of delta) and
// rejection-probability estimates drawn from the psi menu.
struct GuessVector {
  int F = 1;
  std::vector<std::vector<long long>> contrib_mult;  // [f][m], f in 0..F-1
  std::vector<double> rejects;                       // [f], leaf entry unused
  double delta = 0.0;
  double mu = 0.0;
};

struct PtasParams {
  double eps = 0.0;
  double eps3 = 0.0;
  double psi_min = 0.0;  // 1 - eps^3
  double opt_under = 0.0;
  int f_cap = 1;           // max leftmost-path length
  int m_count = 1;         // M+1 classes
  int active_classes = 1;  // classes with members; empty cells are pinned to 0

  double delta_for(int F) const;
  double mu_for(int F) const;
  long long contrib_budget_for(int F) const;
  std::vector<double> psi_menu_for(int F) const;  // sorted descending, starts at 1

  int k = 1;
  int M = 0;
};

PtasParams make_ptas_params(const Instance& mixed, const ClassPartition& partition, double eps,
                            double opt_under);

// Streams every grid point for one leftmost path (deterministic
// lexicographic order: F ascending, contribution multiples in ascending
// colex order, rejection estimates descending per node). The callback
// returns false to stop. Throws when a single grid dimension alone exceeds
// `cap` points.
void enumerate_guesses(const PtasParams& params, const ClassPartition& partition,
                       std::uint64_t cap, const std::function<bool(const GuessVector&)>& yield);

// How many contribution matrices exist for a path of length F (stars and
// bars over (M+1)*F cells with total at most the budget). Used by tests.
double contribution_grid_size(const PtasParams& params, int F);

// Cursor into the per-class availability order: next_rank[m] is the number
// of C_m members consumed so far (candidates always consume value-sorted
// class prefixes), plus the stage reached.
struct ClassCursor {
  std::vector<int> next_rank;
  int t = 1;

  bool operator==(const ClassCursor& other) const {
    return t == other.t && next_rank == other.next_rank;
  }
};

// Per-path-node record of an assignment, used by the feasibility checks.
struct AssignedBlock {
  NodeId node = kNoNode;
  std::vector<int> phi_before;     // per-class next rank before this block
  std::vector<int> take_count;     // per-class members assigned
  double psi_built = 1.0;          // rejection probability of the built block
  double psi_guess = 1.0;          // the guessed estimate
};

struct AssignResult {
  bool feasible = false;
  std::string reason;
  BlockTree tree;
  std::vector<AssignedBlock> path;
};

// Builds the leftmost path from a guess by the prefix-assignment rule
// (each contributing class hands the block the minimal value-prefix whose
// one-shot reward covers the estimate), attaches a correction coin with
// target psi_guess / psi_built at every internal path node, and delegates
// right subtrees to `build_right`. Infeasible when a prefix cannot cover
// its estimate, when the guessed rejection probability exceeds the built
// one, or when the path runs out of stages.
using RightBuilder =
    std::function<std::optional<NodeId>(const ClassCursor&, int k_remaining, BlockTree&)>;

AssignResult assign_and_build(const GuessVector& guess, const Instance& mixed,
                              const ClassPartition& partition, int k_remaining,
                              const ClassCursor& start, const RightBuilder& build_right);

struct PtasOptions {
  std::uint64_t budget = 10'000'000;  // candidate evaluations across the whole solve
};

struct PtasResult {
  Regime regime = Regime::FewPositions;
  double value_mixed = 0.0;     // best candidate reward under the mixed instance
  double value_original = 0.0;  // final policy reward under the original instance
  std::optional<BlockTree> block_policy;
  std::optional<DecisionTree> std_policy;  // fallback policies
  std::string report_json;
};

PtasResult ptas_solve(const Instance& inst, double eps, const PtasOptions& opts = {});

}  // namespace hiring
