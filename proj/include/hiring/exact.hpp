#pragma once

#include <unordered_map>

#include "hiring/tree.hpp"

namespace hiring {

inline constexpr int kOracleMaxN = 20;

struct SolveResult {
  double value = 0.0;
  DecisionTree tree;
};

// Memo of the exact dynamic program: optimal expected reward and the best
// applicant per state. Terminal states map to (0, kVirtualApp).
using ExactMemo = std::unordered_map<State, std::pair<double, int>, StateHash>;

// Optimal adaptive policy by exhaustive dynamic programming over
// (t, k_t, avail). Refuses instances with n > kOracleMaxN: the state space
// is T * k * 2^n.
SolveResult optimal_exact(const Instance& inst);

// Value-only entry point (no tree materialization).
double optimal_exact_value(const Instance& inst);

// Best policy within the greedy family: offers follow weakly-decreasing
// value order, with skips. G(i,k,t) = max(G(i+1,k,t),
// p_i (v_i + G(i+1,k-1,t-1)) + (1-p_i) G(i+1,k,t-1)).
SolveResult greedy_dp(const Instance& inst);

double greedy_dp_value(const Instance& inst);

}  // namespace hiring
