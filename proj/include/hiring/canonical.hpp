#pragma once

#include <optional>

#include "hiring/block_tree.hpp"
#include "hiring/tree.hpp"

namespace hiring {

// Absolute slack on the rewrite triggers: exact-tie nodes are left alone
// (ties already satisfy both canonical properties).
inline constexpr double kCanonicalTriggerSlack = 1e-12;

struct CanonicalReport {
  bool modified = false;
  int case1_count = 0;  // left subtree replaced by right subtree
  int case2_count = 0;  // node replaced by its left subtree / rank eliminated
  double reward_before = 0.0;
  double reward_after = 0.0;
};

struct CanonicalViolation {
  NodeId node = kNoNode;
  int rank = 0;          // 0 for standard trees
  int property = 0;      // 1 = L>=R, 2 = V+R>=L
  double lhs = 0.0;
  double rhs = 0.0;
};

// Verifies at every internal node u: R(u_R) <= R(u_L) <= v_app(u) + R(u_R),
// with relative tolerance 1e-9.
std::optional<CanonicalViolation> check_canonical(const DecisionTree& tree, const Instance& inst);

// Depth-first (post-order) rewrite imposing both properties. Case 1 redirects
// the left arc to the right subtree (shared id, copy-on-share semantics);
// case 2 splices the node out in favor of its left subtree. Reward never
// decreases.
std::pair<DecisionTree, CanonicalReport> canonicalize(DecisionTree tree, const Instance& inst);

// Block variant: for every internal node u and rank 1 <= r <= |block(u)|,
// R(u_R) <= R(u, r+1) <= v_{app_r(u)} + R(u_R), with the convention
// R(u, |block|+1) = R(u_L).
std::optional<CanonicalViolation> check_block_canonical(const BlockTree& tree, const Instance& inst);

// Within-node traversal is in reverse rank order; case 1 only needs a
// rewrite at the top rank, case 2 eliminates the offending applicant. A
// block that empties is spliced out and its right subtree dropped. Runs in
// O(N*T). Refuses coin-bearing trees.
std::pair<BlockTree, CanonicalReport> canonicalize_block(BlockTree tree, const Instance& inst);

// Coin-free projection: drops every correction coin.
BlockTree strip_coins(BlockTree tree);

}  // namespace hiring
