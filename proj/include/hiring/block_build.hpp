#pragma once

#include <optional>

#include "hiring/block_tree.hpp"
#include "hiring/rounding.hpp"

namespace hiring {

// Terminal nodes along the leftmost path of a (sub)tree. Positions are
// 0-based indices into `path`; the type-A stop rule marks the first node
// whose arrival probability drops below eps^3 (or the leaf), the type-B
// rule works on right-subtree reward ratios and stops at the last type-A
// terminal.
struct TerminalSet {
  std::vector<NodeId> path;        // leftmost path, root to leaf
  std::vector<double> arrival;     // arrival[s] = Pr[reaching path[s]]
  std::vector<int> terminals;      // positions into path, strictly increasing
  std::vector<bool> type_a;        // per terminal
  std::vector<bool> type_b;        // per terminal
  int F = 0;                       // number of terminals
  int FB = 0;                      // 1-based index of the last type-B terminal
};

// Walks the leftmost path from `subtree_root`, marking both endpoints of
// every arc whose arrival-probability interval (type A) or right-subtree
// reward-ratio interval (type B) contains an integer power of 1 - eps^3.
// Requires weakly-decreasing right-subtree rewards along the path (holds
// for optimal canonical trees); violations are input errors.
TerminalSet find_terminals(const DecisionTree& tree, const Instance& mixed, double eps,
                           NodeId subtree_root);

struct BlockBuildResult {
  BlockTree tree;
  int max_path_len = 0;  // max F over all recursion levels
  int levels = 0;        // recursion depth reached
};

// Block compression: groups the applicants between successive
// terminals of the leftmost path into blocks (sorted by weakly-decreasing
// value), recursing on the right subtrees of the first F_B - 1 path nodes
// and closing the remaining right arcs with empty-block leaves. The input
// must be canonical and order-by-value for the mixed-rounded instance.
BlockBuildResult build_block_tree(const DecisionTree& std_tree, const Instance& mixed,
                                  const ClassPartition& partition, double eps);

struct BlockOrderViolation {
  NodeId node = kNoNode;
  int class_index = -1;
  int expected = -1;  // applicant that should have been in the block
  int found = -1;
};

// At every node and for every class, the block's class members must be the
// next consecutive prefix of that class's availability order.
std::optional<BlockOrderViolation> check_block_order_by_value(const BlockTree& tree,
                                                              const ClassPartition& partition);

// ceil((13/eps^3) ln(1/eps)), the cap on terminals per leftmost path.
double terminal_count_bound(double eps);

}  // namespace hiring
