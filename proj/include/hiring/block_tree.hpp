#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hiring/tree.hpp"

namespace hiring {

// Bernoulli correction coin attached to a candidate block node: after all
// applicants in the block reject, the left arc is taken only when the coin
// comes up 1, so the left-descent probability becomes psi-tilde.
struct CorrectionCoin {
  double target_prob = 1.0;  // Pr[coin = 1]
};

// One node of a block-responsive decision tree: an ordered block of
// applicants offered in sequence, stopping at the first acceptance. Left
// arc: everyone rejected; right arc: someone accepted. Leaves carry the
// empty virtual block.
struct BlockNode {
  State state;
  std::vector<int> block;  // ordered applicant ids
  NodeId left = kNoNode;
  NodeId right = kNoNode;
  std::optional<CorrectionCoin> coin;

  bool is_leaf() const { return left == kNoNode && right == kNoNode; }
  int block_size() const { return static_cast<int>(block.size()); }
};

struct BlockTree {
  std::vector<BlockNode> nodes;
  NodeId root = kNoNode;

  NodeId add(BlockNode node) {
    nodes.push_back(std::move(node));
    return static_cast<NodeId>(nodes.size() - 1);
  }
  const BlockNode& at(NodeId id) const { return nodes.at(static_cast<std::size_t>(id)); }
  BlockNode& at(NodeId id) { return nodes.at(static_cast<std::size_t>(id)); }
  bool has(NodeId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < nodes.size();
  }
  bool has_coins() const {
    for (const auto& n : nodes)
      if (n.coin) return true;
    return false;
  }

  std::string to_json() const;
  static BlockTree from_json(const std::string& text);
};

struct BlockTreeViolation {
  int property = 0;
  std::string message;
  std::vector<NodeId> witness;
};

// Structural validity: every root-to-leaf path has at most k right turns,
// offers at most T applicants in total, and never repeats an applicant;
// leaves carry the empty block; child states are reachable from their
// parents under the block state update t_new = t + |block|.
std::optional<BlockTreeViolation> validate_block_tree(const BlockTree& tree, const Instance& inst);

// Expected reward of the subtree rooted at `node`, starting from rank r
// (1-based); r = 1 gives the node reward and r = |block|+1 evaluates to the
// left subtree's reward. Correction coins, when present, scale the
// all-reject branch so that the left-descent probability equals the coin
// target times the rejection product.
double block_tree_reward(const BlockTree& tree, const Instance& inst, NodeId node, int from_rank);

inline double block_tree_reward(const BlockTree& tree, const Instance& inst, NodeId node) {
  return block_tree_reward(tree, inst, node, 1);
}

inline double block_tree_reward(const BlockTree& tree, const Instance& inst) {
  return block_tree_reward(tree, inst, tree.root, 1);
}

// Probability that every applicant in the block rejects; empty block -> 1.
double rejection_probability(const std::vector<int>& block, const Instance& inst);

// Unrolls every block into a rejection chain whose acceptance arcs jump to
// the block's right child with the stage advanced by the full block size.
// Refuses coin-bearing trees (a coin is not expressible as a standard tree).
DecisionTree block_tree_to_std(const BlockTree& tree, const Instance& inst);

int block_reachable_count(const BlockTree& tree);
int block_tree_depth(const BlockTree& tree);
bool block_structurally_equal(const BlockTree& a, const BlockTree& b);

}  // namespace hiring
