#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hiring/common.hpp"
#include "hiring/instance.hpp"

namespace hiring {

// System state (t, k_t, A_t). t in [1, T+1]; k_t open positions; A_t the
// applicants not yet offered a position.
struct State {
  int t = 1;
  int k = 0;
  AvailSet avail;

  bool terminal(int T) const { return t == T + 1 || k == 0 || !avail.any(); }
  bool operator==(const State& other) const {
    return t == other.t && k == other.k && avail == other.avail;
  }
  std::uint64_t hash() const {
    std::uint64_t h = avail.hash();
    h ^= static_cast<std::uint64_t>(t) * 0x100000001b3ull;
    h ^= static_cast<std::uint64_t>(k) * 0xc2b2ae3d27d4eb4full;
    return h;
  }
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

// One node of a standard decision tree. Leaves carry the virtual applicant
// (app = kVirtualApp) and no children; internal nodes have both children,
// left = rejection branch, right = acceptance branch.
struct TreeNode {
  State state;
  int app = kVirtualApp;
  NodeId left = kNoNode;
  NodeId right = kNoNode;

  bool is_leaf() const { return left == kNoNode && right == kNoNode; }
};

// Arena-backed decision tree. Subtree replacement is an id rewrite, so the
// underlying structure may be a DAG; every traversal treats it as a tree.
struct DecisionTree {
  std::vector<TreeNode> nodes;
  NodeId root = kNoNode;

  NodeId add(TreeNode node) {
    nodes.push_back(std::move(node));
    return static_cast<NodeId>(nodes.size() - 1);
  }
  const TreeNode& at(NodeId id) const { return nodes.at(static_cast<std::size_t>(id)); }
  TreeNode& at(NodeId id) { return nodes.at(static_cast<std::size_t>(id)); }
  bool has(NodeId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < nodes.size();
  }

  std::string to_json() const;
  static DecisionTree from_json(const std::string& text);
};

// Root-to-leaf path together with its acceptance pattern. active[i] is true
// when the outgoing arc of nodes[i] is a right turn (an accepted offer); the
// leaf entry is always false.
struct RootToLeafPath {
  std::vector<NodeId> nodes;
  std::vector<bool> active;
  double value = 0.0;
  double prob = 1.0;
};

struct TreeViolation {
  int property = 0;  // 1..4 per the validity properties, 5 = child-state arithmetic
  std::string message;
  std::vector<NodeId> witness;
};

// Checks the four validity properties (depth <= T, <= k right turns per
// path, distinct applicants per path, state-consistency) plus child-state
// arithmetic. Child states are accepted when reachable from the parent
// (t_c >= t+1, k_c <= expected, avail_c subset of expected); subtree grafts
// performed by canonicalization keep validity under this rule, and trees
// unrolled from a policy satisfy it with equality.
std::optional<TreeViolation> validate_tree(const DecisionTree& tree, const Instance& inst);

// Expected cumulative reward of the subtree rooted at `node`:
// R(u) = p_app(u) * (v_app(u) + R(u_R)) + (1 - p_app(u)) * R(u_L), leaf -> 0.
double tree_reward(const DecisionTree& tree, const Instance& inst, NodeId node);

inline double tree_reward(const DecisionTree& tree, const Instance& inst) {
  return tree_reward(tree, inst, tree.root);
}

// All root-to-leaf paths with their probabilities (left-first order). Paths
// with probability zero are included; probabilities sum to one.
std::vector<RootToLeafPath> path_distribution(const DecisionTree& tree, const Instance& inst);

// Unrolls a policy function into an explicit decision tree, memoizing on
// state so that the consistency property holds by construction. The policy
// must return an available applicant for every non-terminal reachable state.
using PolicyFn = std::function<int(const State&)>;
DecisionTree policy_tree_from_function(const Instance& inst, const PolicyFn& policy);

// True when the two trees unfold to the same shape, states, and applicants.
bool structurally_equal(const DecisionTree& a, const DecisionTree& b);

// Number of distinct nodes reachable from the root.
int reachable_count(const DecisionTree& tree);

// Depth in arcs of the unfolded tree.
int tree_depth(const DecisionTree& tree);

}  // namespace hiring
