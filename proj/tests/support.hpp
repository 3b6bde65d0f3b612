#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "hiring/block_tree.hpp"
#include "hiring/canonical.hpp"
#include "hiring/exact.hpp"
#include "hiring/instance.hpp"
#include "hiring/tree.hpp"

namespace hiring::testsupport {

// The worked three-applicant example: values (1,2,3), acceptance
// probabilities (0.5, 1, 1), two positions, two stages.
inline Instance example_instance() {
  Instance inst;
  inst.n = 3;
  inst.values = {1.0, 2.0, 3.0};
  inst.probs = {0.5, 1.0, 1.0};
  inst.k = 2;
  inst.T = 2;
  return inst;
}

// The example's policy: offer applicant 0 first; applicant 1 after a
// rejection, applicant 2 after an acceptance.
inline DecisionTree example_tree() {
  const Instance inst = example_instance();
  return policy_tree_from_function(inst, [](const State& s) {
    if (s.t == 1) return 0;
    return s.k == 2 ? 1 : 2;
  });
}

inline Instance random_instance(Rng& rng, int n_max, int k_max, int t_max,
                                bool spiky_probs = true) {
  Instance inst;
  inst.n = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_max)));
  inst.k = 1 + static_cast<int>(rng.next_below(
                  static_cast<std::uint64_t>(std::min(k_max, inst.n))));
  inst.T = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(t_max)));
  for (int i = 0; i < inst.n; ++i) {
    inst.values.push_back(10.0 * rng.next_double());
    double p = rng.next_double();
    if (spiky_probs) {
      const double roll = rng.next_double();
      if (roll < 0.15) p *= 0.01;       // populate C_0
      else if (roll < 0.25) p = 1.0;    // deterministic acceptors
    }
    inst.probs.push_back(p);
  }
  return inst;
}

// Unrolls a uniformly random (memoized, hence consistent) policy.
inline DecisionTree random_policy_tree(const Instance& inst, Rng& rng) {
  auto cache = std::make_shared<std::map<std::pair<std::pair<int, int>, std::string>, int>>();
  return policy_tree_from_function(inst, [&inst, &rng, cache](const State& s) {
    const auto key = std::make_pair(std::make_pair(s.t, s.k), s.avail.to_hex());
    if (auto it = cache->find(key); it != cache->end()) return it->second;
    std::vector<int> options;
    s.avail.for_each([&](int i) { options.push_back(i); });
    const int pick = options[rng.next_below(options.size())];
    cache->emplace(key, pick);
    return pick;
  });
}

// Random block-responsive tree with explicit states; blocks pick random
// subsets of the available applicants in random order.
inline BlockTree random_block_tree(const Instance& inst, Rng& rng) {
  BlockTree tree;
  std::function<NodeId(const State&)> build = [&](const State& s) -> NodeId {
    const int stages_left = inst.T - s.t + 1;
    const bool stop = s.k == 0 || stages_left <= 0 || !s.avail.any() ||
                      rng.next_double() < 0.2;
    if (stop) return tree.add(BlockNode{s, {}, kNoNode, kNoNode, std::nullopt});
    std::vector<int> options;
    s.avail.for_each([&](int i) { options.push_back(i); });
    const int max_take = std::min<int>(static_cast<int>(options.size()), stages_left);
    const int take = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_take)));
    // partial Fisher-Yates for the block members, order kept random
    std::vector<int> block;
    for (int j = 0; j < take; ++j) {
      const std::size_t pick = static_cast<std::size_t>(j) +
                               rng.next_below(options.size() - static_cast<std::uint64_t>(j));
      std::swap(options[static_cast<std::size_t>(j)], options[pick]);
      block.push_back(options[static_cast<std::size_t>(j)]);
    }
    State next = s;
    next.t += take;
    for (const int a : block) next.avail.reset(a);
    State hired = next;
    hired.k -= 1;
    BlockNode node;
    node.state = s;
    node.block = block;
    const NodeId left = build(next);
    const NodeId right = build(hired);
    const NodeId id = tree.add(std::move(node));
    tree.at(id).left = left;
    tree.at(id).right = right;
    return id;
  };
  tree.root = build(State{1, inst.k, AvailSet::all(inst.n)});
  return tree;
}

// Exhaustive enumeration of policy trees, used as the oracle's oracle. A
// deliberately separate code path: explicit trees are materialized
// depth-first and evaluated with tree_reward; nothing is shared with the
// exact DP.
inline std::vector<DecisionTree> enumerate_policy_trees(const Instance& inst) {
  struct Gen {
    const Instance& inst;

    std::vector<DecisionTree> subtrees(const State& s) {
      std::vector<DecisionTree> out;
      if (s.terminal(inst.T)) {
        DecisionTree leaf;
        leaf.root = leaf.add(TreeNode{s, kVirtualApp, kNoNode, kNoNode});
        out.push_back(std::move(leaf));
        return out;
      }
      std::vector<int> options;
      s.avail.for_each([&](int i) { options.push_back(i); });
      for (const int app : options) {
        const AvailSet rest = s.avail.without(app);
        const auto lefts = subtrees(State{s.t + 1, s.k, rest});
        const auto rights = subtrees(State{s.t + 1, s.k - 1, rest});
        for (const auto& l : lefts) {
          for (const auto& r : rights) {
            DecisionTree combined;
            const NodeId left_root = graft(combined, l, l.root);
            const NodeId right_root = graft(combined, r, r.root);
            combined.root = combined.add(TreeNode{s, app, left_root, right_root});
            out.push_back(std::move(combined));
          }
        }
      }
      return out;
    }

    static NodeId graft(DecisionTree& dst, const DecisionTree& src, NodeId id) {
      const TreeNode& u = src.at(id);
      if (u.is_leaf()) return dst.add(u);
      const NodeId l = graft(dst, src, u.left);
      const NodeId r = graft(dst, src, u.right);
      TreeNode copy = u;
      copy.left = l;
      copy.right = r;
      return dst.add(copy);
    }
  };
  Gen gen{inst};
  return gen.subtrees(State{1, inst.k, AvailSet::all(inst.n)});
}

// Best reward over explicitly enumerated valid policy trees.
inline double brute_force_optimum(const Instance& inst) {
  double best = 0.0;
  for (const auto& tree : enumerate_policy_trees(inst)) {
    if (validate_tree(tree, inst)) continue;  // skip inconsistent combinations
    best = std::max(best, tree_reward(tree, inst, tree.root));
  }
  return best;
}

}  // namespace hiring::testsupport
