#include "hiring/canonical.hpp"

#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace hiring {

std::optional<CanonicalViolation> check_canonical(const DecisionTree& tree, const Instance& inst) {
  if (!tree.has(tree.root)) return std::nullopt;
  std::vector<double> reward(tree.nodes.size(), std::numeric_limits<double>::quiet_NaN());
  std::function<double(NodeId)> eval = [&](NodeId id) -> double {
    double& r = reward[static_cast<std::size_t>(id)];
    if (!std::isnan(r)) return r;
    const TreeNode& u = tree.at(id);
    if (u.is_leaf()) return r = 0.0;
    const double p = inst.probs[static_cast<std::size_t>(u.app)];
    const double v = inst.values[static_cast<std::size_t>(u.app)];
    return r = p * (v + eval(u.right)) + (1.0 - p) * eval(u.left);
  };
  eval(tree.root);

  std::unordered_set<NodeId> visited;
  std::vector<NodeId> stack{tree.root};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (!visited.insert(id).second) continue;
    const TreeNode& u = tree.at(id);
    if (u.is_leaf()) continue;
    const double rl = reward[static_cast<std::size_t>(u.left)];
    const double rr = reward[static_cast<std::size_t>(u.right)];
    const double v = inst.values[static_cast<std::size_t>(u.app)];
    if (!approx_le(rr, rl)) return CanonicalViolation{id, 0, 1, rl, rr};
    if (!approx_le(rl, v + rr)) return CanonicalViolation{id, 0, 2, rl, v + rr};
    stack.push_back(u.left);
    stack.push_back(u.right);
  }
  return std::nullopt;
}

std::pair<DecisionTree, CanonicalReport> canonicalize(DecisionTree tree, const Instance& inst) {
  CanonicalReport report;
  report.reward_before = tree.has(tree.root) ? tree_reward(tree, inst, tree.root) : 0.0;

  // Post-order depth-first rewrite. Both rewrite rules depend only on the
  // subtree itself, so shared subtrees are fixed once and reused.
  std::vector<double> reward(tree.nodes.size(), std::numeric_limits<double>::quiet_NaN());
  std::unordered_map<NodeId, NodeId> done;  // original id -> canonical id

  std::function<NodeId(NodeId)> fix = [&](NodeId id) -> NodeId {
    if (auto it = done.find(id); it != done.end()) return it->second;
    TreeNode& u = tree.at(id);
    NodeId result = id;
    if (u.is_leaf()) {
      reward[static_cast<std::size_t>(id)] = 0.0;
    } else {
      const NodeId left = fix(u.left);
      const NodeId right = fix(u.right);
      tree.at(id).left = left;
      tree.at(id).right = right;
      const double p = inst.probs[static_cast<std::size_t>(tree.at(id).app)];
      const double v = inst.values[static_cast<std::size_t>(tree.at(id).app)];
      double rl = reward[static_cast<std::size_t>(left)];
      double rr = reward[static_cast<std::size_t>(right)];
      if (rl < rr - kCanonicalTriggerSlack) {
        // case 1: replace the left subtree by the right subtree
        tree.at(id).left = right;
        rl = rr;
        report.case1_count += 1;
        report.modified = true;
      }
      if (rl > v + rr + kCanonicalTriggerSlack) {
        // case 2: replace the subtree rooted at u by its left subtree
        result = tree.at(id).left;
        report.case2_count += 1;
        report.modified = true;
      } else {
        reward[static_cast<std::size_t>(id)] = p * (v + rr) + (1.0 - p) * rl;
      }
    }
    done.emplace(id, result);
    return result;
  };

  if (tree.has(tree.root)) tree.root = fix(tree.root);
  report.reward_after = tree.has(tree.root) ? tree_reward(tree, inst, tree.root) : 0.0;
  return {std::move(tree), report};
}

std::optional<CanonicalViolation> check_block_canonical(const BlockTree& tree, const Instance& inst) {
  if (tree.has_coins())
    throw std::invalid_argument("check_block_canonical expects a coin-free tree (strip_coins first)");
  if (!tree.has(tree.root)) return std::nullopt;
  std::vector<double> reward(tree.nodes.size(), std::numeric_limits<double>::quiet_NaN());
  std::function<double(NodeId)> eval = [&](NodeId id) -> double {
    double& r = reward[static_cast<std::size_t>(id)];
    if (!std::isnan(r)) return r;
    const BlockNode& u = tree.at(id);
    if (u.is_leaf()) return r = 0.0;
    double acc = eval(u.left);
    const double rr = eval(u.right);
    for (int q = u.block_size(); q >= 1; --q) {
      const int app = u.block[static_cast<std::size_t>(q - 1)];
      const double p = inst.probs[static_cast<std::size_t>(app)];
      const double v = inst.values[static_cast<std::size_t>(app)];
      acc = p * (v + rr) + (1.0 - p) * acc;
    }
    return r = acc;
  };
  eval(tree.root);

  std::unordered_set<NodeId> visited;
  std::vector<NodeId> stack{tree.root};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (!visited.insert(id).second) continue;
    const BlockNode& u = tree.at(id);
    if (u.is_leaf()) continue;
    const double rr = reward[static_cast<std::size_t>(u.right)];
    // suffix rewards R(u, r+1), walked from the left subtree upward
    double suffix = reward[static_cast<std::size_t>(u.left)];
    for (int r = u.block_size(); r >= 1; --r) {
      const int app = u.block[static_cast<std::size_t>(r - 1)];
      const double p = inst.probs[static_cast<std::size_t>(app)];
      const double v = inst.values[static_cast<std::size_t>(app)];
      if (!approx_le(rr, suffix)) return CanonicalViolation{id, r, 1, suffix, rr};
      if (!approx_le(suffix, v + rr)) return CanonicalViolation{id, r, 2, suffix, v + rr};
      suffix = p * (v + rr) + (1.0 - p) * suffix;
    }
    stack.push_back(u.left);
    stack.push_back(u.right);
  }
  return std::nullopt;
}

std::pair<BlockTree, CanonicalReport> canonicalize_block(BlockTree tree, const Instance& inst) {
  if (tree.has_coins())
    throw std::invalid_argument("canonicalize_block expects a coin-free tree (strip_coins first)");
  CanonicalReport report;
  report.reward_before = tree.has(tree.root) ? block_tree_reward(tree, inst, tree.root) : 0.0;

  std::vector<double> reward(tree.nodes.size(), std::numeric_limits<double>::quiet_NaN());
  std::unordered_map<NodeId, NodeId> done;

  std::function<NodeId(NodeId)> fix = [&](NodeId id) -> NodeId {
    if (auto it = done.find(id); it != done.end()) return it->second;
    NodeId result = id;
    if (tree.at(id).is_leaf()) {
      reward[static_cast<std::size_t>(id)] = 0.0;
    } else {
      const NodeId left = fix(tree.at(id).left);
      const NodeId right = fix(tree.at(id).right);
      tree.at(id).left = left;
      tree.at(id).right = right;
      const double rr = reward[static_cast<std::size_t>(right)];
      double suffix = reward[static_cast<std::size_t>(left)];

      // top rank first: the only rank where case 1 needs a rewrite
      if (tree.at(id).block_size() >= 1 && suffix < rr - kCanonicalTriggerSlack) {
        tree.at(id).left = right;
        suffix = rr;
        report.case1_count += 1;
        report.modified = true;
      }
      // reverse rank order; case 2 eliminates the offending applicant
      auto& block = tree.at(id).block;
      for (int r = static_cast<int>(block.size()); r >= 1; --r) {
        const int app = block[static_cast<std::size_t>(r - 1)];
        const double p = inst.probs[static_cast<std::size_t>(app)];
        const double v = inst.values[static_cast<std::size_t>(app)];
        if (suffix > v + rr + kCanonicalTriggerSlack) {
          block.erase(block.begin() + (r - 1));
          report.case2_count += 1;
          report.modified = true;
          // suffix unchanged: R(u, r) now equals the old R(u, r+1)
        } else {
          suffix = p * (v + rr) + (1.0 - p) * suffix;
        }
      }
      if (block.empty()) {
        // structural integrity: splice the node out, dropping the right subtree
        result = tree.at(id).left;
      } else {
        reward[static_cast<std::size_t>(id)] = suffix;
      }
    }
    done.emplace(id, result);
    return result;
  };

  if (tree.has(tree.root)) tree.root = fix(tree.root);
  report.reward_after = tree.has(tree.root) ? block_tree_reward(tree, inst, tree.root) : 0.0;
  return {std::move(tree), report};
}

BlockTree strip_coins(BlockTree tree) {
  for (auto& n : tree.nodes) n.coin.reset();
  return tree;
}

}  // namespace hiring
