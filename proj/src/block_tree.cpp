#include "hiring/block_tree.hpp"

#include <functional>
#include <json.hpp>
#include <unordered_map>
#include <unordered_set>

namespace hiring {

using nlohmann::json;

double rejection_probability(const std::vector<int>& block, const Instance& inst) {
  double psi = 1.0;
  for (const int i : block) psi *= 1.0 - inst.probs.at(static_cast<std::size_t>(i));
  return psi;
}

double block_tree_reward(const BlockTree& tree, const Instance& inst, NodeId node, int from_rank) {
  if (!tree.has(node)) throw std::invalid_argument("block_tree_reward: unknown node id");

  std::vector<double> memo(tree.nodes.size(), std::numeric_limits<double>::quiet_NaN());
  std::function<double(NodeId, int)> eval = [&](NodeId id, int rank) -> double {
    const BlockNode& u = tree.at(id);
    const int b = u.block_size();
    if (rank < 1 || rank > b + 1) throw std::invalid_argument("block_tree_reward: rank out of range");
    const bool whole = rank == 1;
    if (whole && !std::isnan(memo[static_cast<std::size_t>(id)]))
      return memo[static_cast<std::size_t>(id)];
    if (u.is_leaf()) {
      if (whole) memo[static_cast<std::size_t>(id)] = 0.0;
      return 0.0;
    }
    const double rl = eval(u.left, 1);
    const double rr = eval(u.right, 1);
    double reject_prefix = 1.0;  // probability that ranks rank..q-1 all reject
    double offers = 0.0;
    for (int q = rank; q <= b; ++q) {
      const int app = u.block[static_cast<std::size_t>(q - 1)];
      const double p = inst.probs.at(static_cast<std::size_t>(app));
      const double v = inst.values.at(static_cast<std::size_t>(app));
      offers += reject_prefix * p * (v + rr);
      reject_prefix *= 1.0 - p;
    }
    double value;
    if (u.coin) {
      // all-reject mass splits: coin=1 goes left, coin=0 goes right
      const double left_mass = reject_prefix * u.coin->target_prob;
      value = left_mass * rl + (reject_prefix - left_mass) * rr + offers;
    } else {
      value = reject_prefix * rl + offers;
    }
    if (whole) memo[static_cast<std::size_t>(id)] = value;
    return value;
  };
  return eval(node, from_rank);
}

std::optional<BlockTreeViolation> validate_block_tree(const BlockTree& tree, const Instance& inst) {
  if (!tree.has(tree.root)) return BlockTreeViolation{0, "missing root", {}};

  std::unordered_set<NodeId> visited;
  std::vector<NodeId> order;
  std::vector<NodeId> stack{tree.root};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (!visited.insert(id).second) continue;
    order.push_back(id);
    const BlockNode& u = tree.at(id);
    if ((u.left == kNoNode) != (u.right == kNoNode))
      return BlockTreeViolation{0, "node with exactly one child", {id}};
    if (!u.is_leaf()) {
      if (!tree.has(u.left) || !tree.has(u.right))
        return BlockTreeViolation{0, "child id out of range", {id}};
      stack.push_back(u.left);
      stack.push_back(u.right);
    }
  }

  for (const NodeId id : order) {
    const BlockNode& u = tree.at(id);
    if (u.coin && !(u.coin->target_prob >= 0.0 && u.coin->target_prob <= 1.0))
      return BlockTreeViolation{6, "coin probability out of range", {id}};
    if (u.is_leaf()) {
      if (!u.block.empty())
        return BlockTreeViolation{5, "leaf must carry the empty block", {id}};
      continue;
    }
    AvailSet in_block = AvailSet::none(inst.n);
    for (const int a : u.block) {
      if (a < 0 || a >= inst.n)
        return BlockTreeViolation{5, "bad applicant id in block", {id}};
      if (!u.state.avail.test(a))
        return BlockTreeViolation{5, "block member not available", {id}};
      if (in_block.test(a))
        return BlockTreeViolation{3, "applicant repeated inside a block", {id}};
      in_block.set(a);
    }
    AvailSet expect = u.state.avail;
    for (const int a : u.block) expect.reset(a);
    const BlockNode& l = tree.at(u.left);
    const BlockNode& r = tree.at(u.right);
    const int tn = u.state.t + u.block_size();
    if (l.state.t < tn || l.state.k > u.state.k || !l.state.avail.is_subset_of(expect))
      return BlockTreeViolation{5, "left child state unreachable from parent", {id, u.left}};
    if (r.state.t < tn || r.state.k > u.state.k - 1 || !r.state.avail.is_subset_of(expect))
      return BlockTreeViolation{5, "right child state unreachable from parent", {id, u.right}};
  }

  // per-path checks: right turns, total offers, distinct applicants
  AvailSet seen = AvailSet::none(inst.n);
  std::vector<NodeId> path;
  std::function<std::optional<BlockTreeViolation>(NodeId, int, int)> dfs =
      [&](NodeId id, int offered, int right_turns) -> std::optional<BlockTreeViolation> {
    path.push_back(id);
    const BlockNode& u = tree.at(id);
    std::optional<BlockTreeViolation> bad;
    if (!u.is_leaf()) {
      for (const int a : u.block) {
        if (seen.test(a)) {
          bad = BlockTreeViolation{3, "applicant offered twice on a path", path};
          break;
        }
        seen.set(a);
      }
      if (!bad && offered + u.block_size() > inst.T)
        bad = BlockTreeViolation{1, "more than T offers on a path", path};
      if (!bad) {
        bad = dfs(u.left, offered + u.block_size(), right_turns);
        if (!bad) {
          if (right_turns + 1 > inst.k) {
            bad = BlockTreeViolation{2, "more than k right turns on a path", path};
          } else {
            bad = dfs(u.right, offered + u.block_size(), right_turns + 1);
          }
        }
      }
      for (const int a : u.block) seen.reset(a);
    }
    path.pop_back();
    return bad;
  };
  return dfs(tree.root, 0, 0);
}

DecisionTree block_tree_to_std(const BlockTree& tree, const Instance& inst) {
  if (tree.has_coins())
    throw std::invalid_argument("block_tree_to_std refuses coin-bearing trees");
  if (!tree.has(tree.root)) throw std::invalid_argument("block_tree_to_std: missing root");

  DecisionTree out;
  std::unordered_map<NodeId, NodeId> memo;
  std::function<NodeId(NodeId)> convert = [&](NodeId id) -> NodeId {
    if (auto it = memo.find(id); it != memo.end()) return it->second;
    const BlockNode& u = tree.at(id);
    NodeId result;
    if (u.is_leaf()) {
      State s = u.state;
      if (!s.terminal(inst.T)) s.t = inst.T + 1;  // early stop reads as horizon end
      result = out.add(TreeNode{s, kVirtualApp, kNoNode, kNoNode});
    } else if (u.block.empty()) {
      // empty internal block: deterministic left descent, no offer made
      result = convert(u.left);
    } else {
      const NodeId right_std = convert(u.right);
      const NodeId left_std = convert(u.left);
      // unroll the block back-to-front; each acceptance jumps to the right
      // child with the stage advanced by the full block size
      NodeId next = left_std;
      const int b = u.block_size();
      for (int q = b; q >= 1; --q) {
        const int app = u.block[static_cast<std::size_t>(q - 1)];
        TreeNode n;
        n.state.t = u.state.t + (q - 1);
        n.state.k = u.state.k;
        n.state.avail = u.state.avail;
        for (int prior = 0; prior < q - 1; ++prior)
          n.state.avail.reset(u.block[static_cast<std::size_t>(prior)]);
        n.app = app;
        n.left = next;
        n.right = right_std;
        next = out.add(std::move(n));
      }
      result = next;
    }
    memo.emplace(id, result);
    return result;
  };
  out.root = convert(tree.root);
  return out;
}

int block_reachable_count(const BlockTree& tree) {
  if (!tree.has(tree.root)) return 0;
  std::unordered_set<NodeId> visited;
  std::vector<NodeId> stack{tree.root};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (!visited.insert(id).second) continue;
    const BlockNode& u = tree.at(id);
    if (!u.is_leaf()) {
      stack.push_back(u.left);
      stack.push_back(u.right);
    }
  }
  return static_cast<int>(visited.size());
}

int block_tree_depth(const BlockTree& tree) {
  if (!tree.has(tree.root)) return 0;
  std::function<int(NodeId)> depth = [&](NodeId id) -> int {
    const BlockNode& u = tree.at(id);
    if (u.is_leaf()) return 0;
    return 1 + std::max(depth(u.left), depth(u.right));
  };
  return depth(tree.root);
}

bool block_structurally_equal(const BlockTree& a, const BlockTree& b) {
  std::function<bool(NodeId, NodeId)> eq = [&](NodeId x, NodeId y) -> bool {
    if ((x == kNoNode) != (y == kNoNode)) return false;
    if (x == kNoNode) return true;
    const BlockNode& u = a.at(x);
    const BlockNode& v = b.at(y);
    if (u.block != v.block || !(u.state == v.state)) return false;
    const bool uc = u.coin.has_value(), vc = v.coin.has_value();
    if (uc != vc || (uc && u.coin->target_prob != v.coin->target_prob)) return false;
    return eq(u.left, v.left) && eq(u.right, v.right);
  };
  return eq(a.root, b.root);
}

std::string BlockTree::to_json() const {
  json arr = json::array();
  std::unordered_map<NodeId, int> index;
  std::vector<NodeId> order;
  std::function<void(NodeId)> visit = [&](NodeId id) {
    if (id == kNoNode || index.count(id)) return;
    index[id] = static_cast<int>(order.size());
    order.push_back(id);
    const BlockNode& u = at(id);
    visit(u.left);
    visit(u.right);
  };
  visit(root);
  for (const NodeId id : order) {
    const BlockNode& u = at(id);
    json n;
    n["state"] = json::array({u.state.t, u.state.k, u.state.avail.to_hex()});
    n["block"] = u.block;
    n["coin"] = u.coin ? json(u.coin->target_prob) : json(nullptr);
    n["left"] = u.left == kNoNode ? json(nullptr) : json(index.at(u.left));
    n["right"] = u.right == kNoNode ? json(nullptr) : json(index.at(u.right));
    arr.push_back(std::move(n));
  }
  json j;
  j["nodes"] = std::move(arr);
  return j.dump();
}

BlockTree BlockTree::from_json(const std::string& text) {
  const json j = json::parse(text);
  BlockTree tree;
  for (const auto& n : j.at("nodes")) {
    BlockNode u;
    u.state.t = n.at("state").at(0).get<int>();
    u.state.k = n.at("state").at(1).get<int>();
    u.state.avail = AvailSet::from_hex(n.at("state").at(2).get<std::string>(), 0);
    u.block = n.at("block").get<std::vector<int>>();
    if (!n.at("coin").is_null()) u.coin = CorrectionCoin{n.at("coin").get<double>()};
    u.left = n.at("left").is_null() ? kNoNode : n.at("left").get<NodeId>();
    u.right = n.at("right").is_null() ? kNoNode : n.at("right").get<NodeId>();
    tree.nodes.push_back(std::move(u));
  }
  tree.root = tree.nodes.empty() ? kNoNode : 0;
  return tree;
}

}  // namespace hiring
