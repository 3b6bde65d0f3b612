#include "hiring/tree.hpp"

#include <json.hpp>
#include <unordered_map>
#include <unordered_set>

namespace hiring {

using nlohmann::json;

double tree_reward(const DecisionTree& tree, const Instance& inst, NodeId node) {
  if (!tree.has(node)) throw std::invalid_argument("tree_reward: unknown node id");
  std::vector<double> memo(tree.nodes.size(), std::numeric_limits<double>::quiet_NaN());
  // iterative post-order over the (possibly shared) structure
  std::vector<NodeId> stack{node};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    const TreeNode& u = tree.at(id);
    if (u.is_leaf()) {
      memo[static_cast<std::size_t>(id)] = 0.0;
      stack.pop_back();
      continue;
    }
    if (!tree.has(u.left) || !tree.has(u.right))
      throw std::invalid_argument("tree_reward: internal node missing a child");
    const double rl = memo[static_cast<std::size_t>(u.left)];
    const double rr = memo[static_cast<std::size_t>(u.right)];
    if (std::isnan(rl) || std::isnan(rr)) {
      if (std::isnan(rr)) stack.push_back(u.right);
      if (std::isnan(rl)) stack.push_back(u.left);
      continue;
    }
    if (u.app < 0 || u.app >= inst.n)
      throw std::invalid_argument("tree_reward: internal node with bad applicant id");
    const double p = inst.probs[static_cast<std::size_t>(u.app)];
    const double v = inst.values[static_cast<std::size_t>(u.app)];
    memo[static_cast<std::size_t>(id)] = p * (v + rr) + (1.0 - p) * rl;
    stack.pop_back();
  }
  return memo[static_cast<std::size_t>(node)];
}

std::vector<RootToLeafPath> path_distribution(const DecisionTree& tree, const Instance& inst) {
  std::vector<RootToLeafPath> out;
  if (!tree.has(tree.root)) return out;

  struct Frame {
    NodeId id;
    int arc;  // 0 = descend left next, 1 = descend right next, 2 = done
  };
  std::vector<Frame> stack{{tree.root, 0}};
  std::vector<NodeId> path{tree.root};
  std::vector<bool> active;
  std::vector<double> probs{1.0};
  std::vector<double> values{0.0};

  while (!stack.empty()) {
    Frame& f = stack.back();
    const TreeNode& u = tree.at(f.id);
    if (u.is_leaf() || f.arc == 2) {
      if (u.is_leaf()) {
        RootToLeafPath p;
        p.nodes = path;
        p.active = active;
        p.active.push_back(false);
        p.prob = probs.back();
        p.value = values.back();
        out.push_back(std::move(p));
      }
      stack.pop_back();
      path.pop_back();
      probs.pop_back();
      values.pop_back();
      if (!active.empty()) active.pop_back();
      continue;
    }
    const double p = inst.probs.at(static_cast<std::size_t>(u.app));
    const double v = inst.values.at(static_cast<std::size_t>(u.app));
    const bool right = f.arc == 1;
    const NodeId child = right ? u.right : u.left;
    ++f.arc;
    stack.push_back({child, 0});
    path.push_back(child);
    active.push_back(right);
    probs.push_back(probs.back() * (right ? p : 1.0 - p));
    values.push_back(values.back() + (right ? v : 0.0));
  }
  return out;
}

namespace {

// Properties 1-3 need per-path context. The depth check happens before
// descending, so the recursion is bounded by T + 1 regardless of input.
std::optional<TreeViolation> walk_paths(const DecisionTree& tree, const Instance& inst) {
  AvailSet seen = AvailSet::none(inst.n);
  std::vector<NodeId> path;

  std::function<std::optional<TreeViolation>(NodeId, int, int)> dfs =
      [&](NodeId id, int depth, int right_turns) -> std::optional<TreeViolation> {
    path.push_back(id);
    const TreeNode& u = tree.at(id);
    std::optional<TreeViolation> bad;
    if (u.is_leaf()) {
      if (depth > inst.T) bad = TreeViolation{1, "path longer than T arcs", path};
    } else if (u.app < 0 || u.app >= inst.n) {
      bad = TreeViolation{5, "internal node with bad applicant id", path};
    } else if (depth >= inst.T) {
      bad = TreeViolation{1, "internal node at depth T", path};
    } else if (seen.test(u.app)) {
      bad = TreeViolation{3, "applicant " + std::to_string(u.app) + " offered twice on a path", path};
    } else {
      seen.set(u.app);
      bad = dfs(u.left, depth + 1, right_turns);
      if (!bad) {
        if (right_turns + 1 > inst.k) {
          path.push_back(u.right);
          bad = TreeViolation{2, "more than k right turns on a path", path};
          path.pop_back();
        } else {
          bad = dfs(u.right, depth + 1, right_turns + 1);
        }
      }
      seen.reset(u.app);
    }
    path.pop_back();
    return bad;
  };

  return dfs(tree.root, 0, 0);
}

}  // namespace

std::optional<TreeViolation> validate_tree(const DecisionTree& tree, const Instance& inst) {
  if (!tree.has(tree.root)) return TreeViolation{0, "missing root", {}};

  // structural and per-node checks over reachable nodes
  std::vector<NodeId> order;
  std::unordered_set<NodeId> visited;
  std::vector<NodeId> stack{tree.root};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (visited.count(id)) continue;
    visited.insert(id);
    order.push_back(id);
    const TreeNode& u = tree.at(id);
    if ((u.left == kNoNode) != (u.right == kNoNode))
      return TreeViolation{0, "node with exactly one child", {id}};
    if (!u.is_leaf()) {
      if (!tree.has(u.left) || !tree.has(u.right))
        return TreeViolation{0, "child id out of range", {id}};
      stack.push_back(u.left);
      stack.push_back(u.right);
    }
  }

  // path-contextual properties 1-3 come first so a deliberate violation of
  // them is reported as such even when node states were corrupted too
  if (auto bad = walk_paths(tree, inst)) return bad;

  // property 4: equal states choose equal applicants
  std::unordered_map<State, int, StateHash> choice;
  for (const NodeId id : order) {
    const TreeNode& u = tree.at(id);
    if (u.is_leaf()) continue;
    auto [it, inserted] = choice.emplace(u.state, u.app);
    if (!inserted && it->second != u.app)
      return TreeViolation{4, "equal states with different applicants", {id}};
  }

  for (const NodeId id : order) {
    const TreeNode& u = tree.at(id);
    if (u.state.t < 1 || u.state.t > inst.T + 1 || u.state.k < 0 || u.state.k > inst.k)
      return TreeViolation{5, "state out of range", {id}};
    if (u.state.avail.count() < inst.n - (u.state.t - 1))
      return TreeViolation{5, "avail smaller than n - (t - 1)", {id}};
    if (u.is_leaf()) {
      if (u.app != kVirtualApp)
        return TreeViolation{5, "leaf must carry the virtual applicant", {id}};
      if (!u.state.terminal(inst.T))
        return TreeViolation{5, "leaf at non-terminal state", {id}};
    } else {
      if (u.state.terminal(inst.T))
        return TreeViolation{5, "internal node at terminal state", {id}};
      if (u.app < 0 || u.app >= inst.n)
        return TreeViolation{5, "internal node with bad applicant id", {id}};
      if (!u.state.avail.test(u.app))
        return TreeViolation{5, "offered applicant not available", {id}};
      // child-state arithmetic, as reachability compatibility
      const AvailSet expect = u.state.avail.without(u.app);
      const TreeNode& l = tree.at(u.left);
      const TreeNode& r = tree.at(u.right);
      if (l.state.t < u.state.t + 1 || l.state.k > u.state.k || !l.state.avail.is_subset_of(expect))
        return TreeViolation{5, "left child state unreachable from parent", {id, u.left}};
      if (r.state.t < u.state.t + 1 || r.state.k > u.state.k - 1 || !r.state.avail.is_subset_of(expect))
        return TreeViolation{5, "right child state unreachable from parent", {id, u.right}};
    }
  }

  return std::nullopt;
}

DecisionTree policy_tree_from_function(const Instance& inst, const PolicyFn& policy) {
  require_valid(inst);
  DecisionTree tree;
  std::unordered_map<State, NodeId, StateHash> memo;

  std::function<NodeId(const State&)> build = [&](const State& s) -> NodeId {
    if (auto it = memo.find(s); it != memo.end()) return it->second;
    if (s.terminal(inst.T)) {
      const NodeId id = tree.add(TreeNode{s, kVirtualApp, kNoNode, kNoNode});
      memo.emplace(s, id);
      return id;
    }
    const int app = policy(s);
    if (app < 0 || app >= inst.n || !s.avail.test(app))
      throw std::invalid_argument(
          "policy returned unavailable applicant " + std::to_string(app) + " at state (t=" +
          std::to_string(s.t) + ", k=" + std::to_string(s.k) + ", avail=" + s.avail.to_hex() + ")");
    const NodeId id = tree.add(TreeNode{s, app, kNoNode, kNoNode});
    memo.emplace(s, id);
    const AvailSet rest = s.avail.without(app);
    const NodeId left = build(State{s.t + 1, s.k, rest});
    const NodeId right = build(State{s.t + 1, s.k - 1, rest});
    tree.at(id).left = left;
    tree.at(id).right = right;
    return id;
  };

  tree.root = build(State{1, inst.k, AvailSet::all(inst.n)});
  return tree;
}

bool structurally_equal(const DecisionTree& a, const DecisionTree& b) {
  std::function<bool(NodeId, NodeId)> eq = [&](NodeId x, NodeId y) -> bool {
    if ((x == kNoNode) != (y == kNoNode)) return false;
    if (x == kNoNode) return true;
    const TreeNode& u = a.at(x);
    const TreeNode& v = b.at(y);
    if (u.app != v.app || !(u.state == v.state)) return false;
    return eq(u.left, v.left) && eq(u.right, v.right);
  };
  return eq(a.root, b.root);
}

int reachable_count(const DecisionTree& tree) {
  if (!tree.has(tree.root)) return 0;
  std::unordered_set<NodeId> visited;
  std::vector<NodeId> stack{tree.root};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (!visited.insert(id).second) continue;
    const TreeNode& u = tree.at(id);
    if (!u.is_leaf()) {
      stack.push_back(u.left);
      stack.push_back(u.right);
    }
  }
  return static_cast<int>(visited.size());
}

int tree_depth(const DecisionTree& tree) {
  if (!tree.has(tree.root)) return 0;
  std::function<int(NodeId)> depth = [&](NodeId id) -> int {
    const TreeNode& u = tree.at(id);
    if (u.is_leaf()) return 0;
    return 1 + std::max(depth(u.left), depth(u.right));
  };
  return depth(tree.root);
}

std::string DecisionTree::to_json() const {
  // serialize in DFS preorder so the root is node 0
  json arr = json::array();
  std::unordered_map<NodeId, int> index;
  std::vector<NodeId> order;
  std::function<void(NodeId)> visit = [&](NodeId id) {
    if (id == kNoNode || index.count(id)) return;
    index[id] = static_cast<int>(order.size());
    order.push_back(id);
    const TreeNode& u = at(id);
    visit(u.left);
    visit(u.right);
  };
  visit(root);
  for (const NodeId id : order) {
    const TreeNode& u = at(id);
    json n;
    n["state"] = json::array({u.state.t, u.state.k, u.state.avail.to_hex()});
    n["app"] = u.app;
    n["left"] = u.left == kNoNode ? json(nullptr) : json(index.at(u.left));
    n["right"] = u.right == kNoNode ? json(nullptr) : json(index.at(u.right));
    arr.push_back(std::move(n));
  }
  json j;
  j["nodes"] = std::move(arr);
  return j.dump();
}

DecisionTree DecisionTree::from_json(const std::string& text) {
  const json j = json::parse(text);
  DecisionTree tree;
  const json& arr = j.at("nodes");
  for (const auto& n : arr) {
    TreeNode u;
    u.state.t = n.at("state").at(0).get<int>();
    u.state.k = n.at("state").at(1).get<int>();
    u.state.avail = AvailSet::from_hex(n.at("state").at(2).get<std::string>(), 0);
    u.app = n.at("app").get<int>();
    u.left = n.at("left").is_null() ? kNoNode : n.at("left").get<NodeId>();
    u.right = n.at("right").is_null() ? kNoNode : n.at("right").get<NodeId>();
    tree.nodes.push_back(std::move(u));
  }
  tree.root = tree.nodes.empty() ? kNoNode : 0;
  return tree;
}

}  // namespace hiring
