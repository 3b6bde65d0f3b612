#include "hiring/block_build.hpp"

#include <functional>
#include <set>

#include "hiring/canonical.hpp"
#include "hiring/qptas.hpp"

namespace hiring {

double terminal_count_bound(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("terminal bound needs eps in (0,1)");
  return std::ceil(13.0 / (eps * eps * eps) * std::log(1.0 / eps));
}

namespace {

// Does [lo, hi] contain an integer power of base (0 < base < 1)? Degenerate
// intervals (lo == hi, a zero-probability arc) never cross; a power sitting
// exactly on an endpoint counts as contained.
bool contains_power(double lo, double hi, double base) {
  if (!(lo < hi)) return false;
  if (hi > 1.0) hi = 1.0;
  if (lo <= 0.0) return true;  // powers accumulate toward zero
  const double log_base = std::log(base);
  const double jlo = std::log(hi) / log_base;   // smallest eligible exponent
  const double jhi = std::log(lo) / log_base;   // largest eligible exponent
  if (std::floor(jlo) != std::floor(jhi)) return true;
  // endpoint equality: lo or hi is itself a power
  const double rlo = std::round(jhi);
  const double rhi = std::round(jlo);
  if (std::pow(base, rlo) == lo) return true;
  if (std::pow(base, rhi) == hi) return true;
  return false;
}

}  // namespace

TerminalSet find_terminals(const DecisionTree& tree, const Instance& mixed, double eps,
                           NodeId subtree_root) {
  if (!tree.has(subtree_root)) throw std::invalid_argument("find_terminals: unknown subtree root");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("find_terminals needs eps in (0,1)");
  const double eps3 = eps * eps * eps;
  const double base = 1.0 - eps3;

  TerminalSet ts;
  // leftmost path
  for (NodeId id = subtree_root;;) {
    ts.path.push_back(id);
    const TreeNode& u = tree.at(id);
    if (u.is_leaf()) break;
    id = u.left;
  }
  const int S = static_cast<int>(ts.path.size());

  ts.arrival.resize(static_cast<std::size_t>(S));
  ts.arrival[0] = 1.0;
  for (int s = 1; s < S; ++s) {
    const TreeNode& u = tree.at(ts.path[static_cast<std::size_t>(s - 1)]);
    ts.arrival[static_cast<std::size_t>(s)] =
        ts.arrival[static_cast<std::size_t>(s - 1)] *
        (1.0 - mixed.probs.at(static_cast<std::size_t>(u.app)));
  }

  if (S == 1) {
    ts.terminals = {0};
    ts.type_a = {true};
    ts.type_b = {true};
    ts.F = 1;
    ts.FB = 1;
    return ts;
  }

  // type A: stop at the first node with arrival probability below eps^3
  int stop_a = S - 1;
  for (int s = 0; s < S; ++s) {
    if (ts.arrival[static_cast<std::size_t>(s)] < eps3) {
      stop_a = s;
      break;
    }
  }
  std::set<int> a_set{0, stop_a};
  for (int s = 0; s + 1 <= stop_a; ++s) {
    if (contains_power(ts.arrival[static_cast<std::size_t>(s + 1)],
                       ts.arrival[static_cast<std::size_t>(s)], base)) {
      a_set.insert(s);
      a_set.insert(s + 1);
    }
  }

  // type B: right-subtree reward ratios, weakly decreasing on optimal trees
  const double total = tree_reward(tree, mixed, subtree_root);
  std::vector<double> ratio;  // defined for s = 0..S-2
  if (total > 0.0) {
    ratio.resize(static_cast<std::size_t>(S - 1));
    for (int s = 0; s + 1 < S; ++s) {
      const TreeNode& u = tree.at(ts.path[static_cast<std::size_t>(s)]);
      ratio[static_cast<std::size_t>(s)] = tree_reward(tree, mixed, u.right) / total;
    }
    for (int s = 0; s + 2 < S; ++s) {
      if (ratio[static_cast<std::size_t>(s + 1)] >
          ratio[static_cast<std::size_t>(s)] + kRelTol * (1.0 + ratio[static_cast<std::size_t>(s)]))
        throw std::invalid_argument(
            "find_terminals: right-subtree rewards increase along the leftmost path "
            "(input tree is not an optimal canonical tree)");
    }
  }

  int stop_b = stop_a;
  if (total > 0.0) {
    for (int s = 0; s <= std::min(stop_a, S - 2); ++s) {
      if (ratio[static_cast<std::size_t>(s)] < eps3) {
        stop_b = s;
        break;
      }
    }
  } else {
    stop_b = 0;
  }
  std::set<int> b_set{stop_b};
  if (total > 0.0) {
    for (int s = 0; s + 1 <= std::min(stop_b, S - 2); ++s) {
      if (contains_power(ratio[static_cast<std::size_t>(s + 1)],
                         ratio[static_cast<std::size_t>(s)], base)) {
        b_set.insert(s);
        b_set.insert(s + 1);
      }
    }
  }

  std::set<int> merged = a_set;
  merged.insert(b_set.begin(), b_set.end());
  for (const int s : merged) {
    ts.terminals.push_back(s);
    ts.type_a.push_back(a_set.count(s) > 0);
    ts.type_b.push_back(b_set.count(s) > 0);
  }
  ts.F = static_cast<int>(ts.terminals.size());
  ts.FB = 0;
  for (int i = 0; i < ts.F; ++i)
    if (ts.terminals[static_cast<std::size_t>(i)] == stop_b) ts.FB = i + 1;
  return ts;
}

namespace {

struct Builder {
  const DecisionTree& std_tree;
  const Instance& mixed;
  const ClassPartition& partition;
  double eps;
  BlockTree out;
  int max_path_len = 0;
  int levels = 0;

  NodeId convert(NodeId std_root, int level) {
    levels = std::max(levels, level);
    const TreeNode& root = std_tree.at(std_root);
    if (root.is_leaf())
      return out.add(BlockNode{root.state, {}, kNoNode, kNoNode, std::nullopt});
    if (!(tree_reward(std_tree, mixed, std_root) > 0.0)) {
      // zero expected reward: any policy is optimal, stop here
      return out.add(BlockNode{root.state, {}, kNoNode, kNoNode, std::nullopt});
    }

    const TerminalSet ts = find_terminals(std_tree, mixed, eps, std_root);
    max_path_len = std::max(max_path_len, ts.F);

    // path nodes f = 0..F-2 carry blocks; f = F-1 is the empty-block leaf
    std::vector<NodeId> path_nodes(static_cast<std::size_t>(ts.F));
    for (int f = 0; f < ts.F; ++f) {
      const NodeId std_node = ts.path[static_cast<std::size_t>(ts.terminals[static_cast<std::size_t>(f)])];
      BlockNode node;
      node.state = std_tree.at(std_node).state;
      if (f < ts.F - 1) {
        const int from = ts.terminals[static_cast<std::size_t>(f)];
        const int to = ts.terminals[static_cast<std::size_t>(f + 1)];  // exclusive
        for (int s = from; s < to; ++s)
          node.block.push_back(std_tree.at(ts.path[static_cast<std::size_t>(s)]).app);
        std::stable_sort(node.block.begin(), node.block.end(), [&](int a, int b) {
          const double va = mixed.values[static_cast<std::size_t>(a)];
          const double vb = mixed.values[static_cast<std::size_t>(b)];
          return va > vb || (va == vb && a < b);
        });
      }
      path_nodes[static_cast<std::size_t>(f)] = out.add(std::move(node));
    }

    for (int f = 0; f < ts.F - 1; ++f) {
      const NodeId id = path_nodes[static_cast<std::size_t>(f)];
      out.at(id).left = path_nodes[static_cast<std::size_t>(f + 1)];
      // the std node feeding this right arc is the last one grouped into block f
      const int last = ts.terminals[static_cast<std::size_t>(f + 1)] - 1;
      const TreeNode& last_std = std_tree.at(ts.path[static_cast<std::size_t>(last)]);
      NodeId right;
      if (f + 1 <= ts.FB - 1) {
        right = convert(last_std.right, level + 1);
      } else {
        const TreeNode& next_std =
            std_tree.at(ts.path[static_cast<std::size_t>(ts.terminals[static_cast<std::size_t>(f + 1)])]);
        State s = next_std.state;
        s.k -= 1;
        right = out.add(BlockNode{s, {}, kNoNode, kNoNode, std::nullopt});
      }
      out.at(id).right = right;
    }
    return path_nodes[0];
  }
};

}  // namespace

BlockBuildResult build_block_tree(const DecisionTree& std_tree, const Instance& mixed,
                                  const ClassPartition& partition, double eps) {
  if (auto bad = validate_tree(std_tree, mixed))
    throw std::invalid_argument("build_block_tree: input tree invalid: " + bad->message);
  if (auto bad = check_canonical(std_tree, mixed))
    throw std::invalid_argument("build_block_tree: input tree is not canonical");
  if (auto bad = check_order_by_value(std_tree, partition))
    throw std::invalid_argument("build_block_tree: input tree violates order-by-value");

  BlockBuildResult result;
  Builder b{std_tree, mixed, partition, eps, {}, 0, 0};
  const double total = tree_reward(std_tree, mixed, std_tree.root);
  if (!(total > 0.0)) {
    // all reward rates are zero: a bare leaf is optimal
    result.tree.root =
        result.tree.add(BlockNode{std_tree.at(std_tree.root).state, {}, kNoNode, kNoNode, std::nullopt});
    result.max_path_len = 1;
    result.levels = 1;
    return result;
  }
  b.out.root = b.convert(std_tree.root, 1);
  result.tree = std::move(b.out);
  result.max_path_len = b.max_path_len;
  result.levels = b.levels;
  return result;
}

std::optional<BlockOrderViolation> check_block_order_by_value(const BlockTree& tree,
                                                              const ClassPartition& partition) {
  if (!tree.has(tree.root)) return std::nullopt;
  std::vector<NodeId> stack{tree.root};
  std::vector<bool> visited(tree.nodes.size(), false);
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (visited[static_cast<std::size_t>(id)]) continue;
    visited[static_cast<std::size_t>(id)] = true;
    const BlockNode& u = tree.at(id);
    if (u.is_leaf()) continue;
    stack.push_back(u.left);
    stack.push_back(u.right);
    for (int m = 0; m <= partition.M; ++m) {
      int in_block = 0;
      for (const int a : u.block)
        if (partition.class_of[static_cast<std::size_t>(a)] == m) ++in_block;
      if (in_block == 0) continue;
      // the first `in_block` available members of the class must be exactly
      // the block's class members
      int matched = 0;
      for (int rank = 0; rank < partition.size_of(m) && matched < in_block; ++rank) {
        const int candidate = partition.member(m, rank);
        if (!u.state.avail.test(candidate)) continue;
        bool found = false;
        for (const int a : u.block)
          if (a == candidate) {
            found = true;
            break;
          }
        if (!found)
          return BlockOrderViolation{id, m, candidate, -1};
        ++matched;
      }
    }
  }
  return std::nullopt;
}

}  // namespace hiring
