#include "hiring/exact.hpp"

#include <functional>

namespace hiring {

namespace {

double exact_value(const Instance& inst, const State& s, ExactMemo& memo) {
  if (s.terminal(inst.T)) return 0.0;
  if (auto it = memo.find(s); it != memo.end()) return it->second.first;
  double best = -1.0;
  int best_app = kVirtualApp;
  s.avail.for_each([&](int i) {
    const AvailSet rest = s.avail.without(i);
    const double p = inst.probs[static_cast<std::size_t>(i)];
    const double v = inst.values[static_cast<std::size_t>(i)];
    const double rr = exact_value(inst, State{s.t + 1, s.k - 1, rest}, memo);
    const double rl = exact_value(inst, State{s.t + 1, s.k, rest}, memo);
    const double r = p * (v + rr) + (1.0 - p) * rl;
    if (r > best) {  // ties keep the lowest index (for_each ascends)
      best = r;
      best_app = i;
    }
  });
  memo.emplace(s, std::make_pair(best, best_app));
  return best;
}

}  // namespace

double optimal_exact_value(const Instance& inst) {
  require_valid(inst);
  if (inst.n > kOracleMaxN)
    throw std::invalid_argument("optimal_exact refuses n > " + std::to_string(kOracleMaxN) +
                                " (state space is T*k*2^n)");
  ExactMemo memo;
  return exact_value(inst, State{1, inst.k, AvailSet::all(inst.n)}, memo);
}

SolveResult optimal_exact(const Instance& inst) {
  require_valid(inst);
  if (inst.n > kOracleMaxN)
    throw std::invalid_argument("optimal_exact refuses n > " + std::to_string(kOracleMaxN) +
                                " (state space is T*k*2^n)");
  ExactMemo memo;
  const State start{1, inst.k, AvailSet::all(inst.n)};
  const double value = exact_value(inst, start, memo);
  DecisionTree tree = policy_tree_from_function(inst, [&](const State& s) {
    return memo.at(s).second;
  });
  return SolveResult{value, std::move(tree)};
}

namespace {

struct GreedyDp {
  const Instance& inst;
  std::vector<int> order;           // applicant ids, weakly-decreasing value
  std::vector<double> table;        // (i, k, t) -> value
  std::vector<signed char> offer_;  // 1 = offer order[i], 0 = skip

  explicit GreedyDp(const Instance& instance) : inst(instance) {
    order.resize(static_cast<std::size_t>(inst.n));
    for (int i = 0; i < inst.n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return inst.values[static_cast<std::size_t>(a)] > inst.values[static_cast<std::size_t>(b)];
    });
    const std::size_t cells =
        static_cast<std::size_t>(inst.n + 1) * static_cast<std::size_t>(inst.k + 1) *
        static_cast<std::size_t>(inst.T + 1);
    table.assign(cells, std::numeric_limits<double>::quiet_NaN());
    offer_.assign(cells, 0);
  }

  std::size_t idx(int i, int k, int t) const {
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(inst.k + 1) +
            static_cast<std::size_t>(k)) *
               static_cast<std::size_t>(inst.T + 1) +
           static_cast<std::size_t>(t);
  }

  double value(int i, int k, int t) {
    if (i == inst.n || k == 0 || t == 0) return 0.0;
    const std::size_t at = idx(i, k, t);
    if (!std::isnan(table[at])) return table[at];
    const int a = order[static_cast<std::size_t>(i)];
    const double p = inst.probs[static_cast<std::size_t>(a)];
    const double v = inst.values[static_cast<std::size_t>(a)];
    const double skip = value(i + 1, k, t);
    const double offer =
        p * (v + value(i + 1, k - 1, t - 1)) + (1.0 - p) * value(i + 1, k, t - 1);
    table[at] = std::max(skip, offer);
    offer_[at] = offer >= skip ? 1 : 0;  // prefer offering on ties
    return table[at];
  }

  bool offers(int i, int k, int t) const { return offer_[idx(i, k, t)] != 0; }
};

constexpr std::size_t kGreedyTreeNodeBudget = std::size_t{1} << 22;

NodeId greedy_unroll(const GreedyDp& dp, DecisionTree& tree, int i, int k, int t,
                     const AvailSet& avail) {
  const Instance& inst = dp.inst;
  const int stage = inst.T - t + 1;
  // advance past skipped applicants
  while (i < inst.n && k > 0 && t > 0 && !dp.offers(i, k, t)) ++i;
  if (i == inst.n || k == 0 || t == 0) {
    // no further offers: emit a leaf at a terminal state (stage frozen at T+1)
    return tree.add(TreeNode{State{inst.T + 1, k, avail}, kVirtualApp, kNoNode, kNoNode});
  }
  if (tree.nodes.size() > kGreedyTreeNodeBudget)
    throw std::runtime_error("greedy policy tree exceeds the node budget; use greedy_dp_value");
  const int app = dp.order[static_cast<std::size_t>(i)];
  const NodeId id = tree.add(TreeNode{State{stage, k, avail}, app, kNoNode, kNoNode});
  const AvailSet rest = avail.without(app);
  const NodeId left = greedy_unroll(dp, tree, i + 1, k, t - 1, rest);
  const NodeId right = greedy_unroll(dp, tree, i + 1, k - 1, t - 1, rest);
  tree.at(id).left = left;
  tree.at(id).right = right;
  return id;
}

}  // namespace

double greedy_dp_value(const Instance& inst) {
  require_valid(inst);
  GreedyDp dp(inst);
  return dp.value(0, inst.k, inst.T);
}

SolveResult greedy_dp(const Instance& inst) {
  require_valid(inst);
  GreedyDp dp(inst);
  const double value = dp.value(0, inst.k, inst.T);
  DecisionTree tree;
  tree.root = greedy_unroll(dp, tree, 0, inst.k, inst.T, AvailSet::all(inst.n));
  return SolveResult{value, std::move(tree)};
}

}  // namespace hiring
