#include "hiring/qptas.hpp"

#include <functional>
#include <json.hpp>

namespace hiring {

double qptas_state_bound(const Instance& mixed, const ClassPartition& partition) {
  double bound = static_cast<double>(mixed.k) * static_cast<double>(mixed.T + 1);
  for (int m = 0; m <= partition.M; ++m) bound *= static_cast<double>(partition.size_of(m) + 1);
  return bound;
}

QptasResult qptas_solve(const Instance& mixed, const ClassPartition& partition) {
  require_valid(mixed);
  if (mixed.flavor != Flavor::MixedRounded)
    throw std::invalid_argument("qptas_solve expects the mixed-rounded instance");
  if (qptas_state_bound(mixed, partition) > 5e7)
    throw std::runtime_error("qptas state space exceeds the resource guard");

  QptasResult result;
  auto& entries = result.memo.entries;

  std::function<double(const ClassState&)> F = [&](const ClassState& s) -> double {
    if (auto it = entries.find(s); it != entries.end()) return it->second.value;
    int total = 0;
    for (const int c : s.taken) total += c;
    if (s.t == mixed.T + 1 || s.k == 0 || total == mixed.n) {
      entries.emplace(s, QptasEntry{0.0, -1});
      return 0.0;
    }

    double best = -1.0;
    int best_class = -1;
    for (int m = 0; m <= partition.M; ++m) {
      const int taken = s.taken[static_cast<std::size_t>(m)];
      if (taken >= partition.size_of(m)) continue;  // class exhausted
      const int app = partition.member(m, taken);
      const double p = mixed.probs[static_cast<std::size_t>(app)];
      const double v = mixed.values[static_cast<std::size_t>(app)];
      ClassState next = s;
      next.t += 1;
      next.taken[static_cast<std::size_t>(m)] += 1;
      ClassState next_hired = next;
      next_hired.k -= 1;
      const double r = p * (v + F(next_hired)) + (1.0 - p) * F(next);
      if (r > best) {  // ties keep the lowest class index
        best = r;
        best_class = m;
      }
    }
    entries.emplace(s, QptasEntry{best, best_class});
    return best;
  };

  ClassState start;
  start.t = 1;
  start.k = mixed.k;
  start.taken.assign(static_cast<std::size_t>(partition.M + 1), 0);
  result.value = F(start);
  return result;
}

DecisionTree qptas_policy_tree(const QptasMemo& memo, const Instance& mixed,
                               const ClassPartition& partition) {
  DecisionTree tree;
  std::unordered_map<ClassState, NodeId, ClassStateHash> built;

  auto avail_of = [&](const ClassState& s) {
    AvailSet avail = AvailSet::none(mixed.n);
    for (int m = 0; m <= partition.M; ++m)
      for (int rank = s.taken[static_cast<std::size_t>(m)]; rank < partition.size_of(m); ++rank)
        avail.set(partition.member(m, rank));
    return avail;
  };

  std::function<NodeId(const ClassState&)> build = [&](const ClassState& s) -> NodeId {
    if (auto it = built.find(s); it != built.end()) return it->second;
    const AvailSet avail = avail_of(s);
    const State state{s.t, s.k, avail};
    NodeId id;
    int total = 0;
    for (const int c : s.taken) total += c;
    if (s.t == mixed.T + 1 || s.k == 0 || total == mixed.n) {
      id = tree.add(TreeNode{state, kVirtualApp, kNoNode, kNoNode});
    } else {
      const auto it = memo.entries.find(s);
      if (it == memo.entries.end()) throw std::logic_error("qptas memo missing a reachable state");
      const int m = it->second.choice;
      const int app = partition.member(m, s.taken[static_cast<std::size_t>(m)]);
      id = tree.add(TreeNode{state, app, kNoNode, kNoNode});
      ClassState next = s;
      next.t += 1;
      next.taken[static_cast<std::size_t>(m)] += 1;
      ClassState next_hired = next;
      next_hired.k -= 1;
      const NodeId left = build(next);
      const NodeId right = build(next_hired);
      tree.at(id).left = left;
      tree.at(id).right = right;
    }
    built.emplace(s, id);
    return id;
  };

  ClassState start;
  start.t = 1;
  start.k = mixed.k;
  start.taken.assign(static_cast<std::size_t>(partition.M + 1), 0);
  tree.root = build(start);
  return tree;
}

std::optional<OrderByValueViolation> check_order_by_value(const DecisionTree& tree,
                                                          const ClassPartition& partition) {
  if (!tree.has(tree.root)) return std::nullopt;
  std::vector<NodeId> stack{tree.root};
  std::vector<bool> visited(tree.nodes.size(), false);
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (visited[static_cast<std::size_t>(id)]) continue;
    visited[static_cast<std::size_t>(id)] = true;
    const TreeNode& u = tree.at(id);
    if (u.is_leaf()) continue;
    stack.push_back(u.left);
    stack.push_back(u.right);
    const int m = partition.class_of[static_cast<std::size_t>(u.app)];
    // class lists are value-sorted with ties lexicographic, so the first
    // available member is the required offer
    for (int rank = 0; rank < partition.size_of(m); ++rank) {
      const int candidate = partition.member(m, rank);
      if (!u.state.avail.test(candidate)) continue;
      if (candidate != u.app) return OrderByValueViolation{id, u.app, candidate};
      break;
    }
  }
  return std::nullopt;
}

std::string QptasMemo::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [state, entry] : entries) {
    nlohmann::json e;
    e["t"] = state.t;
    e["k"] = state.k;
    e["taken"] = state.taken;
    e["value"] = entry.value;
    e["choice"] = entry.choice < 0 ? nlohmann::json(nullptr) : nlohmann::json(entry.choice);
    arr.push_back(std::move(e));
  }
  nlohmann::json j;
  j["entries"] = std::move(arr);
  return j.dump();
}

}  // namespace hiring
