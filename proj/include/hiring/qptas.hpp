#pragma once

#include <optional>
#include <unordered_map>

#include "hiring/rounding.hpp"
#include "hiring/tree.hpp"

namespace hiring {

// Dynamic-program state for the class-vector DP: stage t, open positions
// k_t, and the number of applicants already selected from each class.
struct ClassState {
  int t = 1;
  int k = 0;
  std::vector<int> taken;  // per-class counts, size M+1

  bool operator==(const ClassState& other) const {
    return t == other.t && k == other.k && taken == other.taken;
  }
};

struct ClassStateHash {
  std::size_t operator()(const ClassState& s) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ (static_cast<std::uint64_t>(s.t) << 32) ^
                      static_cast<std::uint64_t>(s.k);
    for (const int c : s.taken) {
      h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

struct QptasEntry {
  double value = 0.0;
  int choice = -1;  // class index, -1 at terminal states
};

struct QptasMemo {
  std::unordered_map<ClassState, QptasEntry, ClassStateHash> entries;
  std::string to_json() const;
};

struct QptasResult {
  double value = 0.0;
  QptasMemo memo;
};

// Optimal order-by-value policy for the mixed-rounded instance:
// F(t,k,L) = max over classes m with unexhausted members of
//   p^(m) (v_{C_m[l_m+1]} + F(t+1,k-1,L+e_m)) + (1-p^(m)) F(t+1,k,L+e_m),
// terminal states (t = T+1, k = 0, or everyone selected) valued 0.
// Argmax ties break toward the lowest class index.
QptasResult qptas_solve(const Instance& mixed, const ClassPartition& partition);

// Expands the memo's argmax choices into an explicit decision tree over
// applicant ids: within each class the next applicant is the value-best
// available (ties lexicographic).
DecisionTree qptas_policy_tree(const QptasMemo& memo, const Instance& mixed,
                               const ClassPartition& partition);

struct OrderByValueViolation {
  NodeId node = kNoNode;
  int offered = -1;
  int should_offer = -1;
};

// At every internal node, app(u) must be the value-max (ties lexicographic)
// of avail(u) intersected with app(u)'s class.
std::optional<OrderByValueViolation> check_order_by_value(const DecisionTree& tree,
                                                          const ClassPartition& partition);

// Resource guard: k * (T+1) * prod_m (|C_m|+1), the ceiling on memo entries.
double qptas_state_bound(const Instance& mixed, const ClassPartition& partition);

}  // namespace hiring
