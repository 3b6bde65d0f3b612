#include "hiring/ptas.hpp"

#include <chrono>
#include <json.hpp>
#include <map>
#include <unordered_map>

#include "hiring/canonical.hpp"
#include "hiring/qptas.hpp"

namespace hiring {

using nlohmann::json;

RegimeDecision classify_regime(const Instance& inst, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("classify_regime needs eps > 0");
  RegimeDecision d;
  d.threshold = 1.0 / (eps * eps);
  d.regime = static_cast<double>(inst.k) >= d.threshold ? Regime::ManyPositions
                                                        : Regime::FewPositions;
  return d;
}

double many_positions_factor(int k) {
  if (k < 1) throw std::invalid_argument("many_positions_factor needs k >= 1");
  // e^{-k} k^k / k! via logs to dodge overflow
  const double kk = static_cast<double>(k);
  const double log_term = -kk + kk * std::log(kk) - std::lgamma(kk + 1.0);
  return 1.0 - std::exp(log_term);
}

double underestimate_opt(const Instance& mixed) { return greedy_dp_value(mixed); }

double PtasParams::delta_for(int F) const {
  const int mfac = std::max(M, 1);
  return eps / (2.0 * static_cast<double>(k) * static_cast<double>(mfac) * static_cast<double>(F)) *
         opt_under;
}

double PtasParams::mu_for(int F) const {
  return eps3 / (static_cast<double>(k) * static_cast<double>(F));
}

long long PtasParams::contrib_budget_for(int F) const {
  const int mfac = std::max(M, 1);
  const double b = 4.0 * static_cast<double>(k) * static_cast<double>(mfac) *
                   static_cast<double>(F) / (eps3 * eps);
  return static_cast<long long>(std::floor(b));
}

std::vector<double> PtasParams::psi_menu_for(int F) const {
  std::vector<double> menu;
  // geometric part: inverse powers of (1 + mu) inside [1 - eps^3, 1]
  const double mu = mu_for(F);
  for (double x = 1.0; x >= psi_min; x /= (1.0 + mu)) {
    menu.push_back(x);
    if (x == 0.0) break;
  }
  return menu;
}

PtasParams make_ptas_params(const Instance& mixed, const ClassPartition& partition, double eps,
                            double opt_under) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("ptas params need eps in (0,1)");
  PtasParams p;
  p.eps = eps;
  p.eps3 = eps * eps * eps;
  p.psi_min = 1.0 - p.eps3;
  p.opt_under = opt_under;
  p.k = mixed.k;
  p.M = partition.M;
  p.m_count = partition.M + 1;
  p.active_classes = 0;
  for (int m = 0; m <= partition.M; ++m)
    if (partition.size_of(m) > 0) p.active_classes += 1;
  const double f_bound = terminal_count_bound(eps);
  p.f_cap = static_cast<int>(std::min({f_bound, static_cast<double>(mixed.T + 1),
                                       static_cast<double>(mixed.n + 1)}));
  p.f_cap = std::max(p.f_cap, 1);
  return p;
}

namespace {

std::vector<double> full_psi_menu(const PtasParams& params, const ClassPartition& partition,
                                  int F) {
  std::vector<double> menu = params.psi_menu_for(F);
  for (int m = 0; m <= partition.M; ++m)
    menu.push_back(1.0 - partition.class_prob[static_cast<std::size_t>(m)]);
  std::sort(menu.begin(), menu.end(), std::greater<>());
  menu.erase(std::unique(menu.begin(), menu.end()), menu.end());
  return menu;
}

double binomial_double(double n, double r) {
  // C(n, r) computed in doubles; astronomical values saturate to +inf
  double out = 1.0;
  for (double i = 1.0; i <= r; i += 1.0) {
    out *= (n - r + i) / i;
    if (!std::isfinite(out)) return std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace

double contribution_grid_size(const PtasParams& params, int F) {
  // cells of empty classes are pinned to zero and do not enumerate
  const double cells = static_cast<double>(params.active_classes) * static_cast<double>(F);
  const double budget = static_cast<double>(params.contrib_budget_for(F));
  return binomial_double(budget + cells, cells);
}

void enumerate_guesses(const PtasParams& params, const ClassPartition& partition,
                       std::uint64_t cap, const std::function<bool(const GuessVector&)>& yield) {
  std::uint64_t produced = 0;
  for (int F = 1; F <= params.f_cap; ++F) {
    const double contrib_count = contribution_grid_size(params, F);
    if (contrib_count > static_cast<double>(cap))
      throw std::runtime_error("guess grid exceeds budget cap in dimension: contributions (F=" +
                               std::to_string(F) + ")");
    const std::vector<double> menu = full_psi_menu(params, partition, F);
    const double reject_count = std::pow(static_cast<double>(menu.size()),
                                         static_cast<double>(std::max(F - 1, 0)));
    if (reject_count > static_cast<double>(cap))
      throw std::runtime_error("guess grid exceeds budget cap in dimension: rejections (F=" +
                               std::to_string(F) + ")");

    const int cells = params.m_count * F;
    const long long budget = params.contrib_budget_for(F);
    GuessVector guess;
    guess.F = F;
    guess.delta = params.delta_for(F);
    guess.mu = params.mu_for(F);
    guess.contrib_mult.assign(static_cast<std::size_t>(F),
                              std::vector<long long>(static_cast<std::size_t>(params.m_count), 0));
    guess.rejects.assign(static_cast<std::size_t>(std::max(F - 1, 0)), 1.0);

    std::vector<long long> flat(static_cast<std::size_t>(cells), 0);
    bool stop = false;

    // ascending lexicographic over the flattened cell vector, sum <= budget
    std::function<bool(int, long long)> walk_cells = [&](int cell, long long used) -> bool {
      if (cell == cells) {
        for (int f = 0; f < F; ++f)
          for (int m = 0; m < params.m_count; ++m)
            guess.contrib_mult[static_cast<std::size_t>(f)][static_cast<std::size_t>(m)] =
                flat[static_cast<std::size_t>(f * params.m_count + m)];
        // rejection estimates: odometer over the menu, descending per node
        std::vector<std::size_t> pick(static_cast<std::size_t>(std::max(F - 1, 0)), 0);
        while (true) {
          for (std::size_t i = 0; i < pick.size(); ++i) guess.rejects[i] = menu[pick[i]];
          produced += 1;
          if (produced > cap)
            throw std::runtime_error("guess grid exceeds budget cap in dimension: total");
          if (!yield(guess)) return false;
          std::size_t i = 0;
          for (; i < pick.size(); ++i) {
            if (++pick[i] < menu.size()) break;
            pick[i] = 0;
          }
          if (i == pick.size() && !pick.empty()) break;
          if (pick.empty()) break;
        }
        return true;
      }
      const int m = cell % params.m_count;
      const bool empty_class = static_cast<std::size_t>(m) < partition.classes.size() &&
                               partition.classes[static_cast<std::size_t>(m)].empty();
      const long long cell_cap = empty_class ? 0 : budget - used;  // empty cells pin to 0
      for (long long c = 0; c <= cell_cap; ++c) {
        flat[static_cast<std::size_t>(cell)] = c;
        if (!walk_cells(cell + 1, used + c)) return false;
      }
      flat[static_cast<std::size_t>(cell)] = 0;
      return true;
    };
    if (!walk_cells(0, 0)) stop = true;
    if (stop) return;
  }
}

AssignResult assign_and_build(const GuessVector& guess, const Instance& mixed,
                              const ClassPartition& partition, int k_remaining,
                              const ClassCursor& start, const RightBuilder& build_right) {
  AssignResult result;
  if (k_remaining < 1) {
    result.reason = "no open positions";
    return result;
  }

  auto avail_of = [&](const ClassCursor& cur) {
    AvailSet avail = AvailSet::none(mixed.n);
    for (int m = 0; m <= partition.M; ++m)
      for (int rank = cur.next_rank[static_cast<std::size_t>(m)]; rank < partition.size_of(m);
           ++rank)
        avail.set(partition.member(m, rank));
    return avail;
  };

  ClassCursor cur = start;
  BlockTree& tree = result.tree;
  std::vector<NodeId> path_nodes;
  std::vector<ClassCursor> cursors;

  for (int f = 0; f < guess.F; ++f) {
    const bool leaf = f == guess.F - 1;
    AssignedBlock rec;
    rec.phi_before = cur.next_rank;
    rec.take_count.assign(static_cast<std::size_t>(partition.M + 1), 0);

    BlockNode node;
    node.state = State{cur.t, k_remaining, avail_of(cur)};
    if (!leaf) {
      for (int m = 0; m <= partition.M; ++m) {
        const long long mult =
            guess.contrib_mult[static_cast<std::size_t>(f)][static_cast<std::size_t>(m)];
        if (mult == 0) continue;
        const double target = static_cast<double>(mult) * guess.delta;
        const double p = partition.class_prob[static_cast<std::size_t>(m)];
        double covered = 0.0;
        int take = 0;
        int rank = cur.next_rank[static_cast<std::size_t>(m)];
        while (p * covered < target) {
          if (rank >= partition.size_of(m)) break;
          covered += mixed.values[static_cast<std::size_t>(partition.member(m, rank))];
          ++rank;
          ++take;
        }
        if (p * covered < target) {
          result.reason = "class " + std::to_string(m) + " cannot cover its estimate at node " +
                          std::to_string(f);
          return result;
        }
        rec.take_count[static_cast<std::size_t>(m)] = take;
      }
      for (int m = 0; m <= partition.M; ++m) {
        const int from = cur.next_rank[static_cast<std::size_t>(m)];
        for (int j = 0; j < rec.take_count[static_cast<std::size_t>(m)]; ++j)
          node.block.push_back(partition.member(m, from + j));
        cur.next_rank[static_cast<std::size_t>(m)] += rec.take_count[static_cast<std::size_t>(m)];
      }
      std::stable_sort(node.block.begin(), node.block.end(), [&](int a, int b) {
        const double va = mixed.values[static_cast<std::size_t>(a)];
        const double vb = mixed.values[static_cast<std::size_t>(b)];
        return va > vb || (va == vb && a < b);
      });
      if (cur.t + node.block_size() - 1 > mixed.T) {
        result.reason = "path runs out of stages at node " + std::to_string(f);
        return result;
      }
      rec.psi_built = rejection_probability(node.block, mixed);
      rec.psi_guess = guess.rejects[static_cast<std::size_t>(f)];
      if (rec.psi_guess > rec.psi_built) {
        result.reason = "guessed rejection probability exceeds the built one at node " +
                        std::to_string(f);
        return result;
      }
      node.coin = CorrectionCoin{rec.psi_built == 0.0 ? 0.0 : rec.psi_guess / rec.psi_built};
      cur.t += node.block_size();
    } else {
      for (int m = 0; m <= partition.M; ++m) {
        if (guess.contrib_mult[static_cast<std::size_t>(f)][static_cast<std::size_t>(m)] != 0) {
          result.reason = "nonzero contribution guessed for the path leaf";
          return result;
        }
      }
    }
    const NodeId id = tree.add(std::move(node));
    rec.node = id;
    result.path.push_back(std::move(rec));
    path_nodes.push_back(id);
    cursors.push_back(cur);
  }

  // an all-empty path with unit coins is behaviorally a bare leaf
  bool degenerate = true;
  for (const NodeId id : path_nodes) {
    const BlockNode& node = tree.at(id);
    if (!node.block.empty() || (node.coin && node.coin->target_prob != 1.0)) degenerate = false;
  }
  if (degenerate && guess.F > 1) {
    BlockTree pruned;
    BlockNode leaf_node;
    leaf_node.state = State{start.t, k_remaining, avail_of(start)};
    pruned.root = pruned.add(std::move(leaf_node));
    result.tree = std::move(pruned);
    result.path.clear();
    result.feasible = true;
    return result;
  }

  // wire left arcs and delegate right subtrees
  for (int f = 0; f + 1 < guess.F; ++f) {
    tree.at(path_nodes[static_cast<std::size_t>(f)]).left = path_nodes[static_cast<std::size_t>(f + 1)];
    std::optional<NodeId> right;
    if (build_right) right = build_right(cursors[static_cast<std::size_t>(f)], k_remaining - 1, tree);
    if (!right) {
      const ClassCursor& after = cursors[static_cast<std::size_t>(f)];
      State s{after.t, k_remaining - 1, avail_of(after)};
      right = tree.add(BlockNode{s, {}, kNoNode, kNoNode, std::nullopt});
    }
    tree.at(path_nodes[static_cast<std::size_t>(f)]).right = *right;
  }
  tree.root = path_nodes.front();
  result.feasible = true;
  return result;
}

// ---------------------------------------------------------------------------
// Best-candidate search. The candidate family is a product space: the guess
// at each recursion slot is chosen independently and subtree rewards enter
// the ranking linearly, so the best member is found by composing the best
// sub-candidate per reachable slot. Contribution matrices are explored
// through their assignment outcomes: per class and block only the minimal
// covering multiple of each distinct prefix length is evaluated (any other
// multiple yields the same block, so the argmax is unchanged).
// ---------------------------------------------------------------------------

namespace {

struct CursorKey {
  std::vector<int> ranks;
  int k = 0;
  int t = 0;
  bool operator==(const CursorKey&) const = default;
};

struct CursorKeyHash {
  std::size_t operator()(const CursorKey& key) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ (static_cast<std::uint64_t>(key.k) << 32) ^
                      static_cast<std::uint64_t>(key.t);
    for (const int r : key.ranks)
      h ^= static_cast<std::uint64_t>(r) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

struct Choice {
  double value = 0.0;
  int F = 1;                             // 1 = bare leaf
  std::vector<std::vector<int>> takes;   // [f in 0..F-2][m]
  std::vector<double> psis;              // guessed psi per internal path node
  std::vector<long long> mults;          // flattened minimal multiples (diagnostics)
};

struct Search {
  const Instance& mixed;
  const ClassPartition& part;
  PtasParams params;
  std::uint64_t budget = 0;
  std::uint64_t evaluated = 0;
  bool partial = false;
  std::unordered_map<CursorKey, Choice, CursorKeyHash> memo;
  std::map<int, std::vector<double>> menus;  // per F

  const std::vector<double>& menu_for(int F) {
    auto it = menus.find(F);
    if (it == menus.end()) it = menus.emplace(F, full_psi_menu(params, part, F)).first;
    return it->second;
  }

  const Choice& best(const ClassCursor& cur, int k) {
    CursorKey key{cur.next_rank, k, cur.t};
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    Choice best_choice;  // the bare leaf, value 0, always available
    int remaining = 0;
    for (int m = 0; m <= part.M; ++m)
      remaining += part.size_of(m) - cur.next_rank[static_cast<std::size_t>(m)];
    const int stages_left = mixed.T - cur.t + 1;

    if (k >= 1 && stages_left >= 1 && remaining >= 1 && !partial) {
      // With one position left every candidate is a chain: a multi-block
      // path with the same per-class takes merges into the single block
      // enumerated at F = 2 with weakly larger coin-aware reward, so deeper
      // F adds nothing for k = 1.
      int f_cap = std::min({params.f_cap, stages_left + 1, remaining + 1});
      if (k == 1) f_cap = std::min(f_cap, 2);
      for (int F = 2; F <= f_cap && !partial; ++F) {
        explore(cur, k, F, best_choice);
      }
    }

    auto [it, inserted] = memo.emplace(std::move(key), std::move(best_choice));
    return it->second;
  }

 private:
  // Enumerates assignment outcomes for a leftmost path of length F and keeps
  // the best in `out`. Cells walk row-major (block-major, class-minor);
  // take counts ascend, so the order is deterministic.
  void explore(const ClassCursor& start, int k, int F, Choice& out) {
    const double delta = params.delta_for(F);
    const long long budget_mult = params.contrib_budget_for(F);
    const std::vector<double>& menu = menu_for(F);
    const int internal = F - 1;

    std::vector<std::vector<int>> takes(static_cast<std::size_t>(internal),
                                        std::vector<int>(static_cast<std::size_t>(part.M + 1), 0));
    std::vector<long long> mults(static_cast<std::size_t>(internal * (part.M + 1)), 0);
    ClassCursor cur = start;

    std::function<void(int, long long, int)> walk = [&](int cell, long long used_mult,
                                                        int used_stages) {
      if (partial) return;
      if (cell == internal * (part.M + 1)) {
        evaluate(start, k, F, takes, mults, menu, out);
        return;
      }
      const int f = cell / (part.M + 1);
      const int m = cell % (part.M + 1);
      const double p = part.class_prob[static_cast<std::size_t>(m)];
      const int base_rank = cur.next_rank[static_cast<std::size_t>(m)];

      // take = 0 (multiple 0)
      takes[static_cast<std::size_t>(f)][static_cast<std::size_t>(m)] = 0;
      mults[static_cast<std::size_t>(cell)] = 0;
      walk(cell + 1, used_mult, used_stages);

      // take = c >= 1, realizable via its minimal covering multiple
      double sum_prev = 0.0;  // value sum of the first c-1 members
      for (int c = 1; base_rank + c <= part.size_of(m); ++c) {
        if (partial) break;
        if (used_stages + c > mixed.T - start.t + 1) break;
        const double v =
            mixed.values[static_cast<std::size_t>(part.member(m, base_rank + c - 1))];
        const double sum_now = sum_prev + v;
        const long long mult_min =
            static_cast<long long>(std::floor(p * sum_prev / delta)) + 1;
        sum_prev = sum_now;
        if (static_cast<double>(mult_min) * delta > p * sum_now) continue;  // no multiple lands here
        if (used_mult + mult_min > budget_mult) break;  // larger c needs larger multiples
        takes[static_cast<std::size_t>(f)][static_cast<std::size_t>(m)] = c;
        mults[static_cast<std::size_t>(cell)] = mult_min;
        cur.next_rank[static_cast<std::size_t>(m)] = base_rank + c;
        walk(cell + 1, used_mult + mult_min, used_stages + c);
        cur.next_rank[static_cast<std::size_t>(m)] = base_rank;
      }
      takes[static_cast<std::size_t>(f)][static_cast<std::size_t>(m)] = 0;
      mults[static_cast<std::size_t>(cell)] = 0;
    };
    walk(0, 0, 0);
  }

  void evaluate(const ClassCursor& start, int k, int F,
                const std::vector<std::vector<int>>& takes, const std::vector<long long>& mults,
                const std::vector<double>& menu, Choice& out) {
    if (evaluated >= budget) {
      partial = true;
      return;
    }
    evaluated += 1;

    const int internal = F - 1;
    // per-node block data and right-subtree values, walking the path forward
    std::vector<double> psi(static_cast<std::size_t>(internal), 1.0);
    std::vector<double> offer_mass(static_cast<std::size_t>(internal), 0.0);
    std::vector<double> right_value(static_cast<std::size_t>(internal), 0.0);
    ClassCursor cur = start;
    for (int f = 0; f < internal; ++f) {
      std::vector<int> block;
      for (int m = 0; m <= part.M; ++m) {
        const int from = cur.next_rank[static_cast<std::size_t>(m)];
        for (int j = 0; j < takes[static_cast<std::size_t>(f)][static_cast<std::size_t>(m)]; ++j)
          block.push_back(part.member(m, from + j));
        cur.next_rank[static_cast<std::size_t>(m)] +=
            takes[static_cast<std::size_t>(f)][static_cast<std::size_t>(m)];
      }
      std::stable_sort(block.begin(), block.end(), [&](int a, int b) {
        const double va = mixed.values[static_cast<std::size_t>(a)];
        const double vb = mixed.values[static_cast<std::size_t>(b)];
        return va > vb || (va == vb && a < b);
      });
      double prefix = 1.0;
      double mass = 0.0;
      for (const int a : block) {
        const double p = mixed.probs[static_cast<std::size_t>(a)];
        mass += prefix * p * mixed.values[static_cast<std::size_t>(a)];
        prefix *= 1.0 - p;
      }
      psi[static_cast<std::size_t>(f)] = prefix;
      offer_mass[static_cast<std::size_t>(f)] = mass;
      cur.t += static_cast<int>(block.size());
      right_value[static_cast<std::size_t>(f)] = best(cur, k - 1).value;
      if (partial) return;
    }

    // choose psi-tilde per node bottom-up: reward is linear in psi-tilde
    std::vector<double> chosen(static_cast<std::size_t>(internal), 1.0);
    double below = 0.0;  // value of the path node underneath (leaf = 0)
    for (int f = internal - 1; f >= 0; --f) {
      const double r = right_value[static_cast<std::size_t>(f)];
      const double pb = psi[static_cast<std::size_t>(f)];
      double pick = -1.0;
      if (below >= r) {
        for (const double cand : menu)
          if (cand <= pb) {
            pick = cand;
            break;
          }
      } else {
        if (menu.back() <= pb) pick = menu.back();
      }
      if (pick < 0.0) return;  // no feasible coin: candidate infeasible
      chosen[static_cast<std::size_t>(f)] = pick;
      below = pick * below + (1.0 - pick) * r + offer_mass[static_cast<std::size_t>(f)];
    }

    if (below > out.value) {
      out.value = below;
      out.F = F;
      out.takes = takes;
      out.psis = chosen;
      out.mults = mults;
    }
  }

 public:
  NodeId reconstruct(const ClassCursor& cur, int k, BlockTree& tree) {
    const CursorKey key{cur.next_rank, k, cur.t};
    const auto it = memo.find(key);
    auto avail_of = [&](const ClassCursor& c) {
      AvailSet avail = AvailSet::none(mixed.n);
      for (int m = 0; m <= part.M; ++m)
        for (int rank = c.next_rank[static_cast<std::size_t>(m)]; rank < part.size_of(m); ++rank)
          avail.set(part.member(m, rank));
      return avail;
    };
    if (it == memo.end() || it->second.F == 1) {
      return tree.add(BlockNode{State{cur.t, k, avail_of(cur)}, {}, kNoNode, kNoNode, std::nullopt});
    }
    const Choice& choice = it->second;
    GuessVector guess;
    guess.F = choice.F;
    guess.delta = params.delta_for(choice.F);
    guess.mu = params.mu_for(choice.F);
    guess.contrib_mult.assign(static_cast<std::size_t>(choice.F),
                              std::vector<long long>(static_cast<std::size_t>(part.M + 1), 0));
    guess.rejects = choice.psis;

    // rebuild the path directly from the stored takes
    BlockTree local;
    std::vector<NodeId> path_nodes;
    ClassCursor cursor = cur;
    for (int f = 0; f < choice.F; ++f) {
      BlockNode node;
      node.state = State{cursor.t, k, avail_of(cursor)};
      if (f < choice.F - 1) {
        for (int m = 0; m <= part.M; ++m) {
          const int from = cursor.next_rank[static_cast<std::size_t>(m)];
          for (int j = 0; j < choice.takes[static_cast<std::size_t>(f)][static_cast<std::size_t>(m)];
               ++j)
            node.block.push_back(part.member(m, from + j));
          cursor.next_rank[static_cast<std::size_t>(m)] +=
              choice.takes[static_cast<std::size_t>(f)][static_cast<std::size_t>(m)];
        }
        std::stable_sort(node.block.begin(), node.block.end(), [&](int a, int b) {
          const double va = mixed.values[static_cast<std::size_t>(a)];
          const double vb = mixed.values[static_cast<std::size_t>(b)];
          return va > vb || (va == vb && a < b);
        });
        const double psi_built = rejection_probability(node.block, mixed);
        const double psi_guess = choice.psis[static_cast<std::size_t>(f)];
        node.coin = CorrectionCoin{psi_built == 0.0 ? 0.0 : psi_guess / psi_built};
        cursor.t += node.block_size();
      }
      path_nodes.push_back(tree.add(std::move(node)));
    }
    // replay cursor positions for right subtrees
    ClassCursor replay = cur;
    for (int f = 0; f + 1 < choice.F; ++f) {
      for (int m = 0; m <= part.M; ++m)
        replay.next_rank[static_cast<std::size_t>(m)] +=
            choice.takes[static_cast<std::size_t>(f)][static_cast<std::size_t>(m)];
      int size = 0;
      for (int m = 0; m <= part.M; ++m)
        size += choice.takes[static_cast<std::size_t>(f)][static_cast<std::size_t>(m)];
      replay.t += size;
      tree.at(path_nodes[static_cast<std::size_t>(f)]).left =
          path_nodes[static_cast<std::size_t>(f + 1)];
      tree.at(path_nodes[static_cast<std::size_t>(f)]).right = reconstruct(replay, k - 1, tree);
    }
    return path_nodes.front();
  }
};

}  // namespace

PtasResult ptas_solve(const Instance& inst, double eps, const PtasOptions& opts) {
  require_valid(inst);
  const auto t0 = std::chrono::steady_clock::now();
  const RegimeDecision regime = classify_regime(inst, eps);

  PtasResult result;
  result.regime = regime.regime;
  json report;
  report["regime"] = regime.regime == Regime::ManyPositions ? "ManyPositions" : "FewPositions";
  report["eps"] = eps;
  report["threshold"] = regime.threshold;
  report["budget"] = opts.budget;

  if (regime.regime == Regime::ManyPositions) {
    // The LP route for this regime lives in external work; fall back to the
    // exact oracle at oracle scale and the greedy DP beyond it.
    SolveResult fallback;
    if (inst.n <= kOracleMaxN) {
      fallback = optimal_exact(inst);
      report["fallback"] = "exact";
    } else {
      fallback = greedy_dp(inst);
      report["fallback"] = "greedy";
    }
    report["fallback_note"] = "LP-based many-positions route is out of scope";
    report["fallback_factor"] = many_positions_factor(inst.k);
    result.value_original = fallback.value;
    result.value_mixed = fallback.value;
    if (eps < static_cast<double>(inst.T)) {
      const RoundedInstance rounded = build_rounded(inst, eps);
      result.value_mixed = tree_reward(fallback.tree, rounded.mixed, fallback.tree.root);
    }
    result.std_policy = std::move(fallback.tree);
    report["best_mixed"] = result.value_mixed;
    report["best_original"] = result.value_original;
    report["candidates_evaluated"] = 0;
    report["partial"] = false;
    report["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.report_json = report.dump();
    return result;
  }

  const RoundedInstance rounded = build_rounded(inst, eps);
  const double opt_under = underestimate_opt(rounded.mixed);
  report["opt_under"] = opt_under;

  if (!(opt_under > 0.0)) {
    // every reward rate is zero: the empty policy is optimal
    BlockTree empty;
    empty.root = empty.add(
        BlockNode{State{1, inst.k, AvailSet::all(inst.n)}, {}, kNoNode, kNoNode, std::nullopt});
    result.block_policy = std::move(empty);
    result.value_mixed = 0.0;
    result.value_original = 0.0;
    report["best_mixed"] = 0.0;
    report["best_original"] = 0.0;
    report["candidates_evaluated"] = 0;
    report["partial"] = false;
    report["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.report_json = report.dump();
    return result;
  }

  const PtasParams params = make_ptas_params(rounded.mixed, rounded.partition, eps, opt_under);
  Search search{rounded.mixed, rounded.partition, params, opts.budget, 0, false, {}, {}};

  ClassCursor start;
  start.next_rank.assign(static_cast<std::size_t>(rounded.partition.M + 1), 0);
  start.t = 1;
  const Choice& top = search.best(start, inst.k);
  result.value_mixed = top.value;

  BlockTree candidate;
  candidate.root = search.reconstruct(start, inst.k, candidate);
  const double replayed = block_tree_reward(candidate, rounded.mixed, candidate.root);
  if (!approx_eq(replayed, top.value))
    throw std::logic_error("ptas reconstruction does not reproduce the search value");

  // I-bridge: coins end their role at ranking; the deployed policy is the
  // block-canonicalized coin-free projection, evaluated under I.
  auto [canon, creport] = canonicalize_block(strip_coins(candidate), rounded.mixed);
  result.value_original = block_tree_reward(canon, inst, canon.root);
  result.block_policy = std::move(canon);

  report["f_cap"] = params.f_cap;
  report["grid_F_options"] = params.f_cap;
  report["grid_contributions_at_fcap"] = contribution_grid_size(params, params.f_cap);
  report["grid_psi_menu_at_fcap"] =
      static_cast<double>(full_psi_menu(params, rounded.partition, params.f_cap).size());
  report["candidates_evaluated"] = search.evaluated;
  report["partial"] = search.partial;
  report["best_mixed"] = result.value_mixed;
  report["best_original"] = result.value_original;
  report["composed_bound"] =
      std::max(0.0, 1.0 - 7.0 * eps) * std::max(0.0, 1.0 - 2.0 * eps);
  report["wall_time_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  result.report_json = report.dump();
  return result;
}

}  // namespace hiring
