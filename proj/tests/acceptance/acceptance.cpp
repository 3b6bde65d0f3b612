// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "../ptas_match.hpp"
#include "../support.hpp"
#include "hiring/block_build.hpp"
#include "hiring/canonical.hpp"
#include "hiring/exact.hpp"
#include "hiring/ptas.hpp"
#include "hiring/qptas.hpp"
#include "hiring/simulate.hpp"

using namespace hiring;
using namespace hiring::testsupport;

namespace {

int g_failures = 0;

struct Criterion {
  const char* label;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;

  explicit Criterion(const char* name) : label(name) {}

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }

  void finish(double limit_secs = 0.0) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_secs > 0.0 && secs > limit_secs) {
      expect(false, "over the time budget of " + std::to_string(limit_secs) + "s");
    }
    if (ok) {
      std::printf("PASS  %s (%.1fs)\n", label, secs);
    } else {
      std::printf("FAIL  %s (%.1fs): %s\n", label, secs, detail.c_str());
      g_failures += 1;
    }
    std::fflush(stdout);
  }
};

bool rel_ge(double lhs, double rhs, double rel = 1e-9) {
  return lhs >= rhs - rel * (1.0 + std::abs(rhs));
}

// Instances concentrated near the criterion's stated maxima.
Instance sized_instance(Rng& rng, int n_lo, int n_hi, int k_max, int t_lo, int t_hi) {
  Instance inst;
  inst.n = n_lo + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_hi - n_lo + 1)));
  inst.k = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(std::min(k_max, inst.n))));
  inst.T = t_lo + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(t_hi - t_lo + 1)));
  for (int i = 0; i < inst.n; ++i) {
    inst.values.push_back(10.0 * rng.next_double());
    double p = rng.next_double();
    const double roll = rng.next_double();
    if (roll < 0.15) p *= 0.01;
    else if (roll < 0.25) p = 1.0;
    inst.probs.push_back(p);
  }
  return inst;
}

void criterion_1_oracle_vs_enumeration() {
  Criterion c("1. oracle equals exhaustive policy-tree enumeration (200 instances, n<=4, T<=4)");
  Rng rng(1001);
  for (int trial = 0; trial < 200 && c.ok; ++trial) {
    const Instance inst = sized_instance(rng, 3, 4, 4, 3, 4);
    const double dp = optimal_exact_value(inst);
    const double brute = brute_force_optimum(inst);
    c.expect(dp == brute, "trial " + std::to_string(trial) + ": dp " + std::to_string(dp) +
                              " != brute " + std::to_string(brute));
  }
  c.finish(60.0);
}

void criterion_2_worked_example() {
  Criterion c("2. worked example: reward 3.0, path probabilities (0,.5,0,.5), optimum 5.0");
  const Instance inst = example_instance();
  const DecisionTree tree = example_tree();
  c.expect(std::abs(tree_reward(tree, inst, tree.root) - 3.0) <= 1e-12, "tree reward != 3.0");
  const auto paths = path_distribution(tree, inst);
  c.expect(paths.size() == 4, "expected 4 root-to-leaf paths");
  const double want_prob[] = {0.0, 0.5, 0.0, 0.5};
  const double want_value[] = {0.0, 2.0, 1.0, 4.0};
  for (std::size_t i = 0; i < paths.size() && c.ok; ++i) {
    c.expect(std::abs(paths[i].prob - want_prob[i]) <= 1e-12, "path probability mismatch");
    c.expect(std::abs(paths[i].value - want_value[i]) <= 1e-12, "path value mismatch");
  }
  c.expect(std::abs(brute_force_optimum(inst) - 5.0) <= 1e-12, "brute-forced optimum != 5.0");
  c.expect(std::abs(optimal_exact_value(inst) - 5.0) <= 1e-12, "oracle optimum != 5.0");
  c.finish();
}

void criterion_3_canonicalization() {
  Criterion c("3. canonicalization: 500 standard + 500 block trees, reward monotone + idempotent");
  Rng rng(1003);
  for (int trial = 0; trial < 500 && c.ok; ++trial) {
    const Instance inst = random_instance(rng, 6, 3, 6);
    const DecisionTree tree = random_policy_tree(inst, rng);
    const double before = tree_reward(tree, inst, tree.root);
    auto [once, report] = canonicalize(tree, inst);
    c.expect(rel_ge(report.reward_after, before), "standard reward decreased");
    c.expect(!check_canonical(once, inst).has_value(), "output not canonical");
    c.expect(!validate_tree(once, inst).has_value(), "output not valid");
    auto [twice, report2] = canonicalize(once, inst);
    c.expect(!report2.modified && structurally_equal(twice, once), "not idempotent");
  }
  for (int trial = 0; trial < 500 && c.ok; ++trial) {
    const Instance inst = random_instance(rng, 6, 3, 6);
    const BlockTree tree = random_block_tree(inst, rng);
    const double before = block_tree_reward(tree, inst, tree.root);
    auto [once, report] = canonicalize_block(tree, inst);
    c.expect(rel_ge(report.reward_after, before), "block reward decreased");
    c.expect(!check_block_canonical(once, inst).has_value(), "block output not canonical");
    c.expect(!validate_block_tree(once, inst).has_value(), "block output not valid");
    auto [twice, report2] = canonicalize_block(once, inst);
    c.expect(!report2.modified && block_structurally_equal(twice, once), "block not idempotent");
  }
  c.finish();
}

void criterion_4_rounding() {
  Criterion c("4. rounding: mixed >= (1-2eps)*original for I-canonical trees and the bridge back");
  Rng rng(1004);
  for (int trial = 0; trial < 200 && c.ok; ++trial) {
    const Instance inst = random_instance(rng, 10, 3, 8);
    const double eps = trial % 2 == 0 ? 0.3 : 0.5;
    const auto rounded = build_rounded(inst, eps);
    const DecisionTree raw = random_policy_tree(inst, rng);

    auto [canon_i, r1] = canonicalize(raw, inst);
    const double on_i = tree_reward(canon_i, inst, canon_i.root);
    const double on_mixed = tree_reward(canon_i, rounded.mixed, canon_i.root);
    c.expect(rel_ge(on_mixed, (1.0 - 2.0 * eps) * on_i),
             "round-down inequality violated at trial " + std::to_string(trial));

    auto [canon_m, r2] = canonicalize(raw, rounded.mixed);
    const double m_mixed = tree_reward(canon_m, rounded.mixed, canon_m.root);
    const double m_orig = tree_reward(canon_m, inst, canon_m.root);
    c.expect(rel_ge(m_orig, m_mixed), "bridge-back inequality violated at trial " + std::to_string(trial));
  }
  c.finish();
}

void criterion_5_qptas() {
  Criterion c("5. qptas: >= (1-2eps) of the oracle on I, lossless on the mixed instance");
  Rng rng(1005);
  for (int trial = 0; trial < 100 && c.ok; ++trial) {
    const Instance inst = sized_instance(rng, 9, 12, 3, 5, 8);
    const double eps = trial % 2 == 0 ? 0.3 : 0.5;
    const auto rounded = build_rounded(inst, eps);
    const auto solved = qptas_solve(rounded.mixed, rounded.partition);
    const DecisionTree tree = qptas_policy_tree(solved.memo, rounded.mixed, rounded.partition);

    const double opt_mixed = optimal_exact_value(rounded.mixed);
    c.expect(std::abs(solved.value - opt_mixed) <= 1e-12 * (1.0 + std::abs(opt_mixed)),
             "losslessness violated at trial " + std::to_string(trial));

    const double on_original = tree_reward(tree, inst, tree.root);
    const double opt = optimal_exact_value(inst);
    c.expect(rel_ge(on_original, (1.0 - 2.0 * eps) * opt),
             "end-to-end bound violated at trial " + std::to_string(trial));
  }
  c.finish(300.0);
}

void criterion_6_block_construction() {
  Criterion c("6. block construction: order rule, depth <= k*F, rejection floor, reward bound");
  Rng rng(1006);
  for (int trial = 0; trial < 100 && c.ok; ++trial) {
    const Instance inst = sized_instance(rng, 7, 10, 2, 5, 8);
    const double eps = trial % 2 == 0 ? 0.5 : 0.7;
    const double eps3 = eps * eps * eps;
    const auto rounded = build_rounded(inst, eps);
    const auto solved = qptas_solve(rounded.mixed, rounded.partition);
    const DecisionTree qtree = qptas_policy_tree(solved.memo, rounded.mixed, rounded.partition);
    const auto built = build_block_tree(qtree, rounded.mixed, rounded.partition, eps);

    c.expect(!validate_block_tree(built.tree, rounded.mixed).has_value(), "invalid block tree");
    c.expect(!check_block_order_by_value(built.tree, rounded.partition).has_value(),
             "block-order-by-value violated");
    c.expect(block_tree_depth(built.tree) <= inst.k * built.max_path_len, "depth above k*F");
    for (const auto& node : built.tree.nodes) {
      if (node.block.size() >= 2)
        c.expect(rejection_probability(node.block, rounded.mixed) >= 1.0 - eps3 - 1e-12,
                 "multi-applicant block under the rejection floor");
    }
    const double block_mixed = block_tree_reward(built.tree, rounded.mixed, built.tree.root);
    c.expect(rel_ge(block_mixed, (1.0 - 4.0 * eps3 * inst.k) * solved.value),
             "block reward bound violated at trial " + std::to_string(trial));
  }
  c.finish();
}

void criterion_7_ptas_candidates() {
  Criterion c("7. ptas candidates: family bound, feasibility instrumentation, ratio >= 0.5");
  Rng rng(1007);
  int few_runs = 0;
  int ratio_ok = 0;
  for (int trial = 0; trial < 30 && c.ok; ++trial) {
    const Instance inst = sized_instance(rng, 7, 8, 2, 5, 6);
    for (const double eps : {0.6, 0.8}) {
      if (!c.ok) break;
      if (classify_regime(inst, eps).regime != Regime::FewPositions) continue;  // criterion 8's turf
      few_runs += 1;
      const auto rounded = build_rounded(inst, eps);
      const double opt_mixed = optimal_exact_value(rounded.mixed);

      PtasOptions opts;
      opts.budget = 10'000'000;
      const auto result = ptas_solve(inst, eps, opts);
      c.expect(rel_ge(result.value_mixed, (1.0 - 7.0 * eps) * opt_mixed),
               "candidate-family bound violated");
      if (opt_mixed <= 0.0 || result.value_mixed / opt_mixed >= 0.5) ratio_ok += 1;

      const auto solved = qptas_solve(rounded.mixed, rounded.partition);
      if (solved.value > 0.0) {
        const DecisionTree qtree =
            qptas_policy_tree(solved.memo, rounded.mixed, rounded.partition);
        const auto built = build_block_tree(qtree, rounded.mixed, rounded.partition, eps);
        const auto params = make_ptas_params(rounded.mixed, rounded.partition, eps,
                                             underestimate_opt(rounded.mixed));
        const auto match = match_reference_from_root(built.tree, rounded, params, inst.k);
        c.expect(match.ok, match.ok ? "" : "instrumented match: " + match.violations.front());
      }
    }
  }
  // empirical bar, labeled as such: achieved ratio >= 0.5 on >= 90% of the
  // few-positions runs (the large-eps bound itself is vacuous)
  c.expect(few_runs > 0, "no few-positions runs sampled");
  c.expect(10 * ratio_ok >= 9 * few_runs,
           "ratio >= 0.5 on only " + std::to_string(ratio_ok) + "/" + std::to_string(few_runs));
  std::printf("      [empirical bar] achieved ratio >= 0.5 on %d/%d few-positions runs\n",
              ratio_ok, few_runs);
  c.finish(1800.0);
}

void criterion_8_regime_routing() {
  Criterion c("8. regime routing and the 1 - 1/e anchor");
  c.expect(std::abs(many_positions_factor(1) - (1.0 - std::exp(-1.0))) <= 1e-9,
           "k=1 anchor of 1 - e^{-k}k^k/k! violated");
  Rng rng(1008);
  for (int trial = 0; trial < 10 && c.ok; ++trial) {
    const Instance inst = random_instance(rng, 8, 4, 6);
    const double eps = 0.6;
    const auto decision = classify_regime(inst, eps);
    const bool expect_many = static_cast<double>(inst.k) >= 1.0 / (eps * eps);
    c.expect((decision.regime == Regime::ManyPositions) == expect_many, "threshold misrouted");
    if (decision.regime == Regime::ManyPositions) {
      const auto result = ptas_solve(inst, eps);
      c.expect(result.std_policy.has_value(), "fallback policy missing");
      const double opt = optimal_exact_value(inst);
      c.expect(std::abs(result.value_original - opt) <= 1e-9 * (1.0 + opt),
               "fallback is not the oracle at oracle scale");
    }
  }
  c.finish();
}

void criterion_9_monte_carlo() {
  Criterion c("9. Monte Carlo calibration: 50 policies, 1e5 trials, 4-sigma coverage");
  Rng rng(1009);
  int within = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = random_instance(rng, 8, 3, 7);
    double analytic = 0.0;
    SimReport report;
    if (trial % 2 == 0) {
      const DecisionTree tree = random_policy_tree(inst, rng);
      analytic = tree_reward(tree, inst, tree.root);
      report = simulate(tree, inst, 100'000, 5000 + static_cast<std::uint64_t>(trial));
    } else {
      const BlockTree tree = random_block_tree(inst, rng);
      analytic = block_tree_reward(tree, inst, tree.root);
      report = simulate(tree, inst, 100'000, 5000 + static_cast<std::uint64_t>(trial));
    }
    if (std::abs(report.mean_reward - analytic) <= 4.0 * report.std_error + 1e-12) within += 1;
  }
  c.expect(within >= 49, "only " + std::to_string(within) + "/50 within 4 standard errors");

  const Instance inst = example_instance();
  const DecisionTree tree = example_tree();
  c.expect(simulate(tree, inst, 50'000, 99).to_json() == simulate(tree, inst, 50'000, 99).to_json(),
           "seeded simulation not byte-deterministic");
  c.finish();
}

void criterion_10_evaluator_equivalence() {
  Criterion c("10. block evaluator matches the unrolled standard evaluator (500 trees)");
  Rng rng(1010);
  for (int trial = 0; trial < 500 && c.ok; ++trial) {
    const Instance inst = random_instance(rng, 7, 3, 6);
    const BlockTree btree = random_block_tree(inst, rng);
    const DecisionTree std_tree = block_tree_to_std(btree, inst);
    const double bv = block_tree_reward(btree, inst, btree.root);
    const double sv = tree_reward(std_tree, inst, std_tree.root);
    c.expect(std::abs(bv - sv) <= 1e-12 * (1.0 + std::abs(bv)),
             "evaluator mismatch at trial " + std::to_string(trial));
  }
  c.finish();
}

}  // namespace

int main() {
  criterion_1_oracle_vs_enumeration();
  criterion_2_worked_example();
  criterion_3_canonicalization();
  criterion_4_rounding();
  criterion_5_qptas();
  criterion_6_block_construction();
  criterion_7_ptas_candidates();
  criterion_8_regime_routing();
  criterion_9_monte_carlo();
  criterion_10_evaluator_equivalence();
  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria failed\n", g_failures);
  return 1;
}
