#include <doctest.h>

#include <set>

#include "hiring/canonical.hpp"
#include "hiring/rounding.hpp"
#include "support.hpp"

using namespace hiring;
using namespace hiring::testsupport;

TEST_CASE("partition matches direct interval membership") {
  Instance inst;
  inst.n = 3;
  inst.values = {1.0, 1.0, 1.0};
  inst.probs = {0.001, 0.02, 0.9};
  inst.k = 1;
  inst.T = 10;
  const double eps = 0.1;
  const auto part = partition_classes(inst, eps);
  CHECK(part.gamma == doctest::Approx(0.01));
  CHECK(part.class_of[0] == 0);
  // independent membership check: class m covers ((1+eps)^{m-1} g, (1+eps)^m g]
  for (int i = 1; i < 3; ++i) {
    const int m = part.class_of[static_cast<std::size_t>(i)];
    REQUIRE(m >= 1);
    double lo = part.gamma;
    for (int j = 1; j < m; ++j) lo *= 1.0 + eps;
    CHECK(inst.probs[static_cast<std::size_t>(i)] > lo);
    CHECK(inst.probs[static_cast<std::size_t>(i)] <= lo * (1.0 + eps));
  }
}

TEST_CASE("all tiny probabilities collapse into class zero") {
  Instance inst;
  inst.n = 4;
  inst.values = {1.0, 2.0, 3.0, 4.0};
  inst.probs = {0.01, 0.02, 0.03, 0.05};
  inst.k = 2;
  inst.T = 2;
  const auto part = partition_classes(inst, 0.2);  // gamma = 0.1
  CHECK(part.M == 0);
  for (int i = 0; i < 4; ++i) CHECK(part.class_of[static_cast<std::size_t>(i)] == 0);
}

TEST_CASE("probability exactly gamma belongs to class zero") {
  Instance inst;
  inst.n = 2;
  inst.values = {1.0, 1.0};
  inst.probs = {0.1, 0.2};
  inst.k = 1;
  inst.T = 2;
  const auto part = partition_classes(inst, 0.2);  // gamma = 0.1 exactly
  CHECK(part.class_of[0] == 0);  // boundary case: the interval is closed above
  const int m = part.class_of[1];
  REQUIRE(m >= 1);
  CHECK(0.2 > part.bounds[static_cast<std::size_t>(m - 1)]);
  CHECK(0.2 <= part.bounds[static_cast<std::size_t>(m)]);
}

TEST_CASE("partition rejects gamma >= 1") {
  Instance inst = example_instance();  // T = 2
  CHECK_THROWS_WITH_AS((void)partition_classes(inst, 2.0), doctest::Contains("epsilon too large"),
                       std::invalid_argument);
}

TEST_CASE("class lists are sorted by weakly-decreasing rounded value") {
  Rng rng(90);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = random_instance(rng, 10, 3, 8);
    const auto rounded = build_rounded(inst, 0.4);
    const auto& part = rounded.partition;
    for (int m = 0; m <= part.M; ++m) {
      for (int r = 1; r < part.size_of(m); ++r) {
        CHECK(rounded.mixed.values[static_cast<std::size_t>(part.member(m, r - 1))] >=
              rounded.mixed.values[static_cast<std::size_t>(part.member(m, r))]);
      }
    }
  }
}

TEST_CASE("round_up forces the product through gamma") {
  Instance inst;
  inst.n = 3;
  inst.values = {10.0, 4.0, 2.0};
  inst.probs = {0.001, 0.0, 0.9};
  inst.k = 1;
  inst.T = 5;
  const double eps = 0.5;  // gamma = 0.1
  const auto part = partition_classes(inst, eps);
  const Instance up = round_up(inst, part);
  CHECK(up.flavor == Flavor::RoundedUp);
  CHECK(up.probs[0] == doctest::Approx(0.1));
  CHECK(up.values[0] == doctest::Approx(0.01 / 0.1));
  // zero-probability applicants keep r = 0
  CHECK(up.probs[1] == doctest::Approx(0.1));
  CHECK(up.values[1] == 0.0);
  // applicants outside class zero are untouched
  CHECK(up.probs[2] == 0.9);
  CHECK(up.values[2] == 2.0);
}

TEST_CASE("reward rates survive rounding up to fp accuracy") {
  Rng rng(91);
  for (int trial = 0; trial < 40; ++trial) {
    const Instance inst = random_instance(rng, 10, 3, 8);
    const auto rounded = build_rounded(inst, 0.3);
    for (int i = 0; i < inst.n; ++i) {
      const double r = inst.values[static_cast<std::size_t>(i)] * inst.probs[static_cast<std::size_t>(i)];
      const double r_up = rounded.up.values[static_cast<std::size_t>(i)] *
                          rounded.up.probs[static_cast<std::size_t>(i)];
      CHECK(r_up == doctest::Approx(r).epsilon(1e-14));
    }
  }
}

TEST_CASE("mixed rounding collapses to at most M+1 distinct probabilities") {
  Rng rng(92);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = random_instance(rng, 12, 3, 8);
    const auto rounded = build_rounded(inst, 0.4);
    std::set<double> distinct(rounded.mixed.probs.begin(), rounded.mixed.probs.end());
    CHECK(static_cast<int>(distinct.size()) <= rounded.partition.M + 1);
    for (int i = 0; i < inst.n; ++i) {
      const int m = rounded.partition.class_of[static_cast<std::size_t>(i)];
      CHECK(rounded.mixed.probs[static_cast<std::size_t>(i)] ==
            rounded.partition.class_prob[static_cast<std::size_t>(m)]);
      CHECK(rounded.mixed.values[static_cast<std::size_t>(i)] ==
            rounded.up.values[static_cast<std::size_t>(i)]);
    }
  }
}

TEST_CASE("sandwich: mixed probabilities bound the originals") {
  Rng rng(93);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance inst = random_instance(rng, 10, 3, 8);
    const double eps = 0.3;
    const auto rounded = build_rounded(inst, eps);
    for (int i = 0; i < inst.n; ++i) {
      if (rounded.partition.class_of[static_cast<std::size_t>(i)] == 0) continue;
      const double p = inst.probs[static_cast<std::size_t>(i)];
      const double p_mixed = rounded.mixed.probs[static_cast<std::size_t>(i)];
      CHECK(p_mixed <= p);
      CHECK(p <= (1.0 + eps) * p_mixed);
      CHECK(rounded.up.probs[static_cast<std::size_t>(i)] == p);
    }
  }
}

TEST_CASE("rounding inequalities hold empirically for canonical trees") {
  Rng rng(94);
  for (int trial = 0; trial < 60; ++trial) {
    const Instance inst = random_instance(rng, 8, 3, 6);
    const double eps = trial % 2 == 0 ? 0.3 : 0.5;
    const auto rounded = build_rounded(inst, eps);
    const DecisionTree raw = random_policy_tree(inst, rng);

    // canonical for I: mixed reward dominates (1-2eps) of the original
    auto [canon_i, r1] = canonicalize(raw, inst);
    const double on_i = tree_reward(canon_i, inst, canon_i.root);
    const double on_mixed = tree_reward(canon_i, rounded.mixed, canon_i.root);
    CAPTURE(trial);
    CHECK(on_mixed >= (1.0 - 2.0 * eps) * on_i - 1e-9 * (1.0 + on_i));

    // canonical for the mixed instance: original reward dominates
    auto [canon_m, r2] = canonicalize(raw, rounded.mixed);
    const double m_mixed = tree_reward(canon_m, rounded.mixed, canon_m.root);
    const double m_i = tree_reward(canon_m, inst, canon_m.root);
    CHECK(m_i >= m_mixed - 1e-9 * (1.0 + m_mixed));
  }
}

TEST_CASE("rounded instance serializes with per-applicant classes") {
  const auto rounded = build_rounded(example_instance(), 0.5);
  const std::string j = rounded.to_json();
  CHECK(j.find("\"class_of\"") != std::string::npos);
  CHECK(j.find("\"mixed\"") != std::string::npos);
}
