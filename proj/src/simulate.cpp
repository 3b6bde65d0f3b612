#include "hiring/simulate.hpp"

#include <cassert>
#include <json.hpp>

namespace hiring {

namespace {

struct TrialGuard {
  const Instance& inst;
  AvailSet offered;
  int offers = 0;
  int acceptances = 0;

  explicit TrialGuard(const Instance& instance)
      : inst(instance), offered(AvailSet::none(instance.n)) {}

  void on_offer(int app) {
    if (offered.test(app)) throw std::logic_error("simulator offered an applicant twice");
    offered.set(app);
    offers += 1;
    if (offers > inst.T) throw std::logic_error("simulator exceeded T offers");
  }
  void on_accept() {
    acceptances += 1;
    if (acceptances > inst.k) throw std::logic_error("simulator exceeded k acceptances");
  }
};

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  double carry = 0.0;     // Kahan compensation: zero-variance streams stay exact
  double carry_sq = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
    const double y2 = x * x - carry_sq;
    const double t2 = sum_sq + y2;
    carry_sq = (t2 - sum_sq) - y2;
    sum_sq = t2;
  }
  SimReport report(std::uint64_t trials, std::uint64_t seed) const {
    SimReport r;
    r.trials = trials;
    r.seed = seed;
    r.mean_reward = trials ? sum / static_cast<double>(trials) : 0.0;
    if (trials > 1) {
      const double var =
          std::max(0.0, (sum_sq - sum * sum / static_cast<double>(trials)) /
                            static_cast<double>(trials - 1));
      r.std_error = std::sqrt(var / static_cast<double>(trials));
    }
    return r;
  }
};

}  // namespace

SimReport simulate(const DecisionTree& tree, const Instance& inst, std::uint64_t trials,
                   std::uint64_t seed) {
  Accumulator acc;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    Rng rng = Rng::keyed(seed, trial);
    TrialGuard guard(inst);
    double reward = 0.0;
    NodeId id = tree.root;
    while (tree.has(id) && !tree.at(id).is_leaf()) {
      const TreeNode& u = tree.at(id);
      guard.on_offer(u.app);
      const double p = inst.probs[static_cast<std::size_t>(u.app)];
      if (rng.next_double() < p) {
        guard.on_accept();
        reward += inst.values[static_cast<std::size_t>(u.app)];
        id = u.right;
      } else {
        id = u.left;
      }
    }
    acc.add(reward);
  }
  return acc.report(trials, seed);
}

SimReport simulate(const BlockTree& tree, const Instance& inst, std::uint64_t trials,
                   std::uint64_t seed) {
  Accumulator acc;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    Rng rng = Rng::keyed(seed, trial);
    TrialGuard guard(inst);
    double reward = 0.0;
    NodeId id = tree.root;
    while (tree.has(id) && !tree.at(id).is_leaf()) {
      const BlockNode& u = tree.at(id);
      bool accepted = false;
      for (const int app : u.block) {
        guard.on_offer(app);
        const double p = inst.probs[static_cast<std::size_t>(app)];
        if (rng.next_double() < p) {
          guard.on_accept();
          reward += inst.values[static_cast<std::size_t>(app)];
          accepted = true;
          break;  // remaining block members are skipped
        }
      }
      if (accepted) {
        id = u.right;
      } else if (u.coin) {
        // all rejected: the left arc additionally requires the coin to be 1
        id = rng.next_double() < u.coin->target_prob ? u.left : u.right;
      } else {
        id = u.left;
      }
    }
    acc.add(reward);
  }
  return acc.report(trials, seed);
}

std::string SimReport::to_json() const {
  nlohmann::json j;
  j["trials"] = trials;
  j["mean_reward"] = mean_reward;
  j["std_error"] = std_error;
  j["seed"] = seed;
  return j.dump();
}

}  // namespace hiring
