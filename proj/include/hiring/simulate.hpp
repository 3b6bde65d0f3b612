#pragma once

#include <string>
#include <variant>

#include "hiring/block_tree.hpp"
#include "hiring/tree.hpp"

namespace hiring {

struct SimReport {
  std::uint64_t trials = 0;
  double mean_reward = 0.0;
  double std_error = 0.0;  // sample std / sqrt(trials)
  std::uint64_t seed = 0;

  std::string to_json() const;
};

// Monte Carlo walk of a policy under an instance. Acceptances (and coin
// flips, for coin-bearing block candidates) are drawn from a per-trial
// keyed stream, so trials are order-independent and the report is
// reproducible byte for byte given the seed.
SimReport simulate(const DecisionTree& tree, const Instance& inst, std::uint64_t trials,
                   std::uint64_t seed);

SimReport simulate(const BlockTree& tree, const Instance& inst, std::uint64_t trials,
                   std::uint64_t seed);

}  // namespace hiring
