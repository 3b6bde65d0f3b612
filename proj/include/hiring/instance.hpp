#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hiring/common.hpp"

namespace hiring {

enum class Flavor { Original, RoundedUp, MixedRounded };

std::string flavor_name(Flavor f);
Flavor flavor_from_name(const std::string& name);

// A sequential hiring instance: n applicants with values v_i >= 0 and
// acceptance probabilities p_i in [0,1], k open positions, T stages.
struct Instance {
  int n = 0;
  std::vector<double> values;
  std::vector<double> probs;
  int k = 1;
  int T = 1;
  Flavor flavor = Flavor::Original;

  double reward_rate(int i) const { return values[i] * probs[i]; }

  std::string to_json() const;
  static Instance from_json(const std::string& text);
};

struct InstanceViolation {
  std::string message;
};

// Total check of the Instance invariants; returns the first violation found.
std::optional<InstanceViolation> validate_instance(const Instance& inst);

// Throwing convenience wrapper.
void require_valid(const Instance& inst);

// Seed-deterministic random instance generator used by the CLI and tests.
struct DistSpec {
  enum class Kind { Uniform, Point } kind = Kind::Uniform;
  double lo = 0.0;
  double hi = 1.0;  // Point uses lo as the value

  static DistSpec uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
  static DistSpec point(double x) { return {Kind::Point, x, x}; }
  static DistSpec parse(const std::string& text);
};

struct GenSpec {
  int n = 0;
  int k = 1;
  int T = 1;
  DistSpec value_dist = DistSpec::uniform(0.0, 1.0);
  DistSpec prob_dist = DistSpec::uniform(0.0, 1.0);
  std::uint64_t seed = 0;
};

Instance generate_instance(const GenSpec& spec);

}  // namespace hiring
