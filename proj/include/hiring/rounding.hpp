#pragma once

#include <string>
#include <vector>

#include "hiring/instance.hpp"

namespace hiring {

// Acceptance-probability classes C_0..C_M. C_0 holds applicants with
// p_i <= gamma (gamma = eps/T); C_m for m >= 1 holds those with
// p_i in ((1+eps)^{m-1} gamma, (1+eps)^m gamma]. Class member lists are
// sorted by weakly-decreasing value, ties by lowest index.
struct ClassPartition {
  double eps = 0.0;
  double gamma = 0.0;
  int M = 0;                                // class count beyond C_0
  std::vector<std::vector<int>> classes;    // M+1 lists
  std::vector<double> class_prob;           // p^(0..M); p^(0) = gamma
  std::vector<double> bounds;               // bounds[m] = (1+eps)^m * gamma
  std::vector<int> class_of;                // applicant -> class index

  int size_of(int m) const { return static_cast<int>(classes[static_cast<std::size_t>(m)].size()); }
  int member(int m, int rank) const {  // rank is 0-based within the sorted list
    return classes[static_cast<std::size_t>(m)][static_cast<std::size_t>(rank)];
  }
};

// Original instance together with its rounded-up (I-up) and mixed-rounded
// (I-updown) counterparts.
struct RoundedInstance {
  Instance base;
  Instance up;
  Instance mixed;
  ClassPartition partition;
  std::vector<double> r;  // r_i = v_i * p_i

  std::string to_json() const;
};

// Requires 0 < eps and gamma = eps/T < 1.
ClassPartition partition_classes(const Instance& inst, double eps);

// I-up: C_0 probabilities raised to gamma with values rescaled so that
// p_i * v_i is preserved; other applicants unchanged.
Instance round_up(const Instance& inst, const ClassPartition& partition);

// I-updown: class-m probabilities (m >= 1) collapsed down to
// p^(m) = (1+eps)^{m-1} gamma; values unchanged from I-up.
Instance mixed_round(const Instance& up, const ClassPartition& partition);

// Convenience: the whole pipeline.
RoundedInstance build_rounded(const Instance& inst, double eps);

}  // namespace hiring
