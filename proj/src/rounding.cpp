#include "hiring/rounding.hpp"

#include <json.hpp>

namespace hiring {

ClassPartition partition_classes(const Instance& inst, double eps) {
  require_valid(inst);
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const double gamma = eps / static_cast<double>(inst.T);
  if (!(gamma < 1.0)) throw std::invalid_argument("epsilon too large for horizon (gamma >= 1)");

  ClassPartition part;
  part.eps = eps;
  part.gamma = gamma;

  // Boundaries bounds[m] = (1+eps)^m * gamma by repeated multiplication, so
  // class membership is bit-reproducible. Values exactly on a boundary fall
  // into the lower class (intervals are left-open, right-closed).
  double pmax = 0.0;
  for (int i = 0; i < inst.n; ++i) pmax = std::max(pmax, inst.probs[static_cast<std::size_t>(i)]);
  part.bounds.push_back(gamma);
  while (part.bounds.back() < pmax) part.bounds.push_back(part.bounds.back() * (1.0 + eps));
  part.M = static_cast<int>(part.bounds.size()) - 1;

  part.classes.assign(static_cast<std::size_t>(part.M + 1), {});
  part.class_of.assign(static_cast<std::size_t>(inst.n), 0);
  for (int i = 0; i < inst.n; ++i) {
    const double p = inst.probs[static_cast<std::size_t>(i)];
    int m = 0;
    while (p > part.bounds[static_cast<std::size_t>(m)]) ++m;
    part.class_of[static_cast<std::size_t>(i)] = m;
    part.classes[static_cast<std::size_t>(m)].push_back(i);
  }
  // Member lists are sorted by the value the rounded instances carry: class-0
  // members are rescaled to r_i / gamma by round_up, everyone else keeps v_i.
  // The order-by-value machinery downstream always works on those values.
  auto rounded_value = [&](int i) {
    if (part.class_of[static_cast<std::size_t>(i)] != 0)
      return inst.values[static_cast<std::size_t>(i)];
    return inst.values[static_cast<std::size_t>(i)] * inst.probs[static_cast<std::size_t>(i)] /
           gamma;
  };
  for (auto& cls : part.classes) {
    std::stable_sort(cls.begin(), cls.end(), [&](int a, int b) {
      return rounded_value(a) > rounded_value(b);
    });
  }

  part.class_prob.resize(static_cast<std::size_t>(part.M + 1));
  part.class_prob[0] = gamma;
  for (int m = 1; m <= part.M; ++m)
    part.class_prob[static_cast<std::size_t>(m)] = part.bounds[static_cast<std::size_t>(m - 1)];
  return part;
}

Instance round_up(const Instance& inst, const ClassPartition& partition) {
  Instance up = inst;
  up.flavor = Flavor::RoundedUp;
  for (int i = 0; i < inst.n; ++i) {
    if (partition.class_of[static_cast<std::size_t>(i)] != 0) continue;
    const double r = inst.values[static_cast<std::size_t>(i)] * inst.probs[static_cast<std::size_t>(i)];
    up.probs[static_cast<std::size_t>(i)] = partition.gamma;
    up.values[static_cast<std::size_t>(i)] = r / partition.gamma;
  }
  return up;
}

Instance mixed_round(const Instance& up, const ClassPartition& partition) {
  Instance mixed = up;
  mixed.flavor = Flavor::MixedRounded;
  for (int i = 0; i < up.n; ++i) {
    const int m = partition.class_of[static_cast<std::size_t>(i)];
    mixed.probs[static_cast<std::size_t>(i)] = partition.class_prob[static_cast<std::size_t>(m)];
  }
  return mixed;
}

RoundedInstance build_rounded(const Instance& inst, double eps) {
  RoundedInstance out;
  out.base = inst;
  out.partition = partition_classes(inst, eps);
  out.up = round_up(inst, out.partition);
  out.mixed = mixed_round(out.up, out.partition);
  out.r.resize(static_cast<std::size_t>(inst.n));
  for (int i = 0; i < inst.n; ++i)
    out.r[static_cast<std::size_t>(i)] =
        inst.values[static_cast<std::size_t>(i)] * inst.probs[static_cast<std::size_t>(i)];
  return out;
}

std::string RoundedInstance::to_json() const {
  nlohmann::json j;
  j["base"] = nlohmann::json::parse(base.to_json());
  j["up"] = nlohmann::json::parse(up.to_json());
  j["mixed"] = nlohmann::json::parse(mixed.to_json());
  j["gamma"] = partition.gamma;
  j["eps"] = partition.eps;
  j["class_of"] = partition.class_of;
  j["class_probs"] = partition.class_prob;
  return j.dump();
}

}  // namespace hiring
