#include "hiring/instance.hpp"

#include <json.hpp>

namespace hiring {

using nlohmann::json;

std::string flavor_name(Flavor f) {
  switch (f) {
    case Flavor::Original: return "original";
    case Flavor::RoundedUp: return "rounded_up";
    case Flavor::MixedRounded: return "mixed_rounded";
  }
  throw std::logic_error("unknown flavor");
}

Flavor flavor_from_name(const std::string& name) {
  if (name == "original") return Flavor::Original;
  if (name == "rounded_up") return Flavor::RoundedUp;
  if (name == "mixed_rounded") return Flavor::MixedRounded;
  throw std::invalid_argument("unknown flavor: " + name);
}

std::string AvailSet::to_hex() const {
  // big-endian nibbles, no leading zeros (except "0")
  std::string out;
  bool leading = true;
  for (std::size_t w = words_.size(); w-- > 0;) {
    for (int nib = 15; nib >= 0; --nib) {
      const unsigned v = (words_[w] >> (nib * 4)) & 0xf;
      if (leading && v == 0) continue;
      leading = false;
      out += "0123456789abcdef"[v];
    }
  }
  if (out.empty()) out = "0";
  return out;
}

AvailSet AvailSet::from_hex(const std::string& hex, int n) {
  AvailSet s = AvailSet::none(n);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const char c = hex[hex.size() - 1 - i];  // i-th nibble from the right
    unsigned v = 0;
    if (c >= '0' && c <= '9') v = static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f') v = static_cast<unsigned>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') v = static_cast<unsigned>(c - 'A' + 10);
    else throw std::invalid_argument("bad hex digit in avail mask");
    for (int b = 0; b < 4; ++b)
      if (v & (1u << b)) s.set(static_cast<int>(i) * 4 + b);
  }
  return s;
}

std::optional<InstanceViolation> validate_instance(const Instance& inst) {
  if (inst.n <= 0) return InstanceViolation{"n must be positive"};
  if (static_cast<int>(inst.values.size()) != inst.n)
    return InstanceViolation{"values list must have exactly n entries"};
  if (static_cast<int>(inst.probs.size()) != inst.n)
    return InstanceViolation{"probs list must have exactly n entries"};
  for (int i = 0; i < inst.n; ++i) {
    if (!(inst.values[i] >= 0.0))
      return InstanceViolation{"negative value at applicant " + std::to_string(i)};
    if (!(inst.probs[i] >= 0.0 && inst.probs[i] <= 1.0))
      return InstanceViolation{"prob out of range at applicant " + std::to_string(i)};
  }
  if (inst.k < 1) return InstanceViolation{"k must be at least 1"};
  if (inst.k > inst.n) return InstanceViolation{"k must be at most n"};
  if (inst.T < 1) return InstanceViolation{"T must be at least 1"};
  return std::nullopt;
}

void require_valid(const Instance& inst) {
  if (auto v = validate_instance(inst)) throw std::invalid_argument("invalid instance: " + v->message);
}

std::string Instance::to_json() const {
  json j;
  j["n"] = n;
  j["values"] = values;
  j["probs"] = probs;
  j["k"] = k;
  j["T"] = T;
  j["flavor"] = flavor_name(flavor);
  return j.dump();
}

Instance Instance::from_json(const std::string& text) {
  const json j = json::parse(text);
  Instance inst;
  inst.n = j.at("n").get<int>();
  inst.values = j.at("values").get<std::vector<double>>();
  inst.probs = j.at("probs").get<std::vector<double>>();
  inst.k = j.at("k").get<int>();
  inst.T = j.at("T").get<int>();
  inst.flavor = j.contains("flavor") ? flavor_from_name(j.at("flavor").get<std::string>())
                                     : Flavor::Original;
  return inst;
}

DistSpec DistSpec::parse(const std::string& text) {
  // "uniform LO HI" or "point X"
  const auto sp1 = text.find(' ');
  const std::string head = text.substr(0, sp1);
  if (head == "point") {
    if (sp1 == std::string::npos) throw std::invalid_argument("point needs a value");
    return DistSpec::point(std::stod(text.substr(sp1 + 1)));
  }
  if (head == "uniform") {
    if (sp1 == std::string::npos) throw std::invalid_argument("uniform needs LO HI");
    const auto rest = text.substr(sp1 + 1);
    const auto sp2 = rest.find(' ');
    if (sp2 == std::string::npos) throw std::invalid_argument("uniform needs LO HI");
    return DistSpec::uniform(std::stod(rest.substr(0, sp2)), std::stod(rest.substr(sp2 + 1)));
  }
  throw std::invalid_argument("unknown distribution: " + head);
}

static double draw(const DistSpec& d, Rng& rng) {
  switch (d.kind) {
    case DistSpec::Kind::Point: return d.lo;
    case DistSpec::Kind::Uniform: return d.lo + (d.hi - d.lo) * rng.next_double();
  }
  throw std::logic_error("unknown distribution kind");
}

Instance generate_instance(const GenSpec& spec) {
  if (spec.n <= 0) throw std::invalid_argument("generator needs n >= 1");
  Instance inst;
  inst.n = spec.n;
  inst.k = spec.k;
  inst.T = spec.T;
  Rng vr = Rng::keyed(spec.seed, 1);
  Rng pr = Rng::keyed(spec.seed, 2);
  inst.values.reserve(static_cast<std::size_t>(spec.n));
  inst.probs.reserve(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    inst.values.push_back(draw(spec.value_dist, vr));
    double p = draw(spec.prob_dist, pr);
    p = std::min(1.0, std::max(0.0, p));
    inst.probs.push_back(p);
  }
  require_valid(inst);
  return inst;
}

}  // namespace hiring
