#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hiring {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;
inline constexpr int kVirtualApp = -1;

// Default relative tolerance for inequality checks on expected rewards.
inline constexpr double kRelTol = 1e-9;

inline bool approx_le(double a, double b, double rel = kRelTol) {
  return a <= b + rel * (1.0 + std::max(std::abs(a), std::abs(b)));
}

inline bool approx_eq(double a, double b, double rel = kRelTol) {
  return std::abs(a - b) <= rel * (1.0 + std::max(std::abs(a), std::abs(b)));
}

// Set of available applicants. Bitmask semantics with capacity beyond 64
// applicants; one word covers every exact-oracle instance (n <= 20).
class AvailSet {
 public:
  AvailSet() = default;

  static AvailSet all(int n) {
    AvailSet s;
    s.words_.assign(static_cast<std::size_t>((n + 63) / 64), 0);
    for (int i = 0; i < n; ++i) s.set(i);
    return s;
  }

  static AvailSet none(int n) {
    AvailSet s;
    s.words_.assign(static_cast<std::size_t>((n + 63) / 64), 0);
    return s;
  }

  bool test(int i) const {
    const std::size_t w = static_cast<std::size_t>(i) / 64;
    if (w >= words_.size()) return false;
    return (words_[w] >> (i % 64)) & 1u;
  }

  void set(int i) {
    const std::size_t w = static_cast<std::size_t>(i) / 64;
    if (w >= words_.size()) words_.resize(w + 1, 0);
    words_[w] |= (std::uint64_t{1} << (i % 64));
  }

  void reset(int i) {
    const std::size_t w = static_cast<std::size_t>(i) / 64;
    if (w < words_.size()) words_[w] &= ~(std::uint64_t{1} << (i % 64));
  }

  AvailSet without(int i) const {
    AvailSet s = *this;
    s.reset(i);
    return s;
  }

  int count() const {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }

  bool is_subset_of(const AvailSet& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      const std::uint64_t ow = i < other.words_.size() ? other.words_[i] : 0;
      if (words_[i] & ~ow) return false;
    }
    return true;
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = std::countr_zero(bits);
        fn(static_cast<int>(w * 64) + b);
        bits &= bits - 1;
      }
    }
  }

  bool operator==(const AvailSet& other) const {
    const std::size_t n = std::max(words_.size(), other.words_.size());
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t a = i < words_.size() ? words_[i] : 0;
      const std::uint64_t b = i < other.words_.size() ? other.words_[i] : 0;
      if (a != b) return false;
    }
    return true;
  }

  std::uint64_t hash() const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (auto w : words_) {
      // trailing zero words must not change the hash
      h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }

  std::string to_hex() const;
  static AvailSet from_hex(const std::string& hex, int n);

 private:
  std::vector<std::uint64_t> words_;
};

// splitmix64: the seeded counter-based pseudo-random source used everywhere
// randomness is needed. Streams are keyed, so independent consumers (e.g.
// Monte Carlo trials) draw from disjoint deterministic sequences.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Derives the stream for a keyed substream (trial index, applicant id, ...).
  static Rng keyed(std::uint64_t seed, std::uint64_t key) {
    std::uint64_t s = seed + 0x9e3779b97f4a7c15ull * (key + 1);
    splitmix64(s);
    return Rng(s);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  double next_double() {  // in [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform integer in [0, bound)
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

 private:
  std::uint64_t state_;
};

}  // namespace hiring
