#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <string_view>

namespace procnash {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// FNV-1a over bytes; used for seed tags and content ids.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Child-seed split: h0 = mix(parent ^ gamma), h_{k+1} = mix(h_k ^ mix(x_k + gamma)).
// Every (parent, path) combination maps to an independent-looking key.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(parent ^ kGoldenGamma);
  for (const std::uint64_t x : path) h = mix64(h ^ mix64(x + kGoldenGamma));
  return h;
}

// Counter-based generator: draw k is mix64(key + (k + 1) * gamma). The k-th
// output depends only on (key, k), so regeneration from any point is exact.
// Distribution transforms below are fixed and platform-independent apart
// from libm in normal().
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    ++counter_;
    return mix64(key_ + counter_ * kGoldenGamma);
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  // Uniform on [0, bound) by rejection of the biased tail.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = max() - max() % bound;
    for (;;) {
      const std::uint64_t x = (*this)();
      if (x < limit) return x % bound;
    }
  }

  // Uniform integer on [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // 53-bit uniform on [0, 1).
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller, cosine branch only; consumes exactly two draws.
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  CounterRng split(std::uint64_t tag) const { return CounterRng(derive_seed(key_, {tag, counter_})); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace procnash
