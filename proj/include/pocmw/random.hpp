#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace pocmw {

// Counter-based deterministic random stream (SplitMix64 output function).
// A draw is a pure function of (seed, counter), so streams are reproducible,
// serializable, and cheap to fork into disjoint substreams.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), counter_(0) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  // Independent stream for a labeled subtask (trial index, chain id, ...).
  RandomStream derive(std::uint64_t label) const {
    std::uint64_t key = mix(seed_ ^ mix(label + 0x6a09e667f3bcc909ull));
    return RandomStream(key);
  }

  std::uint64_t next_u64() {
    ++counter_;
    return mix(seed_ + counter_ * 0x9e3779b97f4a7c15ull);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform_in(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller (cosine branch only, fully deterministic).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  std::vector<double> normal_vector(int d) {
    std::vector<double> z(static_cast<std::size_t>(d));
    for (auto& v : z) v = normal();
    return z;
  }

  // Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace pocmw
