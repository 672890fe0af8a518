#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fplay {

// splitmix64: a counter-based generator (output is a mix of an additive
// counter), so streams can be seeded per (seed, run-index) and are
// reproducible independently of execution order.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static SplitMix64 for_run(std::uint64_t seed, std::uint64_t run_index) {
    return SplitMix64(mix(seed + 0x9E3779B97F4A7C15ull * (run_index + 1)));
  }

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., bound-1}.
  int next_index(int bound) { return static_cast<int>(next() % static_cast<std::uint64_t>(bound)); }

  // Standard normal via Box-Muller (fully specified, platform independent).
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Fisher-Yates permutation of {0..n-1}.
  template <typename Vec>
  void shuffle_identity(Vec& v, int n) {
    v.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
      const int k = next_index(i + 1);
      std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(k)]);
    }
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fplay
