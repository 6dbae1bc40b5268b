//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#ifndef FRAD_RNG_HPP
#define FRAD_RNG_HPP

#include <cmath>
#include <cstdint>

namespace frad {

/// Counter-based generator built on the SplitMix64 finalizer: the i-th
/// output is a pure function of (key, i), so a stream can be replayed or
/// split without touching global state. Streams are derived by hashing a
/// child identifier into the key (one stream per molecule per epoch), which
/// keeps parallel data loading reproducible regardless of scheduling.
///
/// Gaussian draws use Box-Muller on our own uniforms instead of
/// std::normal_distribution, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(finalize(seed ^ kGamma)) {}

  std::uint64_t next_u64() { return finalize(key_ + (counter_++) * kGamma); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  /// Standard normal via Box-Muller; the paired draw is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Derives an independent child stream; (a, b) identify the child, e.g.
  /// (molecule index, epoch).
  Rng split(std::uint64_t a, std::uint64_t b = 0) const {
    Rng child(0);
    child.key_ = finalize(key_ ^ finalize(a + 0x632be59bd9b4e019ULL) ^
                          finalize(b + 0x9e6c63d0a1b2c3f5ULL));
    return child;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace frad

#endif
