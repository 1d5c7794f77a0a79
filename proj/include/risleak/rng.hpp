// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random substreams. One master seed fans out to named
// streams (test points, fault indices, fault states, per-point NLoS draws,
// randomization) so that parallel workers own disjoint generators and a rerun
// with the same seed reproduces every draw bit for bit, regardless of how the
// work was scheduled. Variate generation (uniform doubles, Box-Muller
// normals) is implemented on top of the raw engine output so results do not
// depend on the standard library's distribution internals.

#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace risleak::rng {

// Stream identifiers; combined with trial/point indices to derive substreams.
enum class StreamTag : std::uint64_t {
  TestPoints = 1,
  FaultIndices = 2,
  FaultStates = 3,
  Nlos = 4,
  Randomization = 5,
  Heatmap = 6,
  Generic = 7,
};

// SplitMix64 finalizer; good avalanche for seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Stream {
 public:
  Stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(master ^ 0x5851f42d4c957f2dull);
    for (std::uint64_t w : path) s = mix64(s ^ mix64(w));
    engine_.seed(s);
  }

  Stream(std::uint64_t master, StreamTag tag, std::uint64_t a = 0,
         std::uint64_t b = 0)
      : Stream(master, {static_cast<std::uint64_t>(tag), a, b}) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t bound = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= bound);
    return x % n;
  }

  // Standard normal via Box-Muller; second variate cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Circularly-symmetric complex normal CN(0, 1).
  std::complex<double> cnormal() {
    const double re = normal();
    const double im = normal();
    return {re * 0.7071067811865476, im * 0.7071067811865476};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace risleak::rng
