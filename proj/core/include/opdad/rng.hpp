// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#ifndef OPDAD_RNG_HPP
#define OPDAD_RNG_HPP

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace opdad {

/// splitmix64 mixing step; used to derive independent per-trial seeds from a
/// master seed so that trials can be processed in any order.
inline std::uint64_t mix_seed(std::uint64_t state) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix_seed(mix_seed(master_seed) ^ mix_seed(index * 0x9e3779b97f4a7c15ULL + 1));
}

/// Seeded random source. One stream per trial / per thread; never shared.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  static RngStream derive(std::uint64_t master_seed, std::uint64_t index) {
    return RngStream(derive_seed(master_seed, index));
  }

  double gaussian() { return normal_(engine_); }

  /// Standard circularly-symmetric complex Gaussian, E|z|^2 = 1.
  std::complex<double> cgaussian() {
    return {normal_(engine_) / std::numbers::sqrt2, normal_(engine_) / std::numbers::sqrt2};
  }

  /// Uniform in [0, 1).
  double uniform() { return uniform_(engine_); }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace opdad

#endif  // OPDAD_RNG_HPP
