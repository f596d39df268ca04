// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace shield::rng {

/// splitmix64 step; used for seeding and stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256** by Blackman and Vigna. Deterministic across platforms,
/// cheap to fork into labeled streams.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform draw from [0, bound) via Lemire's multiply-shift with
  /// rejection; unbiased for any bound >= 1.
  std::uint64_t uniform_below(std::uint64_t bound) {
    std::uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = -bound % bound;
      while (low < threshold) {
        x = next();
        m = static_cast<__uint128_t>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  std::uint64_t s_[4];
};

/// Labeled substream seed. Two engines derived from the same root with
/// different (a, b) labels are independent for practical purposes; the same
/// labels always reproduce the same stream. The simulator and the circuit
/// model both key their per-sample draw streams this way, which is what
/// makes them bit-identical on shared seeds.
inline std::uint64_t derive_stream(std::uint64_t root, std::uint64_t a,
                                   std::uint64_t b) {
  std::uint64_t sm = root;
  std::uint64_t h = splitmix64(sm);
  sm = h ^ (a * 0x9e3779b97f4a7c15ULL + 0x7f4a7c159e3779b9ULL);
  h = splitmix64(sm);
  sm = h ^ (b * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL);
  return splitmix64(sm);
}

}  // namespace shield::rng
