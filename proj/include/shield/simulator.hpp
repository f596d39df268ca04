// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "shield/rng.hpp"
#include "shield/types.hpp"

namespace shield::sim {

using core::AugmentedVotes;
using core::PolyParam;
using core::VoteMatrix;

/// Stream seed for (sample, trial). The circuit model derives its draws with
/// the same labels, which keeps the two implementations draw-for-draw
/// identical under a shared root seed.
inline std::uint64_t stream_seed(std::uint64_t root, std::uint64_t sample,
                                 std::uint64_t trial) {
  return rng::derive_stream(root, sample, trial);
}

/// Draws for every round of `poly`, in execution order (decreasing degree):
/// result[r] holds the p_r augmented vote indices of round r, each uniform
/// over [0, total). Exactly p_1 + ... + p_R engine calls in a fixed order.
std::vector<std::vector<std::int64_t>> draw_rounds(const PolyParam& poly,
                                                   std::int64_t total,
                                                   rng::Xoshiro256& engine);

/// One run of the selection protocol on pre-drawn indices. Rounds execute in
/// order; each multiplies its one-hot draws coordinate-wise over Z_2 and the
/// first non-null product wins through the gating arithmetic
///   res ^= (1 ^ found) & pi,  found = found ^ is ^ (found & is),
/// with is = XOR of pi's coordinates. No early exit: the control flow is the
/// same as the oblivious homomorphic evaluation. Returns kFailOutcome when
/// every round product was null.
int run_on_draws(const AugmentedVotes& votes,
                 const std::vector<std::vector<std::int64_t>>& rounds);

/// run_on_draws over draws consumed from `engine`.
int run_once(const AugmentedVotes& votes, const PolyParam& poly,
             rng::Xoshiro256& engine);

/// One protocol run for `sample` of `m` on the (sample, trial 0) stream.
int run_shield(const VoteMatrix& m, int sample, const PolyParam& poly,
               std::int64_t offset, std::uint64_t seed);

/// Monte-Carlo tally. frequency/std_error take an outcome index
/// (kFailOutcome or class); std_error is the plug-in binomial estimate
/// sqrt(phat (1 - phat) / trials).
struct Empirical {
  std::vector<std::uint64_t> class_counts;
  std::uint64_t fail_count = 0;
  std::uint64_t trials = 0;

  std::uint64_t count(int outcome) const;
  double frequency(int outcome) const;
  double std_error(int outcome) const;
};

/// `trials` independent runs on the (sample, trial t) streams, t = 0..trials-1.
/// Deterministic given (seed, sample).
Empirical monte_carlo(const AugmentedVotes& votes, const PolyParam& poly,
                      std::uint64_t trials, std::uint64_t seed,
                      std::uint64_t sample = 0);

}  // namespace shield::sim
