// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "shield/types.hpp"

namespace shield::distribution {

using core::OutcomeDistribution;
using core::PolyParam;
using core::VoteHistogram;
using core::VoteMatrix;

/// Exact output distribution of the probabilistic argmax on `h` with
/// parameterization `poly`. The recursion over rounds (decreasing degree):
/// a round of degree p ends on class k with probability f_k^p, and with
/// probability 1 - sum_j f_j^p falls through to the remaining rounds.
/// The failure mass is the product of the per-round fall-through factors.
OutcomeDistribution output_distribution(const VoteHistogram& h,
                                        const PolyParam& poly);

/// Same recursion on an explicit round list (degrees, evaluated first to
/// last). Exposed so tests can check round-order properties directly.
OutcomeDistribution distribution_for_rounds(const VoteHistogram& h,
                                            std::span<const int> rounds);

/// Ground truth accuracy sum_k w_k p_k. Weights w_k default to the real-vote
/// frequencies n_k / n_real (dummies are protocol machinery, not evidence);
/// set `dummy_weights` to weight by the offset-augmented frequencies instead.
/// p_k always comes from the offset-augmented distribution. The failure mass
/// never counts as correct.
Rational gta(const VoteHistogram& h, const PolyParam& poly,
             bool dummy_weights = false);

/// Probability that the output is an argmax of the real vote counts. Ties
/// are all "the" argmax, so their probabilities sum.
Rational exact_argmax_accuracy(const VoteHistogram& h, const PolyParam& poly);

struct MeanMetrics {
  Rational mean_gta;
  Rational mean_exact_argmax;
  /// Expected number of samples labeled with their ground truth class,
  /// sum over samples of p_{truth}; present only when labels were given.
  std::optional<Rational> expected_correct;
};

/// Arithmetic means over all samples. `labels`, when given, must have one
/// 1..K class per sample.
MeanMetrics mean_metrics(const VoteMatrix& votes, const PolyParam& poly,
                         std::int64_t offset,
                         const std::vector<int>* labels = nullptr,
                         bool dummy_weights = false);

}  // namespace shield::distribution
