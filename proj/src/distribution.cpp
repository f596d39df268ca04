// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#include "shield/distribution.hpp"

#include <algorithm>

namespace shield::distribution {

OutcomeDistribution distribution_for_rounds(const VoteHistogram& h,
                                            std::span<const int> rounds) {
  const int num_classes = h.num_classes();
  const std::vector<Rational> freq = h.frequencies();

  // Walk the rounds backwards: after processing a suffix Q, probs holds
  // P[Q = k]. Prepending a round of degree p gives
  //   P[X^p + Q = k] = f_k^p + (1 - sum_j f_j^p) * P[Q = k],
  // i.e. the round either resolves now (all p draws agree on k) or falls
  // through to the suffix.
  std::vector<Rational> probs(num_classes, Rational(0));
  Rational fail(1);
  for (auto it = rounds.rbegin(); it != rounds.rend(); ++it) {
    const int degree = *it;
    if (degree < 1) throw core::ValidationError("round degree must be >= 1");
    Rational hit_mass(0);
    std::vector<Rational> hit(num_classes);
    for (int k = 0; k < num_classes; ++k) {
      hit[k] = rational_pow(freq[k], static_cast<unsigned long>(degree));
      hit_mass += hit[k];
    }
    const Rational fall = Rational(1) - hit_mass;
    for (int k = 0; k < num_classes; ++k) {
      probs[k] = hit[k] + fall * probs[k];
    }
    fail *= fall;
  }
  return OutcomeDistribution(std::move(probs), std::move(fail));
}

OutcomeDistribution output_distribution(const VoteHistogram& h,
                                        const PolyParam& poly) {
  const std::vector<int> rounds = poly.rounds();
  return distribution_for_rounds(h, rounds);
}

Rational gta(const VoteHistogram& h, const PolyParam& poly,
             bool dummy_weights) {
  const OutcomeDistribution dist = output_distribution(h, poly);
  Rational out(0);
  for (int k = 1; k <= h.num_classes(); ++k) {
    const Rational weight = dummy_weights
                                ? h.frequency(k)
                                : make_rational(h.count(k), h.real_total());
    out += weight * dist.prob(k);
  }
  return out;
}

Rational exact_argmax_accuracy(const VoteHistogram& h, const PolyParam& poly) {
  const OutcomeDistribution dist = output_distribution(h, poly);
  const std::int64_t top =
      *std::max_element(h.counts().begin(), h.counts().end());
  Rational out(0);
  for (int k = 1; k <= h.num_classes(); ++k) {
    if (h.count(k) == top) out += dist.prob(k);
  }
  return out;
}

MeanMetrics mean_metrics(const VoteMatrix& votes, const PolyParam& poly,
                         std::int64_t offset,
                         const std::vector<int>* labels, bool dummy_weights) {
  if (labels != nullptr &&
      static_cast<int>(labels->size()) != votes.num_samples()) {
    throw core::ValidationError("label count does not match sample count");
  }
  MeanMetrics out{Rational(0), Rational(0), std::nullopt};
  Rational correct(0);
  for (int i = 0; i < votes.num_samples(); ++i) {
    const VoteHistogram h = core::histogram_from_votes(votes, i, offset);
    out.mean_gta += gta(h, poly, dummy_weights);
    out.mean_exact_argmax += exact_argmax_accuracy(h, poly);
    if (labels != nullptr) {
      const int truth = (*labels)[i];
      if (truth < 1 || truth > votes.num_classes()) {
        throw core::ValidationError("label class out of range");
      }
      correct += output_distribution(h, poly).prob(truth);
    }
  }
  out.mean_gta /= votes.num_samples();
  out.mean_exact_argmax /= votes.num_samples();
  if (labels != nullptr) out.expected_correct = correct;
  return out;
}

}  // namespace shield::distribution
