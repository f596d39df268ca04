// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#include "shield/simulator.hpp"

#include <cmath>

namespace shield::sim {

std::vector<std::vector<std::int64_t>> draw_rounds(const PolyParam& poly,
                                                   std::int64_t total,
                                                   rng::Xoshiro256& engine) {
  if (total < 1) throw core::ValidationError("no votes to draw from");
  std::vector<std::vector<std::int64_t>> out;
  out.reserve(poly.num_rounds());
  for (int degree : poly.rounds()) {
    std::vector<std::int64_t> draws(degree);
    for (auto& d : draws) {
      d = static_cast<std::int64_t>(
          engine.uniform_below(static_cast<std::uint64_t>(total)));
    }
    out.push_back(std::move(draws));
  }
  return out;
}

int run_on_draws(const AugmentedVotes& votes,
                 const std::vector<std::vector<std::int64_t>>& rounds) {
  const int num_classes = votes.num_classes();
  std::vector<std::uint8_t> res(num_classes, 0);
  std::uint8_t found = 0;
  for (const auto& draws : rounds) {
    // Coordinate-wise product of the drawn one-hot vectors: survives only
    // where every draw voted, i.e. a one-hot of the agreed class or null.
    std::vector<std::uint8_t> pi(num_classes, 1);
    for (std::int64_t idx : draws) {
      const int cls = votes.vote(idx);
      for (int k = 0; k < num_classes; ++k) {
        pi[k] &= static_cast<std::uint8_t>(k + 1 == cls);
      }
    }
    std::uint8_t is = 0;
    for (int k = 0; k < num_classes; ++k) is ^= pi[k];
    for (int k = 0; k < num_classes; ++k) {
      res[k] ^= static_cast<std::uint8_t>((1 ^ found) & pi[k]);
    }
    found = found ^ is ^ (found & is);
  }
  for (int k = 0; k < num_classes; ++k) {
    if (res[k]) return k + 1;
  }
  return core::kFailOutcome;
}

int run_once(const AugmentedVotes& votes, const PolyParam& poly,
             rng::Xoshiro256& engine) {
  return run_on_draws(votes, draw_rounds(poly, votes.total(), engine));
}

int run_shield(const VoteMatrix& m, int sample, const PolyParam& poly,
               std::int64_t offset, std::uint64_t seed) {
  const AugmentedVotes votes(m, sample, offset);
  rng::Xoshiro256 engine(
      stream_seed(seed, static_cast<std::uint64_t>(sample), 0));
  return run_once(votes, poly, engine);
}

std::uint64_t Empirical::count(int outcome) const {
  if (outcome == core::kFailOutcome) return fail_count;
  return class_counts.at(static_cast<std::size_t>(outcome) - 1);
}

double Empirical::frequency(int outcome) const {
  return static_cast<double>(count(outcome)) / static_cast<double>(trials);
}

double Empirical::std_error(int outcome) const {
  const double p = frequency(outcome);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

Empirical monte_carlo(const AugmentedVotes& votes, const PolyParam& poly,
                      std::uint64_t trials, std::uint64_t seed,
                      std::uint64_t sample) {
  if (trials < 1) throw core::ValidationError("trials must be >= 1");
  Empirical out;
  out.class_counts.assign(votes.num_classes(), 0);
  out.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) {
    rng::Xoshiro256 engine(stream_seed(seed, sample, t));
    const int outcome = run_once(votes, poly, engine);
    if (outcome == core::kFailOutcome) {
      ++out.fail_count;
    } else {
      ++out.class_counts[outcome - 1];
    }
  }
  return out;
}

}  // namespace shield::sim
