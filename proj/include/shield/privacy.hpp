// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "shield/types.hpp"

namespace shield::privacy {

using core::OutcomeDistribution;
using core::PolyParam;
using core::VoteHistogram;

inline constexpr int kDefaultMaxOrder = 32;
inline constexpr double kDefaultDelta = 1e-5;

/// Neighbors of `h` under the one-moved-vote adjacency: one real vote moved
/// from class k1 (count >= 1) to class k2 != k1, offset unchanged. Size is
/// |{k1 : n_k1 >= 1}| * (K - 1).
std::vector<VoteHistogram> adjacent_histograms(const VoteHistogram& h);

/// Privacy loss at `outcome`: log(P_d(o) / P_d'(o)). +inf when P_d'(o) = 0 <
/// P_d(o), -inf with roles swapped, 0 when both are zero (the outcome is
/// unreachable under either database).
double privacy_loss(const OutcomeDistribution& d,
                    const OutcomeDistribution& d_prime, int outcome);

/// Exact moment generating function of the privacy loss at order l:
/// E_{o~d}[(P_d(o)/P_d'(o))^l] = sum_o P_d(o)^{l+1} / P_d'(o)^l over the
/// full outcome set [K] u {fail}. nullopt encodes +inf (some outcome has
/// P_d(o) > 0 = P_d'(o)). Requires l >= 1.
std::optional<Rational> moment_mgf(const OutcomeDistribution& d,
                                   const OutcomeDistribution& d_prime, int l);

/// log of moment_mgf; +inf on support violation.
double moment(const OutcomeDistribution& d, const OutcomeDistribution& d_prime,
              int l);

/// Neighbor maximization direction. Canonical fixes d = observed histogram
/// and maximizes over neighbors d' only; symmetric also maximizes over the
/// swapped direction for a guarantee that covers both adjacency orientations.
enum class AdjacencyMode { kCanonical, kSymmetric };

/// Per-order MGF values of one query, maximized over the adjacency set.
/// Index l-1 holds order l; nullopt is +inf.
struct QueryMoments {
  std::vector<std::optional<Rational>> mgf;

  int max_order() const { return static_cast<int>(mgf.size()); }
  double alpha(int l) const;
};

/// Moments of answering one query on `h` with parameterization `poly`, at
/// every order 1..max_order. The maximum over neighbors is taken per order
/// on the exact MGF values (log is monotone).
QueryMoments query_moments(const VoteHistogram& h, const PolyParam& poly,
                           int max_order,
                           AdjacencyMode mode = AdjacencyMode::kCanonical);

/// max over neighbors of moment(dist(h), dist(h'), l).
double query_alpha(const VoteHistogram& h, const PolyParam& poly, int l,
                   AdjacencyMode mode = AdjacencyMode::kCanonical);

/// alpha(l) for l = 1..max_order (index l-1) in floating point. Support
/// violations are still decided on the exact probabilities (+inf entries);
/// magnitudes are folded in log space, so outcomes whose likelihood ratio
/// overflows a double at high orders stay representable. Parameter sweeps
/// that score thousands of polynomials use this; the rational path above
/// stays exact.
std::vector<double> query_alphas(const VoteHistogram& h, const PolyParam& poly,
                                 int max_order,
                                 AdjacencyMode mode = AdjacencyMode::kCanonical);

/// Composition ledger: per-order MGFs multiply across queries, so the
/// composed log-moments are exact sums. Orders are 1..max_order.
class MomentsLedger {
 public:
  explicit MomentsLedger(int max_order);

  /// Composes `repeat` copies of a query (MGF raised to the repeat power,
  /// still exact).
  void add_query(const QueryMoments& q, std::uint64_t repeat = 1);

  int max_order() const { return static_cast<int>(mgf_.size()); }
  std::uint64_t query_count() const { return query_count_; }
  /// Composed MGF at order l; nullopt = +inf.
  const std::optional<Rational>& mgf(int l) const { return mgf_.at(l - 1); }
  /// Composed alpha(l) = log mgf(l); +inf when any composed query was +inf.
  double alpha(int l) const;
  /// True when every tabulated order is finite.
  bool finite() const;

 private:
  std::vector<std::optional<Rational>> mgf_;
  std::uint64_t query_count_ = 0;
};

/// Tail bound: delta = min over tabulated l of exp(alpha(l) - l * epsilon).
double compose_and_bound(const MomentsLedger& ledger, double epsilon);

/// Smallest epsilon with compose_and_bound(ledger, eps) <= delta on the same
/// l-grid: max(0, min_l (alpha(l) - ln delta) / l). +inf when every order is
/// +inf. The result is grid-dependent; a finer grid can only lower it.
double solve_epsilon(const MomentsLedger& ledger, double delta);

/// Same solve on precomputed alphas (index l-1 holds order l). Composition
/// is linear here: q repeats of one query scale its alphas by q, and
/// independent queries add per order.
double solve_epsilon_from_alphas(const std::vector<double>& alphas,
                                 double delta);

/// Data-dependent cost of releasing the exact argmax of the real votes.
/// With a top margin >= 2 no adjacent histogram changes the argmax and the
/// cost is zero; otherwise some neighbor makes the observed output
/// impossible under one database and the loss is unbounded.
struct ExactArgmaxPrivacy {
  double epsilon;
  bool highly_dominant;
  bool tie;
};

ExactArgmaxPrivacy exact_argmax_privacy(const VoteHistogram& h);

}  // namespace shield::privacy
