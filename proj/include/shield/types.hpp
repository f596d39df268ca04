// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "shield/rational.hpp"

namespace shield::core {

/// Input text could not be parsed. `offset` is the byte position of the
/// offending character.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// A domain invariant was violated (bad votes, bad histogram, bad layout...).
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Outcome index convention: classes are 1..K, 0 is the failure outcome
/// (the null vector).
inline constexpr int kFailOutcome = 0;

/// Per-class vote counts for one sample, plus the offset (dummy one-hot
/// votes added to every class). Immutable after construction.
class VoteHistogram {
 public:
  VoteHistogram(std::vector<std::int64_t> counts, std::int64_t offset);

  int num_classes() const { return static_cast<int>(counts_.size()); }
  std::int64_t count(int k) const { return counts_.at(k - 1); }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  std::int64_t offset() const { return offset_; }

  /// Real votes only.
  std::int64_t real_total() const { return real_total_; }
  /// Real votes plus offset dummies, i.e. the size of the augmented vote list.
  std::int64_t total() const { return real_total_ + offset_ * num_classes(); }

  /// (n_k + offset) / total, exact.
  Rational frequency(int k) const;
  std::vector<Rational> frequencies() const;

  /// Histogram with one real vote moved from class `from` to class `to`;
  /// offset unchanged. Requires count(from) >= 1 and from != to.
  VoteHistogram with_moved_vote(int from, int to) const;

  bool operator==(const VoteHistogram& other) const {
    return counts_ == other.counts_ && offset_ == other.offset_;
  }

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t offset_;
  std::int64_t real_total_;
};

/// Polynomial parameterization sum(a_p X^p): a_p rounds of degree p, executed
/// in decreasing-degree order. Stored canonically as degree -> coefficient
/// with only positive coefficients.
class PolyParam {
 public:
  /// Entries with zero coefficient are dropped; negative coefficients or
  /// degrees < 1 are rejected, as is an all-zero polynomial.
  explicit PolyParam(const std::map<int, int>& coeffs);

  int degree() const { return coeffs_.rbegin()->first; }
  /// a = sum of coefficients = number of rounds.
  int coeff_sum() const { return coeff_sum_; }
  int coeff(int p) const;
  const std::map<int, int>& coeffs() const { return coeffs_; }

  /// Degrees in decreasing order, each repeated a_p times.
  std::vector<int> rounds() const;
  int num_rounds() const { return coeff_sum_; }
  /// a_1 >= 1 guarantees the null vector can never be the output.
  bool never_fails() const { return coeff(1) >= 1; }

  bool operator==(const PolyParam& other) const { return coeffs_ == other.coeffs_; }
  bool operator<(const PolyParam& other) const { return coeffs_ < other.coeffs_; }

 private:
  std::map<int, int> coeffs_;
  int coeff_sum_;
};

/// One-hot votes of n teachers over a list of samples. Internally stores the
/// voted class per (sample, teacher); one-hot rows are validated at ingestion.
class VoteMatrix {
 public:
  /// votes[sample][teacher] = class in 1..K. All samples must have the same
  /// number of teachers.
  VoteMatrix(int num_classes, std::vector<std::vector<int>> votes);

  /// Builds from raw one-hot rows; rejects rows with zero or multiple ones.
  static VoteMatrix from_one_hot(
      const std::vector<std::vector<std::vector<int>>>& rows);

  int num_classes() const { return num_classes_; }
  int num_teachers() const { return num_teachers_; }
  int num_samples() const { return static_cast<int>(votes_.size()); }
  int vote(int sample, int teacher) const { return votes_[sample][teacher]; }

 private:
  int num_classes_;
  int num_teachers_;
  std::vector<std::vector<int>> votes_;
};

/// Decodes a one-hot row into its 1-based class; throws ValidationError on
/// zero or multiple ones.
int one_hot_class(const std::vector<int>& row);

/// Exact output distribution of one invocation: class probabilities plus the
/// failure mass (null-vector output).
class OutcomeDistribution {
 public:
  OutcomeDistribution(std::vector<Rational> probs, Rational fail);

  int num_classes() const { return static_cast<int>(probs_.size()); }
  const Rational& prob(int k) const { return probs_.at(k - 1); }
  const std::vector<Rational>& probs() const { return probs_; }
  const Rational& fail() const { return fail_; }

  /// Probability of `outcome` (kFailOutcome or a class).
  const Rational& prob_of(int outcome) const;

  bool operator==(const OutcomeDistribution& other) const {
    return probs_ == other.probs_ && fail_ == other.fail_;
  }

 private:
  std::vector<Rational> probs_;
  Rational fail_;
};

/// Uniform-draw view of one sample's votes augmented with the offset dummies:
/// indices [0, n) are the real teachers, index n + j is the dummy voting for
/// class (j mod K) + 1.
class AugmentedVotes {
 public:
  AugmentedVotes(const VoteMatrix& votes, int sample, std::int64_t offset);
  /// Histogram-backed view (counts expanded in class order, then dummies).
  explicit AugmentedVotes(const VoteHistogram& histogram);

  std::int64_t total() const { return total_; }
  int num_classes() const { return num_classes_; }
  /// Class voted by augmented index `idx`.
  int vote(std::int64_t idx) const;

 private:
  const VoteMatrix* votes_ = nullptr;
  int sample_ = 0;
  std::vector<std::int64_t> cumulative_;  // histogram mode
  int num_classes_;
  std::int64_t real_total_;
  std::int64_t offset_;
  std::int64_t total_;
};

/// Counts one sample's votes into a histogram with the given offset.
VoteHistogram histogram_from_votes(const VoteMatrix& votes, int sample,
                                   std::int64_t offset);

}  // namespace shield::core
