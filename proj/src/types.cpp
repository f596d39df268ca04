// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#include "shield/types.hpp"

#include <algorithm>
#include <numeric>

namespace shield::core {

VoteHistogram::VoteHistogram(std::vector<std::int64_t> counts,
                             std::int64_t offset)
    : counts_(std::move(counts)), offset_(offset) {
  if (counts_.size() < 2) {
    throw ValidationError("histogram needs at least 2 classes");
  }
  if (offset_ < 0) {
    throw ValidationError("offset must be nonnegative");
  }
  for (std::int64_t c : counts_) {
    if (c < 0) throw ValidationError("vote counts must be nonnegative");
  }
  real_total_ = std::accumulate(counts_.begin(), counts_.end(),
                                static_cast<std::int64_t>(0));
  if (real_total_ < 1) {
    throw ValidationError("histogram needs at least one real vote");
  }
}

Rational VoteHistogram::frequency(int k) const {
  return make_rational(count(k) + offset_, total());
}

std::vector<Rational> VoteHistogram::frequencies() const {
  std::vector<Rational> out;
  out.reserve(counts_.size());
  for (int k = 1; k <= num_classes(); ++k) out.push_back(frequency(k));
  return out;
}

VoteHistogram VoteHistogram::with_moved_vote(int from, int to) const {
  if (from == to) throw ValidationError("moved vote must change class");
  if (count(from) < 1) {
    throw ValidationError("no vote to move from class " + std::to_string(from));
  }
  std::vector<std::int64_t> moved = counts_;
  --moved[from - 1];
  ++moved[to - 1];
  return VoteHistogram(std::move(moved), offset_);
}

PolyParam::PolyParam(const std::map<int, int>& coeffs) : coeff_sum_(0) {
  for (const auto& [degree, coeff] : coeffs) {
    if (degree < 1) throw ValidationError("polynomial degrees start at 1");
    if (coeff < 0) throw ValidationError("coefficients must be nonnegative");
    if (coeff == 0) continue;
    coeffs_[degree] = coeff;
    coeff_sum_ += coeff;
  }
  if (coeffs_.empty()) {
    throw ValidationError("polynomial needs at least one nonzero coefficient");
  }
}

int PolyParam::coeff(int p) const {
  auto it = coeffs_.find(p);
  return it == coeffs_.end() ? 0 : it->second;
}

std::vector<int> PolyParam::rounds() const {
  std::vector<int> out;
  out.reserve(coeff_sum_);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    out.insert(out.end(), it->second, it->first);
  }
  return out;
}

int one_hot_class(const std::vector<int>& row) {
  int cls = 0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] == 0) continue;
    if (row[j] != 1 || cls != 0) {
      throw ValidationError("vote row is not one-hot");
    }
    cls = static_cast<int>(j) + 1;
  }
  if (cls == 0) throw ValidationError("vote row is not one-hot");
  return cls;
}

VoteMatrix::VoteMatrix(int num_classes, std::vector<std::vector<int>> votes)
    : num_classes_(num_classes), votes_(std::move(votes)) {
  if (num_classes_ < 2) throw ValidationError("need at least 2 classes");
  if (votes_.empty()) throw ValidationError("need at least one sample");
  num_teachers_ = static_cast<int>(votes_.front().size());
  if (num_teachers_ < 1) throw ValidationError("need at least one teacher");
  for (const auto& row : votes_) {
    if (static_cast<int>(row.size()) != num_teachers_) {
      throw ValidationError("samples disagree on the teacher set");
    }
    for (int v : row) {
      if (v < 1 || v > num_classes_) {
        throw ValidationError("vote class out of range");
      }
    }
  }
}

VoteMatrix VoteMatrix::from_one_hot(
    const std::vector<std::vector<std::vector<int>>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw ValidationError("need at least one sample and teacher");
  }
  const int num_classes = static_cast<int>(rows.front().front().size());
  std::vector<std::vector<int>> votes(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    votes[i].reserve(rows[i].size());
    for (const auto& row : rows[i]) {
      if (static_cast<int>(row.size()) != num_classes) {
        throw ValidationError("one-hot rows disagree on class count");
      }
      votes[i].push_back(one_hot_class(row));
    }
  }
  return VoteMatrix(num_classes, std::move(votes));
}

OutcomeDistribution::OutcomeDistribution(std::vector<Rational> probs,
                                         Rational fail)
    : probs_(std::move(probs)), fail_(std::move(fail)) {
  Rational sum = fail_;
  for (const Rational& p : probs_) {
    if (p < 0) throw ValidationError("negative probability");
    sum += p;
  }
  if (fail_ < 0) throw ValidationError("negative failure mass");
  if (sum != 1) throw ValidationError("probabilities must sum to 1");
}

const Rational& OutcomeDistribution::prob_of(int outcome) const {
  if (outcome == kFailOutcome) return fail_;
  return prob(outcome);
}

AugmentedVotes::AugmentedVotes(const VoteMatrix& votes, int sample,
                               std::int64_t offset)
    : votes_(&votes),
      sample_(sample),
      num_classes_(votes.num_classes()),
      real_total_(votes.num_teachers()),
      offset_(offset) {
  if (sample < 0 || sample >= votes.num_samples()) {
    throw ValidationError("sample index out of range");
  }
  if (offset < 0) throw ValidationError("offset must be nonnegative");
  total_ = real_total_ + offset_ * num_classes_;
}

AugmentedVotes::AugmentedVotes(const VoteHistogram& histogram)
    : num_classes_(histogram.num_classes()),
      real_total_(histogram.real_total()),
      offset_(histogram.offset()),
      total_(histogram.total()) {
  cumulative_.reserve(histogram.num_classes());
  std::int64_t running = 0;
  for (int k = 1; k <= histogram.num_classes(); ++k) {
    running += histogram.count(k);
    cumulative_.push_back(running);
  }
}

int AugmentedVotes::vote(std::int64_t idx) const {
  if (idx < 0 || idx >= total_) throw ValidationError("vote index out of range");
  if (idx >= real_total_) {
    return static_cast<int>((idx - real_total_) % num_classes_) + 1;
  }
  if (votes_ != nullptr) {
    return votes_->vote(sample_, static_cast<int>(idx));
  }
  const auto it =
      std::upper_bound(cumulative_.begin(), cumulative_.end(), idx);
  return static_cast<int>(it - cumulative_.begin()) + 1;
}

VoteHistogram histogram_from_votes(const VoteMatrix& votes, int sample,
                                   std::int64_t offset) {
  if (sample < 0 || sample >= votes.num_samples()) {
    throw ValidationError("sample index out of range");
  }
  std::vector<std::int64_t> counts(votes.num_classes(), 0);
  for (int t = 0; t < votes.num_teachers(); ++t) {
    ++counts[votes.vote(sample, t) - 1];
  }
  return VoteHistogram(std::move(counts), offset);
}

}  // namespace shield::core
