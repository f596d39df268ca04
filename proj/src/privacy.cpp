// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#include "shield/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shield/distribution.hpp"

namespace shield::privacy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_outcome(const OutcomeDistribution& d, int outcome) {
  if (outcome < core::kFailOutcome || outcome > d.num_classes()) {
    throw core::ValidationError("outcome out of range");
  }
}

// Accumulates max-over-neighbors MGF values for orders 1..L of one ordered
// pair (d, d_prime). `best[l-1]` nullopt means +inf at that order.
void fold_pair_moments(const OutcomeDistribution& d,
                       const OutcomeDistribution& d_prime,
                       std::vector<std::optional<Rational>>& best,
                       std::vector<bool>& seen) {
  const int orders = static_cast<int>(best.size());
  // term_o starts at P_d(o) * ratio_o and picks up one ratio factor per
  // order, so order l contributes sum_o P_d(o)^{l+1} / P_d'(o)^l.
  std::vector<Rational> ratio;
  std::vector<Rational> term;
  for (int o = core::kFailOutcome; o <= d.num_classes(); ++o) {
    const Rational& p = d.prob_of(o);
    const Rational& q = d_prime.prob_of(o);
    if (p == 0) continue;
    if (q == 0) {
      for (int l = 0; l < orders; ++l) best[l] = std::nullopt;
      std::fill(seen.begin(), seen.end(), true);
      return;
    }
    ratio.push_back(p / q);
    term.push_back(p * ratio.back());
  }
  for (int l = 0; l < orders; ++l) {
    Rational sum(0);
    for (std::size_t i = 0; i < term.size(); ++i) {
      sum += term[i];
      term[i] *= ratio[i];
    }
    if (!seen[l]) {
      best[l] = sum;
      seen[l] = true;
    } else if (best[l].has_value() && sum > *best[l]) {
      best[l] = sum;
    }
  }
}

// Log-space counterpart of fold_pair_moments. best[l-1] tracks the running
// max of alpha(l) across pairs; a support violation pins every order at +inf.
void fold_pair_alphas(const OutcomeDistribution& d,
                      const OutcomeDistribution& d_prime,
                      std::vector<double>& best) {
  std::vector<double> log_p;
  std::vector<double> log_r;
  for (int o = core::kFailOutcome; o <= d.num_classes(); ++o) {
    const Rational& p = d.prob_of(o);
    const Rational& q = d_prime.prob_of(o);
    if (p == 0) continue;
    if (q == 0) {
      std::fill(best.begin(), best.end(), kInf);
      return;
    }
    log_p.push_back(rational_log(p));
    log_r.push_back(log_p.back() - rational_log(q));
  }
  for (std::size_t i = 0; i < best.size(); ++i) {
    const double l = static_cast<double>(i + 1);
    double peak = -kInf;
    for (std::size_t o = 0; o < log_p.size(); ++o) {
      peak = std::max(peak, log_p[o] + l * log_r[o]);
    }
    double sum = 0.0;
    for (std::size_t o = 0; o < log_p.size(); ++o) {
      sum += std::exp(log_p[o] + l * log_r[o] - peak);
    }
    best[i] = std::max(best[i], peak + std::log(sum));
  }
}

}  // namespace

std::vector<VoteHistogram> adjacent_histograms(const VoteHistogram& h) {
  std::vector<VoteHistogram> out;
  for (int from = 1; from <= h.num_classes(); ++from) {
    if (h.count(from) < 1) continue;
    for (int to = 1; to <= h.num_classes(); ++to) {
      if (to == from) continue;
      out.push_back(h.with_moved_vote(from, to));
    }
  }
  return out;
}

double privacy_loss(const OutcomeDistribution& d,
                    const OutcomeDistribution& d_prime, int outcome) {
  check_outcome(d, outcome);
  check_outcome(d_prime, outcome);
  const Rational& p = d.prob_of(outcome);
  const Rational& q = d_prime.prob_of(outcome);
  if (p == 0 && q == 0) return 0.0;
  if (q == 0) return kInf;
  if (p == 0) return -kInf;
  return rational_log(p / q);
}

std::optional<Rational> moment_mgf(const OutcomeDistribution& d,
                                   const OutcomeDistribution& d_prime,
                                   int l) {
  if (l < 1) throw core::ValidationError("moment order must be >= 1");
  Rational sum(0);
  for (int o = core::kFailOutcome; o <= d.num_classes(); ++o) {
    const Rational& p = d.prob_of(o);
    const Rational& q = d_prime.prob_of(o);
    if (p == 0) continue;
    if (q == 0) return std::nullopt;
    sum += rational_pow(p, static_cast<unsigned long>(l) + 1) /
           rational_pow(q, static_cast<unsigned long>(l));
  }
  return sum;
}

double moment(const OutcomeDistribution& d, const OutcomeDistribution& d_prime,
              int l) {
  const auto mgf = moment_mgf(d, d_prime, l);
  return mgf.has_value() ? rational_log(*mgf) : kInf;
}

double QueryMoments::alpha(int l) const {
  const auto& value = mgf.at(static_cast<std::size_t>(l) - 1);
  return value.has_value() ? rational_log(*value) : kInf;
}

QueryMoments query_moments(const VoteHistogram& h, const PolyParam& poly,
                           int max_order, AdjacencyMode mode) {
  if (max_order < 1) throw core::ValidationError("max_order must be >= 1");
  const OutcomeDistribution base = distribution::output_distribution(h, poly);
  QueryMoments out;
  out.mgf.assign(max_order, std::nullopt);
  std::vector<bool> seen(max_order, false);
  for (const VoteHistogram& neighbor : adjacent_histograms(h)) {
    const OutcomeDistribution other =
        distribution::output_distribution(neighbor, poly);
    fold_pair_moments(base, other, out.mgf, seen);
    if (mode == AdjacencyMode::kSymmetric) {
      fold_pair_moments(other, base, out.mgf, seen);
    }
  }
  return out;
}

double query_alpha(const VoteHistogram& h, const PolyParam& poly, int l,
                   AdjacencyMode mode) {
  return query_moments(h, poly, l, mode).alpha(l);
}

std::vector<double> query_alphas(const VoteHistogram& h, const PolyParam& poly,
                                 int max_order, AdjacencyMode mode) {
  if (max_order < 1) throw core::ValidationError("max_order must be >= 1");
  const OutcomeDistribution base = distribution::output_distribution(h, poly);
  std::vector<double> best(static_cast<std::size_t>(max_order), -kInf);
  for (const VoteHistogram& neighbor : adjacent_histograms(h)) {
    const OutcomeDistribution other =
        distribution::output_distribution(neighbor, poly);
    fold_pair_alphas(base, other, best);
    if (mode == AdjacencyMode::kSymmetric) {
      fold_pair_alphas(other, base, best);
    }
  }
  return best;
}

MomentsLedger::MomentsLedger(int max_order) {
  if (max_order < 1) throw core::ValidationError("max_order must be >= 1");
  mgf_.assign(max_order, Rational(1));
}

void MomentsLedger::add_query(const QueryMoments& q, std::uint64_t repeat) {
  if (q.max_order() < max_order()) {
    throw core::ValidationError("query tabulates fewer orders than the ledger");
  }
  for (int l = 1; l <= max_order(); ++l) {
    auto& slot = mgf_[l - 1];
    if (!slot.has_value()) continue;
    const auto& value = q.mgf[l - 1];
    if (!value.has_value()) {
      slot = std::nullopt;
    } else {
      slot = *slot * rational_pow(*value, repeat);
    }
  }
  query_count_ += repeat;
}

double MomentsLedger::alpha(int l) const {
  const auto& value = mgf(l);
  return value.has_value() ? rational_log(*value) : kInf;
}

bool MomentsLedger::finite() const {
  return std::all_of(mgf_.begin(), mgf_.end(),
                     [](const auto& v) { return v.has_value(); });
}

double compose_and_bound(const MomentsLedger& ledger, double epsilon) {
  double best = kInf;
  for (int l = 1; l <= ledger.max_order(); ++l) {
    const double a = ledger.alpha(l);
    if (!std::isfinite(a)) continue;
    best = std::min(best, std::exp(a - l * epsilon));
  }
  return best;
}

double solve_epsilon(const MomentsLedger& ledger, double delta) {
  if (!(delta > 0)) throw core::ValidationError("delta must be positive");
  const double log_delta = std::log(delta);
  double best = kInf;
  for (int l = 1; l <= ledger.max_order(); ++l) {
    const double a = ledger.alpha(l);
    if (!std::isfinite(a)) continue;
    best = std::min(best, (a - log_delta) / l);
  }
  return std::isfinite(best) ? std::max(0.0, best) : kInf;
}

double solve_epsilon_from_alphas(const std::vector<double>& alphas,
                                 double delta) {
  if (!(delta > 0)) throw core::ValidationError("delta must be positive");
  const double log_delta = std::log(delta);
  double best = kInf;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!std::isfinite(alphas[i])) continue;
    best = std::min(best,
                    (alphas[i] - log_delta) / static_cast<double>(i + 1));
  }
  return std::isfinite(best) ? std::max(0.0, best) : kInf;
}

ExactArgmaxPrivacy exact_argmax_privacy(const VoteHistogram& h) {
  std::int64_t top = 0;
  std::int64_t second = 0;
  for (std::int64_t c : h.counts()) {
    if (c >= top) {
      second = top;
      top = c;
    } else if (c > second) {
      second = c;
    }
  }
  const std::int64_t margin = top - second;
  ExactArgmaxPrivacy out;
  out.highly_dominant = margin >= 2;
  out.tie = margin == 0;
  out.epsilon = out.highly_dominant ? 0.0 : kInf;
  return out;
}

}  // namespace shield::privacy
