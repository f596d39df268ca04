// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#include "shield/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "shield/distribution.hpp"

namespace shield::explorer {

namespace {

void enumerate_rec(int degree, int max_degree, int budget, bool require_a1,
                   std::map<int, int>& coeffs,
                   std::vector<PolyParam>& out) {
  if (degree > max_degree) {
    if (!coeffs.empty()) out.emplace_back(coeffs);
    return;
  }
  const int lo = (degree == 1 && require_a1) ? 1 : 0;
  const int hi = (degree == 1 && require_a1) ? 1 : budget;
  for (int a = lo; a <= hi && a <= budget; ++a) {
    if (a > 0) coeffs[degree] = a;
    enumerate_rec(degree + 1, max_degree, budget - a, require_a1, coeffs, out);
    coeffs.erase(degree);
  }
}

bool dominates(const ParetoPoint& a, const ParetoPoint& b) {
  return a.epsilon <= b.epsilon && a.gta >= b.gta &&
         (a.epsilon < b.epsilon || a.gta > b.gta);
}

}  // namespace

std::vector<PolyParam> enumerate_polys(int max_degree, int max_coeff_sum,
                                       bool require_a1) {
  if (max_degree < 1) throw core::ValidationError("max_degree must be >= 1");
  if (max_coeff_sum < 1) {
    throw core::ValidationError("max_coeff_sum must be >= 1");
  }
  std::vector<PolyParam> out;
  std::map<int, int> coeffs;
  enumerate_rec(1, max_degree, max_coeff_sum, require_a1, coeffs, out);
  return out;
}

std::vector<ParetoPoint> pareto_front(const std::vector<ParetoPoint>& points) {
  std::vector<ParetoPoint> finite;
  for (const auto& p : points) {
    if (std::isfinite(p.epsilon)) finite.push_back(p);
  }
  std::vector<ParetoPoint> front;
  for (std::size_t i = 0; i < finite.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < finite.size() && !dominated; ++j) {
      dominated = j != i && dominates(finite[j], finite[i]);
    }
    if (!dominated) front.push_back(finite[i]);
  }
  std::stable_sort(front.begin(), front.end(),
                   [](const ParetoPoint& a, const ParetoPoint& b) {
                     if (a.epsilon != b.epsilon) return a.epsilon < b.epsilon;
                     return a.gta > b.gta;
                   });
  return front;
}

SpaceReport evaluate_space(const VoteMatrix& votes,
                           const SpaceOptions& options) {
  if (options.queries < 1) throw core::ValidationError("queries must be >= 1");
  if (!(options.delta > 0.0 && options.delta < 1.0)) {
    throw core::ValidationError("delta must lie in (0, 1)");
  }
  SpaceReport report;
  report.options = options;

  std::vector<core::VoteHistogram> hists;
  hists.reserve(votes.num_samples());
  for (int i = 0; i < votes.num_samples(); ++i) {
    hists.push_back(core::histogram_from_votes(votes, i, options.offset));
  }

  const auto polys = enumerate_polys(options.max_degree, options.max_coeff_sum,
                                     options.require_a1);
  report.rows.reserve(polys.size());
  for (const auto& poly : polys) {
    SpaceRow row{poly};
    Rational gta_sum(0);
    Rational fail_sum(0);
    // Accounting runs on the floating-point alpha path: q repeats of a query
    // scale its alphas by q and samples add per order, so no giant exact MGF
    // powers are formed while sweeping thousands of polynomials.
    std::vector<double> composed_alphas(options.max_order, 0.0);
    double eps_single_sum = 0.0;
    bool finite = true;
    for (const auto& h : hists) {
      gta_sum += distribution::gta(h, poly);
      fail_sum += distribution::output_distribution(h, poly).fail();
      const auto alphas =
          privacy::query_alphas(h, poly, options.max_order, options.mode);
      for (int l = 0; l < options.max_order; ++l) {
        composed_alphas[l] += alphas[l] * options.queries;
      }
      const double eps1 =
          privacy::solve_epsilon_from_alphas(alphas, options.delta);
      if (std::isfinite(eps1)) {
        eps_single_sum += eps1;
      } else {
        finite = false;
      }
    }
    const auto samples = static_cast<std::int64_t>(hists.size());
    row.mean_gta = rational_to_double(gta_sum / samples);
    row.mean_fail = rational_to_double(fail_sum / samples);
    row.eps_composed =
        privacy::solve_epsilon_from_alphas(composed_alphas, options.delta);
    row.eps_mean_scaled =
        finite ? (eps_single_sum / static_cast<double>(samples)) *
                     options.queries
               : std::numeric_limits<double>::infinity();
    row.finite = finite && std::isfinite(row.eps_composed);

    const auto layout = circuit::make_layout(
        options.n_slots, votes.num_classes(), poly.num_rounds());
    const auto cost =
        circuit::estimate_cost(poly, 1, votes.num_teachers(), layout);
    row.depth = cost.depth;
    row.ct_ct_mults = cost.counters.ct_ct_mults;
    row.rotations = cost.counters.rotations;
    row.capacity = layout.capacity;
    report.rows.push_back(std::move(row));
  }

  // Front over (eps_mean_scaled, mean_gta), computed on indices so rows can
  // be flagged in place.
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    if (std::isfinite(report.rows[i].eps_mean_scaled)) {
      candidates.push_back(i);
    } else {
      ++report.infinite_count;
    }
  }
  auto point = [&](std::size_t i) {
    return ParetoPoint{report.rows[i].poly, report.rows[i].eps_mean_scaled,
                       report.rows[i].mean_gta};
  };
  for (std::size_t i : candidates) {
    bool dominated = false;
    for (std::size_t j : candidates) {
      if (j != i && dominates(point(j), point(i))) {
        dominated = true;
        break;
      }
    }
    if (!dominated) {
      report.front.push_back(i);
      report.rows[i].on_front = true;
    }
  }
  std::stable_sort(report.front.begin(), report.front.end(),
                   [&](std::size_t a, std::size_t b) {
                     const auto& ra = report.rows[a];
                     const auto& rb = report.rows[b];
                     if (ra.eps_mean_scaled != rb.eps_mean_scaled) {
                       return ra.eps_mean_scaled < rb.eps_mean_scaled;
                     }
                     return ra.mean_gta > rb.mean_gta;
                   });
  return report;
}

}  // namespace shield::explorer
