// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "shield/circuit.hpp"
#include "shield/privacy.hpp"
#include "shield/types.hpp"

namespace shield::explorer {

using core::PolyParam;
using core::VoteMatrix;

/// All parameterizations with max degree <= max_degree, coefficient sum <=
/// max_coeff_sum and at least one nonzero coefficient; require_a1 keeps only
/// those with a_1 = 1 (the no-failure family). Deterministic order:
/// lexicographic in (a_1, ..., a_D).
std::vector<PolyParam> enumerate_polys(int max_degree, int max_coeff_sum,
                                       bool require_a1);

struct ParetoPoint {
  PolyParam poly;
  double epsilon;
  double gta;
};

/// Non-dominated subset under (minimize epsilon, maximize gta), ordered by
/// epsilon ascending then gta descending. Duplicates of a front point are
/// kept. Points with non-finite epsilon are dropped; callers report them
/// separately.
std::vector<ParetoPoint> pareto_front(const std::vector<ParetoPoint>& points);

struct SpaceOptions {
  int max_degree = 4;
  int max_coeff_sum = 6;
  bool require_a1 = false;
  std::int64_t offset = 1;
  double delta = privacy::kDefaultDelta;
  int queries = 100;
  int max_order = privacy::kDefaultMaxOrder;
  privacy::AdjacencyMode mode = privacy::AdjacencyMode::kCanonical;
  std::int64_t n_slots = 32768;
};

struct SpaceRow {
  PolyParam poly;
  double mean_gta = 0.0;
  double mean_fail = 0.0;
  /// Moments composed over every (sample, query) pair, then the tail bound.
  double eps_composed = 0.0;
  /// Mean over samples of the single-query epsilon, scaled by the query
  /// count. Comparable with published per-query figures; weaker accounting.
  double eps_mean_scaled = 0.0;
  int depth = 0;
  std::int64_t ct_ct_mults = 0;
  std::int64_t rotations = 0;
  std::int64_t capacity = 0;
  bool finite = false;
  bool on_front = false;
};

struct SpaceReport {
  SpaceOptions options;
  std::vector<SpaceRow> rows;          // enumeration order
  std::vector<std::size_t> front;      // indices into rows, epsilon ascending
  std::size_t infinite_count = 0;      // rows excluded from the front
};

/// Evaluates every polynomial in the constraint space on `votes`:
/// distribution metrics, DP accounting at (delta, queries), and circuit cost
/// predictions for the round-packed layout of n_slots (cost counters are
/// per ciphertext and independent of the sample count). The front is
/// computed on (eps_mean_scaled, mean_gta). Deterministic and independent of
/// evaluation order.
SpaceReport evaluate_space(const VoteMatrix& votes, const SpaceOptions& options);

}  // namespace shield::explorer
