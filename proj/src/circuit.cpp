// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#include "shield/circuit.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "shield/rng.hpp"
#include "shield/simulator.hpp"

namespace shield::circuit {

namespace {

int int_log2(int v) {
  int out = 0;
  while ((1 << out) < v) ++out;
  return out;
}

// Smallest d with 2^d >= count: depth of a balanced product tree.
int ceil_log2(std::int64_t count) {
  int out = 0;
  while ((std::int64_t{1} << out) < count) ++out;
  return out;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw core::ValidationError("slot vector sizes differ");
}

}  // namespace

int next_pow2(int v) {
  if (v < 1) throw core::ValidationError("need a positive value");
  int p = 1;
  while (p < v) p <<= 1;
  return p;
}

std::int64_t capacity(std::int64_t n_slots, int k_pad, int rounds) {
  if (rounds < 1) throw core::ValidationError("rounds must be >= 1");
  if (n_slots < 1) throw core::ValidationError("need a positive slot count");
  if (k_pad < 1 || (k_pad & (k_pad - 1)) != 0) {
    throw core::ValidationError("k_pad must be a power of two");
  }
  return n_slots / (static_cast<std::int64_t>(k_pad) * rounds);
}

Layout make_layout(std::int64_t n_slots, int num_classes, int rounds) {
  if (num_classes < 2) throw core::ValidationError("need at least 2 classes");
  Layout out;
  out.n_slots = n_slots;
  out.num_classes = num_classes;
  out.k_pad = next_pow2(num_classes);
  out.rounds = rounds;
  out.capacity = capacity(n_slots, out.k_pad, rounds);
  if (out.capacity < 1) {
    throw core::ValidationError("layout does not fit a single sample");
  }
  if (n_slots % out.k_pad != 0) {
    throw core::ValidationError("slot count must be a multiple of k_pad");
  }
  return out;
}

PackedState multiply(const PackedState& a, const PackedState& b,
                     CostCounters& c) {
  check_sizes(a.slots.size(), b.slots.size());
  ++c.ct_ct_mults;
  PackedState out;
  out.slots.resize(a.slots.size());
  for (std::size_t s = 0; s < out.slots.size(); ++s) {
    out.slots[s] = a.slots[s] & b.slots[s];
  }
  out.depth = 1 + std::max(a.depth, b.depth);
  return out;
}

PackedState multiply_plain(const PackedState& a, const SlotVector& plain,
                           CostCounters& c) {
  check_sizes(a.slots.size(), plain.size());
  ++c.ct_pt_mults;
  PackedState out;
  out.slots.resize(a.slots.size());
  for (std::size_t s = 0; s < out.slots.size(); ++s) {
    out.slots[s] = a.slots[s] & plain[s];
  }
  out.depth = a.depth;
  return out;
}

PackedState add(const PackedState& a, const PackedState& b, CostCounters& c) {
  check_sizes(a.slots.size(), b.slots.size());
  ++c.additions;
  PackedState out;
  out.slots.resize(a.slots.size());
  for (std::size_t s = 0; s < out.slots.size(); ++s) {
    out.slots[s] = a.slots[s] ^ b.slots[s];
  }
  out.depth = std::max(a.depth, b.depth);
  return out;
}

PackedState add_plain(const PackedState& a, const SlotVector& plain,
                      CostCounters& c) {
  check_sizes(a.slots.size(), plain.size());
  ++c.additions;
  PackedState out;
  out.slots.resize(a.slots.size());
  for (std::size_t s = 0; s < out.slots.size(); ++s) {
    out.slots[s] = a.slots[s] ^ plain[s];
  }
  out.depth = a.depth;
  return out;
}

PackedState rotate(const PackedState& a, std::int64_t amount,
                   CostCounters& c) {
  ++c.rotations;
  const auto n = static_cast<std::int64_t>(a.slots.size());
  PackedState out;
  out.slots.resize(a.slots.size());
  const std::int64_t shift = ((amount % n) + n) % n;
  for (std::int64_t s = 0; s < n; ++s) {
    out.slots[s] = a.slots[(s + shift) % n];
  }
  out.depth = a.depth;
  return out;
}

PackedState product_tree(std::vector<PackedState> states, CostCounters& c) {
  if (states.empty()) throw core::ValidationError("empty product");
  while (states.size() > 1) {
    std::vector<PackedState> next;
    next.reserve((states.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < states.size(); i += 2) {
      next.push_back(multiply(states[i], states[i + 1], c));
    }
    if (states.size() % 2 != 0) next.push_back(std::move(states.back()));
    states = std::move(next);
  }
  return std::move(states.front());
}

PackedState slot_sum(const PackedState& state, int k_pad, CostCounters& c) {
  if (k_pad < 2 || (k_pad & (k_pad - 1)) != 0) {
    throw core::ValidationError("k_pad must be a power of two >= 2");
  }
  if (state.slots.size() % static_cast<std::size_t>(k_pad) != 0) {
    throw core::ValidationError("slot count must be a multiple of k_pad");
  }
  // Forward doubling leaves each block's sum in its first slot (other slots
  // pick up cross-block spill), the mask keeps only those, and reverse
  // doubling re-populates the block. Increasing step order keeps the
  // wraparound taps on still-zero slots, so blocks never contaminate each
  // other.
  PackedState acc = state;
  for (int step = 1; step < k_pad; step <<= 1) {
    acc = add(acc, rotate(acc, step, c), c);
  }
  SlotVector mask(state.slots.size(), 0);
  for (std::size_t s = 0; s < mask.size(); s += k_pad) mask[s] = 1;
  acc = multiply_plain(acc, mask, c);
  for (int step = 1; step < k_pad; step <<= 1) {
    acc = add(acc, rotate(acc, -step, c), c);
  }
  return acc;
}

DrawEncoding pack_votes(const VoteMatrix& m,
                        const std::vector<std::int64_t>& selection,
                        std::int64_t offset, const Layout& layout) {
  const int num_samples = m.num_samples();
  const int num_teachers = m.num_teachers();
  if (layout.num_classes != m.num_classes()) {
    throw core::ValidationError("layout class count mismatch");
  }
  if (offset < 0) throw core::ValidationError("offset must be nonnegative");
  if (selection.size() !=
      static_cast<std::size_t>(layout.rounds) * num_samples) {
    throw core::ValidationError("selection size mismatch");
  }
  if (num_samples > layout.capacity) {
    throw core::ValidationError("layout capacity exceeded");
  }
  const std::int64_t total =
      num_teachers + offset * static_cast<std::int64_t>(m.num_classes());

  DrawEncoding enc;
  enc.dummy_plain.assign(layout.n_slots, 0);
  enc.states.reserve(num_teachers);
  enc.masks.reserve(num_teachers);
  for (int t = 0; t < num_teachers; ++t) {
    enc.states.push_back(
        PackedState{SlotVector(layout.n_slots, 0), 0});
    enc.masks.emplace_back(layout.n_slots, 1);
  }

  for (int r = 0; r < layout.rounds; ++r) {
    for (int i = 0; i < num_samples; ++i) {
      const std::int64_t sel =
          selection[static_cast<std::size_t>(r) * num_samples + i];
      const std::int64_t base =
          (static_cast<std::int64_t>(r) * layout.capacity + i) * layout.k_pad;
      if (sel < 0) {
        // Round r has no draw at this position; ones keep the block inert
        // in the product tree.
        std::fill_n(enc.dummy_plain.begin() + base, layout.k_pad, 1);
      } else if (sel < num_teachers) {
        const int cls = m.vote(i, static_cast<int>(sel));
        enc.states[sel].slots[base + cls - 1] = 1;
        std::fill_n(enc.masks[sel].begin() + base, layout.k_pad, 0);
      } else if (sel < total) {
        const int cls =
            static_cast<int>((sel - num_teachers) % m.num_classes()) + 1;
        enc.dummy_plain[base + cls - 1] = 1;
      } else {
        throw core::ValidationError("draw index out of range");
      }
    }
  }
  return enc;
}

PackedState aggregate_draw(const DrawEncoding& enc, CostCounters& c) {
  if (enc.states.empty()) throw core::ValidationError("no teacher states");
  PackedState acc;
  for (std::size_t t = 0; t < enc.states.size(); ++t) {
    // The selection product z_t * (1 + m_t); states are stored
    // post-selection so the value is unchanged, the tally is not.
    SlotVector indicator(enc.masks[t].size());
    for (std::size_t s = 0; s < indicator.size(); ++s) {
      indicator[s] = enc.masks[t][s] ^ 1;
    }
    PackedState w = multiply_plain(enc.states[t], indicator, c);
    acc = (t == 0) ? std::move(w) : add(acc, w, c);
  }
  return add_plain(acc, enc.dummy_plain, c);
}

namespace {

// Parity over a block reads as "non-null" only for one-hot-or-null blocks;
// a violation here is a pipeline bug, not bad user input.
void check_blocks_one_hot(const PackedState& state, int k_pad) {
  for (std::size_t base = 0; base < state.slots.size();
       base += static_cast<std::size_t>(k_pad)) {
    int ones = 0;
    for (int j = 0; j < k_pad; ++j) ones += state.slots[base + j];
    if (ones > 1) {
      throw std::logic_error("round product block is not one-hot");
    }
  }
}

struct Gating {
  PackedState res;
  PackedState found;
  SlotVector ones;
  CostCounters* counters;

  explicit Gating(std::int64_t n_slots, CostCounters* c)
      : res{SlotVector(n_slots, 0), 0},
        found{SlotVector(n_slots, 0), 0},
        ones(n_slots, 1),
        counters(c) {}

  // res += (1 + found) * pi; found = found + is + found * is.
  void fold(const PackedState& pi, const PackedState& is) {
    PackedState not_found = add_plain(found, ones, *counters);
    res = add(res, multiply(not_found, pi, *counters), *counters);
    PackedState found_and_is = multiply(found, is, *counters);
    found = add(add(found, is, *counters), found_and_is, *counters);
  }
};

}  // namespace

CircuitResult run_circuit(const VoteMatrix& m, const PolyParam& poly,
                          std::int64_t offset, std::uint64_t seed,
                          const Layout& layout) {
  const int num_samples = m.num_samples();
  const int num_rounds = poly.num_rounds();
  if (layout.num_classes != m.num_classes()) {
    throw core::ValidationError("layout class count mismatch");
  }
  if (layout.rounds != 1 && layout.rounds != num_rounds) {
    throw core::ValidationError(
        "layout must pack one round or all rounds of the parameterization");
  }
  if (num_samples > layout.capacity) {
    throw core::ValidationError("layout capacity exceeded");
  }
  if (offset < 0) throw core::ValidationError("offset must be nonnegative");

  const std::vector<int> degrees = poly.rounds();
  const std::int64_t total =
      m.num_teachers() + offset * static_cast<std::int64_t>(m.num_classes());

  // Identical draw streams to the plaintext simulator: per sample, trial 0,
  // consumed round-major.
  std::vector<std::vector<std::vector<std::int64_t>>> draws(num_samples);
  for (int i = 0; i < num_samples; ++i) {
    rng::Xoshiro256 engine(
        sim::stream_seed(seed, static_cast<std::uint64_t>(i), 0));
    draws[i] = sim::draw_rounds(poly, total, engine);
  }

  CostCounters counters;
  Gating gate(layout.n_slots, &counters);
  const bool packed = layout.rounds > 1;

  if (!packed) {
    for (int r = 0; r < num_rounds; ++r) {
      std::vector<PackedState> draw_states;
      draw_states.reserve(degrees[r]);
      for (int pos = 0; pos < degrees[r]; ++pos) {
        std::vector<std::int64_t> selection(num_samples);
        for (int i = 0; i < num_samples; ++i) selection[i] = draws[i][r][pos];
        draw_states.push_back(
            aggregate_draw(pack_votes(m, selection, offset, layout), counters));
      }
      PackedState pi = product_tree(std::move(draw_states), counters);
      check_blocks_one_hot(pi, layout.k_pad);
      PackedState is = slot_sum(pi, layout.k_pad, counters);
      gate.fold(pi, is);
    }
  } else {
    const int max_degree = degrees.front();
    std::vector<PackedState> draw_states;
    draw_states.reserve(max_degree);
    for (int pos = 0; pos < max_degree; ++pos) {
      std::vector<std::int64_t> selection(
          static_cast<std::size_t>(num_rounds) * num_samples, -1);
      for (int r = 0; r < num_rounds; ++r) {
        if (pos >= degrees[r]) continue;
        for (int i = 0; i < num_samples; ++i) {
          selection[static_cast<std::size_t>(r) * num_samples + i] =
              draws[i][r][pos];
        }
      }
      draw_states.push_back(
          aggregate_draw(pack_votes(m, selection, offset, layout), counters));
    }
    PackedState pi_all = product_tree(std::move(draw_states), counters);
    check_blocks_one_hot(pi_all, layout.k_pad);
    PackedState is_all = slot_sum(pi_all, layout.k_pad, counters);

    const std::int64_t region = layout.capacity * layout.k_pad;
    for (int r = 0; r < num_rounds; ++r) {
      SlotVector region_mask(layout.n_slots, 0);
      std::fill_n(region_mask.begin() + r * region, region, 1);
      PackedState pi = multiply_plain(pi_all, region_mask, counters);
      PackedState is = multiply_plain(is_all, region_mask, counters);
      if (r > 0) {
        pi = rotate(pi, r * region, counters);
        is = rotate(is, r * region, counters);
      }
      gate.fold(pi, is);
    }
  }

  CircuitResult out;
  out.outcomes.resize(num_samples, core::kFailOutcome);
  for (int i = 0; i < num_samples; ++i) {
    const std::int64_t base = static_cast<std::int64_t>(i) * layout.k_pad;
    int cls = core::kFailOutcome;
    for (int k = 0; k < m.num_classes(); ++k) {
      if (!gate.res.slots[base + k]) continue;
      if (cls != core::kFailOutcome) {
        throw std::logic_error("result block is not one-hot");
      }
      cls = k + 1;
    }
    out.outcomes[i] = cls;
  }
  out.report.layout = layout;
  out.report.samples = num_samples;
  out.report.rounds = num_rounds;
  out.report.packed = packed;
  out.report.depth = std::max(gate.res.depth, gate.found.depth);
  out.report.counters = counters;
  return out;
}

CostReport estimate_cost(const PolyParam& poly, std::int64_t samples,
                         std::int64_t teachers, const Layout& layout) {
  const int num_rounds = poly.num_rounds();
  if (layout.rounds != 1 && layout.rounds != num_rounds) {
    throw core::ValidationError(
        "layout must pack one round or all rounds of the parameterization");
  }
  if (samples < 1 || samples > layout.capacity) {
    throw core::ValidationError("sample count outside layout capacity");
  }
  if (teachers < 1) throw core::ValidationError("need at least one teacher");

  const std::vector<int> degrees = poly.rounds();
  const std::int64_t sum_p =
      std::accumulate(degrees.begin(), degrees.end(), std::int64_t{0});
  const std::int64_t r = num_rounds;
  const int log2k = int_log2(layout.k_pad);

  CostReport rep;
  rep.layout = layout;
  rep.samples = samples;
  rep.rounds = num_rounds;
  rep.packed = layout.rounds > 1;
  rep.depth = num_rounds + ceil_log2(degrees.front());
  if (!rep.packed) {
    rep.counters.ct_pt_mults = teachers * sum_p + r;
    rep.counters.ct_ct_mults = (sum_p - r) + 2 * r;
    rep.counters.additions = teachers * sum_p + 2 * log2k * r + 4 * r;
    rep.counters.rotations = 2 * log2k * r;
  } else {
    const std::int64_t max_p = degrees.front();
    rep.counters.ct_pt_mults = teachers * max_p + 1 + 2 * r;
    rep.counters.ct_ct_mults = (max_p - 1) + 2 * r;
    rep.counters.additions = teachers * max_p + 2 * log2k + 4 * r;
    rep.counters.rotations = 2 * log2k + 2 * (r - 1);
  }
  return rep;
}

}  // namespace shield::circuit
