// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "shield/types.hpp"

namespace shield::circuit {

using core::PolyParam;
using core::VoteMatrix;

/// Slot layout of one batched ciphertext: `rounds` regions of
/// `capacity * k_pad` slots, each sample owning a k_pad-aligned block per
/// region. slot(round r, sample i, class k) = r*capacity*k_pad + i*k_pad
/// + (k-1); class slots beyond K and trailing slots beyond the last region
/// are permanently zero.
struct Layout {
  std::int64_t n_slots = 0;
  int num_classes = 0;
  int k_pad = 0;
  int rounds = 0;
  std::int64_t capacity = 0;

  bool operator==(const Layout&) const = default;
};

int next_pow2(int v);

/// Samples per ciphertext: floor(n_slots / (k_pad * rounds)).
std::int64_t capacity(std::int64_t n_slots, int k_pad, int rounds);

/// Validates and derives the layout. Requires rounds >= 1, capacity >= 1,
/// and n_slots divisible by k_pad (block structure must survive cyclic
/// rotation; any power-of-two slot count qualifies).
Layout make_layout(std::int64_t n_slots, int num_classes, int rounds);

struct CostCounters {
  std::int64_t ct_ct_mults = 0;
  std::int64_t ct_pt_mults = 0;
  std::int64_t additions = 0;
  std::int64_t rotations = 0;

  bool operator==(const CostCounters&) const = default;
};

using SlotVector = std::vector<std::uint8_t>;

/// Ciphertext model: a Z_2 slot vector plus its multiplicative depth. Only
/// ciphertext-ciphertext products deepen a state; additions, rotations and
/// plaintext multiplications leave depth unchanged (they consume no
/// relinearization level in the modeled scheme).
struct PackedState {
  SlotVector slots;
  int depth = 0;
};

/// Slot-wise ops over Z_2, tallied on `c`. multiply: AND, depth
/// 1 + max(depths). multiply_plain: AND with a plaintext vector.
/// add/add_plain: XOR. rotate: result[s] = input[(s + amount) mod n_slots],
/// amount may be negative.
PackedState multiply(const PackedState& a, const PackedState& b,
                     CostCounters& c);
PackedState multiply_plain(const PackedState& a, const SlotVector& plain,
                           CostCounters& c);
PackedState add(const PackedState& a, const PackedState& b, CostCounters& c);
PackedState add_plain(const PackedState& a, const SlotVector& plain,
                      CostCounters& c);
PackedState rotate(const PackedState& a, std::int64_t amount, CostCounters& c);

/// Balanced product of all states: pairwise rounds until one remains.
/// count-1 ct-ct mults; for equal input depths the depth increase is exactly
/// ceil(log2(count)). Throws on an empty list.
PackedState product_tree(std::vector<PackedState> states, CostCounters& c);

/// Per-block Z_2 sum, broadcast: log2(k_pad) forward rotate-add steps put
/// each block's parity in its first slot, a plaintext mask (1,0,...,0) per
/// block isolates it, log2(k_pad) reverse steps re-populate the block.
/// Exactly 2*log2(k_pad) rotations, 2*log2(k_pad) additions, 1 ct-pt mult.
/// Note this is parity, not a count; callers that need "is the block
/// non-null" must guarantee at most one set slot per block.
PackedState slot_sum(const PackedState& state, int k_pad, CostCounters& c);

/// One draw position, encoded: per real teacher the post-selection state
/// z_t (the teacher's one-hot votes on the sample blocks that drew it, zero
/// elsewhere) and the plaintext mask m_t (0 on drawn blocks, 1 elsewhere),
/// so z_t + m_t is all ones wherever the teacher was not drawn and a
/// product over teachers is inert there. Dummy votes are server-known, so
/// samples drawing an augmented index >= n contribute through one shared
/// plaintext vector instead of a ciphertext; in packed layouts the same
/// vector carries the all-ones fill for rounds shorter than this position.
struct DrawEncoding {
  std::vector<PackedState> states;
  std::vector<SlotVector> masks;
  SlotVector dummy_plain;
};

/// Encodes one draw position. selection[i] is the augmented vote index drawn
/// by sample i; an entry maps into `region` r of the layout when round r has
/// this position (fill_regions lists rounds that do not and get all-ones).
/// selection is indexed per (region, sample): selection[r * samples + i],
/// with entries < 0 meaning "no draw at this position" for that region.
DrawEncoding pack_votes(const VoteMatrix& m,
                        const std::vector<std::int64_t>& selection,
                        std::int64_t offset, const Layout& layout);

/// XOR-aggregate of one position: exactly n ct-pt mults (the per-teacher
/// selection products) and n additions (n-1 state XORs plus the plaintext
/// dummy/fill vector). Result depth 0; per drawn block it equals the full
/// masked product over teachers.
PackedState aggregate_draw(const DrawEncoding& enc, CostCounters& c);

struct CostReport {
  Layout layout;
  std::int64_t samples = 0;
  int rounds = 0;
  bool packed = false;
  int depth = 0;
  CostCounters counters;

  bool operator==(const CostReport&) const = default;
};

struct CircuitResult {
  std::vector<int> outcomes;
  CostReport report;
};

/// Full oblivious pipeline on every sample of `m`: per round, aggregate the
/// degree-many draw positions, multiply them with a product tree, take the
/// broadcast block sum, and fold into the result through the
/// first-non-null gating (res += (1+found)*pi, found = found+is+found*is).
/// layout.rounds == 1 runs rounds sequentially; layout.rounds ==
/// poly.num_rounds() packs all rounds into one state and extracts per-round
/// blocks for the gating chain. Draws come from the (sample, trial 0)
/// streams of `seed`, so outcomes are identical to the plaintext simulator.
/// Throws when samples exceed layout capacity or the layout mismatches.
CircuitResult run_circuit(const VoteMatrix& m, const PolyParam& poly,
                          std::int64_t offset, std::uint64_t seed,
                          const Layout& layout);

/// Predicted CostReport of run_circuit with these shapes; exact, not an
/// estimate: counters and depth match the executed pipeline field for field.
CostReport estimate_cost(const PolyParam& poly, std::int64_t samples,
                         std::int64_t teachers, const Layout& layout);

}  // namespace shield::circuit
