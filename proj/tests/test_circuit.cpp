// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <vector>

#include "doctest.h"
#include "shield/circuit.hpp"
#include "shield/poly_text.hpp"
#include "shield/rng.hpp"
#include "shield/simulator.hpp"

using namespace shield;
using circuit::CostCounters;
using circuit::Layout;
using circuit::PackedState;
using circuit::SlotVector;
using core::parse_poly;
using core::VoteMatrix;

TEST_CASE("slot operations: values, depth, tallies") {
  CostCounters c;
  PackedState a{{1, 0, 1, 1}, 0};
  PackedState b{{1, 1, 0, 1}, 2};

  auto prod = circuit::multiply(a, b, c);
  CHECK(prod.slots == SlotVector{1, 0, 0, 1});
  CHECK(prod.depth == 3);  // 1 + max(0, 2)
  CHECK(c.ct_ct_mults == 1);

  auto sum = circuit::add(a, b, c);
  CHECK(sum.slots == SlotVector{0, 1, 1, 0});
  CHECK(sum.depth == 2);  // max of the inputs, no level consumed
  CHECK(c.additions == 1);

  auto masked = circuit::multiply_plain(b, SlotVector{0, 1, 1, 0}, c);
  CHECK(masked.slots == SlotVector{0, 1, 0, 0});
  CHECK(masked.depth == 2);
  CHECK(c.ct_pt_mults == 1);

  auto mixed = circuit::add_plain(a, SlotVector{1, 1, 1, 1}, c);
  CHECK(mixed.slots == SlotVector{0, 1, 0, 0});
  CHECK(c.additions == 2);

  // result[s] = input[(s + amount) mod n]
  auto fwd = circuit::rotate(PackedState{{1, 2, 3, 4}, 1}, 1, c);
  CHECK(fwd.slots == SlotVector{2, 3, 4, 1});
  auto back = circuit::rotate(PackedState{{1, 2, 3, 4}, 1}, -1, c);
  CHECK(back.slots == SlotVector{4, 1, 2, 3});
  CHECK(back.depth == 1);
  CHECK(c.rotations == 2);
}

TEST_CASE("product tree: multiplication count and depth growth") {
  auto make = [](int n) {
    std::vector<PackedState> states;
    for (int i = 0; i < n; ++i) states.push_back(PackedState{{1, 1}, 0});
    return states;
  };

  CostCounters c1;
  auto single = circuit::product_tree(make(1), c1);
  CHECK(c1.ct_ct_mults == 0);
  CHECK(single.depth == 0);

  CostCounters c4;
  auto four = circuit::product_tree(make(4), c4);
  CHECK(c4.ct_ct_mults == 3);
  CHECK(four.depth == 2);

  CostCounters c5;
  auto five = circuit::product_tree(make(5), c5);
  CHECK(c5.ct_ct_mults == 4);
  CHECK(five.depth == 3);  // ceil(log2 5)

  // depth follows ceil(log2 p) across the whole small range
  for (int p = 1; p <= 16; ++p) {
    CostCounters c;
    int depth = circuit::product_tree(make(p), c).depth;
    int expected = 0;
    while ((1 << expected) < p) ++expected;
    CHECK(depth == expected);
    CHECK(c.ct_ct_mults == p - 1);
  }

  CostCounters cermpty;
  CHECK_THROWS_AS(circuit::product_tree({}, cermpty), core::ValidationError);
}

TEST_CASE("block sums broadcast the per-block parity") {
  CostCounters c;
  PackedState in{{0, 1, 0, 0, /**/ 1, 0, 1, 0}, 1};
  auto out = circuit::slot_sum(in, 4, c);
  // block 0 holds one set slot, block 1 holds two (parity 0)
  CHECK(out.slots == SlotVector{1, 1, 1, 1, 0, 0, 0, 0});
  CHECK(out.depth == 1);
  CHECK(c.rotations == 4);  // 2 * log2(4)
  CHECK(c.additions == 4);
  CHECK(c.ct_pt_mults == 1);

  // K = 10 pads to 16: 8 rotations
  CostCounters c10;
  PackedState one_block{SlotVector(16, 0), 0};
  one_block.slots[9] = 1;
  auto spread = circuit::slot_sum(one_block, 16, c10);
  CHECK(spread.slots == SlotVector(16, 1));
  CHECK(c10.rotations == 8);
}

TEST_CASE("layout arithmetic") {
  CHECK(circuit::next_pow2(2) == 2);
  CHECK(circuit::next_pow2(3) == 4);
  CHECK(circuit::next_pow2(10) == 16);
  CHECK(circuit::next_pow2(16) == 16);
  CHECK(circuit::next_pow2(17) == 32);

  CHECK(circuit::capacity(32768, 16, 6) == 341);
  CHECK(circuit::capacity(32768, 16, 1) == 2048);
  CHECK(circuit::capacity(8, 2, 2) == 2);

  Layout l = circuit::make_layout(32768, 10, 6);
  CHECK(l.k_pad == 16);
  CHECK(l.capacity == 341);

  CHECK_THROWS_AS(circuit::make_layout(32768, 10, 0), core::ValidationError);
  CHECK_THROWS_AS(circuit::make_layout(8, 10, 1), core::ValidationError);   // capacity 0
  CHECK_THROWS_AS(circuit::make_layout(24, 10, 1), core::ValidationError);  // 24 % 16 != 0
}

TEST_CASE("packing one draw: states, masks, dummy vector") {
  // one teacher, four samples; samples 0 and 2 draw the teacher, sample 1
  // draws the class-1 dummy, sample 3 the class-2 dummy (offset 1, total 3)
  VoteMatrix m(2, {{1}, {2}, {1}, {2}});
  Layout layout = circuit::make_layout(8, 2, 1);
  REQUIRE(layout.capacity == 4);
  auto enc = circuit::pack_votes(m, {0, 1, 0, 2}, 1, layout);

  REQUIRE(enc.states.size() == 1);
  REQUIRE(enc.masks.size() == 1);
  CHECK(enc.masks[0] == SlotVector{0, 0, 1, 1, 0, 0, 1, 1});
  CHECK(enc.states[0].slots == SlotVector{1, 0, 0, 0, 1, 0, 0, 0});
  CHECK(enc.states[0].depth == 0);
  CHECK(enc.dummy_plain == SlotVector{0, 0, 1, 0, 0, 0, 0, 1});

  CostCounters c;
  auto agg = circuit::aggregate_draw(enc, c);
  CHECK(agg.slots == SlotVector{1, 0, 1, 0, 1, 0, 0, 1});
  CHECK(agg.depth == 0);
  CHECK(c.ct_pt_mults == 1);  // one per real teacher
  CHECK(c.additions == 1);

  CHECK_THROWS_AS(circuit::pack_votes(m, {0, 1, 0}, 1, layout),
                  core::ValidationError);  // selection shape mismatch
  CHECK_THROWS_AS(circuit::pack_votes(m, {0, 1, 0, 3}, 1, layout),
                  core::ValidationError);  // index beyond the augmented list
}

TEST_CASE("masked aggregate equals the literal product over teachers") {
  // z_t + m_t is all ones wherever teacher t was not drawn, so the product
  // over teachers collapses to the XOR aggregate on every drawn block
  VoteMatrix m(2, {{1, 2, 1}, {2, 2, 1}});
  Layout layout = circuit::make_layout(8, 2, 1);
  auto enc = circuit::pack_votes(m, {0, 2}, 0, layout);

  CostCounters scratch;
  std::vector<PackedState> lifted;
  for (std::size_t t = 0; t < enc.states.size(); ++t) {
    auto full = circuit::add_plain(enc.states[t], enc.masks[t], scratch);
    // not drawn by sample 1 -> inert there
    if (t == 0) {
      CHECK(full.slots[2] == 1);
      CHECK(full.slots[3] == 1);
    }
    lifted.push_back(full);
  }
  auto product = circuit::product_tree(lifted, scratch);
  auto aggregate = circuit::aggregate_draw(enc, scratch);
  for (int s = 0; s < 2 * layout.k_pad; ++s) {  // blocks owned by real samples
    CHECK(product.slots[s] == aggregate.slots[s]);
  }
  CHECK(aggregate.slots == SlotVector{1, 0, 1, 0, 0, 0, 0, 0});
}

TEST_CASE("predicted cost matches the executed pipeline") {
  VoteMatrix m(3, {{1, 2, 3, 1}, {2, 2, 3, 3}});
  for (const char* text : {"X", "X^2", "X^2+X", "2X^3+3X^2+X"}) {
    auto poly = parse_poly(text);
    for (bool packed : {false, true}) {
      int rounds = packed ? poly.num_rounds() : 1;
      Layout layout = circuit::make_layout(256, 3, rounds);
      auto result = circuit::run_circuit(m, poly, 1, 42, layout);
      auto predicted = circuit::estimate_cost(poly, m.num_samples(),
                                              m.num_teachers(), layout);
      CHECK(result.report == predicted);
      CHECK(result.report.packed == (poly.num_rounds() > 1 && packed));
    }
  }
}

TEST_CASE("closed-form counter values for one worked shape") {
  // n=4 teachers, K=3 (k_pad 4), P=X^2+X: R=2, sum p=3, max p=2
  auto poly = parse_poly("X^2+X");
  Layout unpacked = circuit::make_layout(64, 3, 1);
  auto u = circuit::estimate_cost(poly, 2, 4, unpacked);
  CHECK(u.counters == CostCounters{5, 14, 28, 8});
  CHECK(u.depth == 3);  // R + ceil(log2 max_p)

  Layout packed = circuit::make_layout(64, 3, 2);
  auto p = circuit::estimate_cost(poly, 2, 4, packed);
  CHECK(p.counters == CostCounters{5, 13, 20, 6});
  CHECK(p.depth == 3);
}

TEST_CASE("ciphertext outcomes replicate the plaintext simulator") {
  rng::Xoshiro256 gen(7);
  const char* polys[] = {"X", "X^2", "X^2+X", "2X^2+X", "X^3+X^2", "2X^3+X"};
  for (int rep = 0; rep < 20; ++rep) {
    int k = 2 + static_cast<int>(gen.uniform_below(4));
    int teachers = 1 + static_cast<int>(gen.uniform_below(6));
    int samples = 1 + static_cast<int>(gen.uniform_below(3));
    std::int64_t offset = static_cast<std::int64_t>(gen.uniform_below(3));
    auto poly = parse_poly(polys[gen.uniform_below(6)]);
    std::uint64_t seed = gen.next();

    std::vector<std::vector<int>> votes(samples, std::vector<int>(teachers));
    for (auto& row : votes) {
      for (auto& v : row) v = 1 + static_cast<int>(gen.uniform_below(k));
    }
    VoteMatrix m(k, votes);

    for (bool packed : {false, true}) {
      Layout layout =
          circuit::make_layout(256, k, packed ? poly.num_rounds() : 1);
      auto result = circuit::run_circuit(m, poly, offset, seed, layout);
      REQUIRE(static_cast<int>(result.outcomes.size()) == samples);
      for (int i = 0; i < samples; ++i) {
        CHECK(result.outcomes[i] == sim::run_shield(m, i, poly, offset, seed));
      }
    }
  }
}

TEST_CASE("capacity overflow is rejected") {
  VoteMatrix m(2, {{1}, {2}, {1}});
  Layout layout = circuit::make_layout(4, 2, 1);  // room for two samples
  CHECK_THROWS_AS(circuit::run_circuit(m, parse_poly("X"), 1, 0, layout),
                  core::ValidationError);
  CHECK_THROWS_AS(circuit::estimate_cost(parse_poly("X"), 3, 4, layout),
                  core::ValidationError);
}
