// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#include "shield/poly_text.hpp"

#include <cctype>
#include <map>

namespace shield::core {

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  void skip_space() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
  }
  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
};

// Parses a decimal literal; rejects leading-zero-only and overflow-ish input.
long parse_number(Cursor& c) {
  const std::size_t start = c.pos;
  long value = 0;
  while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek()))) {
    value = value * 10 + (c.peek() - '0');
    if (value > 1'000'000) throw ParseError("number too large", start);
    ++c.pos;
  }
  if (c.pos == start) throw ParseError("expected a number", start);
  return value;
}

}  // namespace

PolyParam parse_poly(std::string_view text) {
  Cursor c{text};
  std::map<int, int> coeffs;
  bool first = true;
  while (true) {
    c.skip_space();
    if (c.done()) {
      if (first) throw ParseError("empty polynomial", c.pos);
      throw ParseError("trailing '+' without a term", c.pos);
    }

    int coef = 1;
    if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
      const std::size_t at = c.pos;
      coef = static_cast<int>(parse_number(c));
      if (coef == 0) throw ParseError("zero coefficient", at);
      c.skip_space();
    }
    if (c.done() || (c.peek() != 'X' && c.peek() != 'x')) {
      throw ParseError("expected 'X'", c.pos);
    }
    ++c.pos;

    int power = 1;
    c.skip_space();
    if (!c.done() && c.peek() == '^') {
      ++c.pos;
      c.skip_space();
      const std::size_t at = c.pos;
      if (c.done() || !std::isdigit(static_cast<unsigned char>(c.peek()))) {
        throw ParseError("expected a power after '^'", at);
      }
      power = static_cast<int>(parse_number(c));
      if (power == 0) throw ParseError("zero power", at);
    }
    coeffs[power] += coef;
    first = false;

    c.skip_space();
    if (c.done()) break;
    if (c.peek() != '+') throw ParseError("expected '+'", c.pos);
    ++c.pos;
  }
  return PolyParam(coeffs);
}

std::string format_poly(const PolyParam& poly) {
  std::string out;
  for (auto it = poly.coeffs().rbegin(); it != poly.coeffs().rend(); ++it) {
    const auto [power, coef] = *it;
    if (!out.empty()) out += '+';
    if (coef != 1) out += std::to_string(coef);
    out += 'X';
    if (power != 1) {
      out += '^';
      out += std::to_string(power);
    }
  }
  return out;
}

}  // namespace shield::core
