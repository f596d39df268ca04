// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "shield/types.hpp"

namespace shield::core {

/// Parses "8X^4+6X^3+4X^2+X" style text. Grammar: term ('+' term)*, where
/// term = [coef] 'X' ['^' power], an omitted coefficient is 1 and an omitted
/// power is 1. Whitespace is ignored. Duplicate degrees accumulate.
/// Throws ParseError (with byte offset) on empty input, zero coefficients,
/// zero powers or malformed terms.
PolyParam parse_poly(std::string_view text);

/// Canonical text form: decreasing degrees, coefficient 1 and power 1 omitted.
/// parse_poly(format_poly(p)) == p.
std::string format_poly(const PolyParam& poly);

}  // namespace shield::core
