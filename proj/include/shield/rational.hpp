// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>

namespace shield {

/// Exact rational number. Probabilities, frequencies and moment sums are kept
/// in this form end to end; conversion to double happens only at presentation
/// boundaries (logs, JSON, CSV).
using Rational = mpq_class;

/// num/den in canonical form. The two-argument mpq_class constructor does not
/// reduce (5/5 stays distinct from 1 under comparison), so every ratio built
/// from raw counts must go through here.
inline Rational make_rational(long num, long den) {
  Rational out(num, den);
  out.canonicalize();
  return out;
}

/// base^exp with exp >= 0. Numerator and denominator of a canonical rational
/// are coprime, so their powers are too; no re-canonicalization needed.
inline Rational rational_pow(const Rational& base, unsigned long exp) {
  Rational out;
  mpz_pow_ui(mpq_numref(out.get_mpq_t()), mpq_numref(base.get_mpq_t()), exp);
  mpz_pow_ui(mpq_denref(out.get_mpq_t()), mpq_denref(base.get_mpq_t()), exp);
  return out;
}

/// Natural log of a positive rational, accurate to double precision even when
/// numerator/denominator far exceed the double range.
inline double rational_log(const Rational& q) {
  signed long num_exp = 0;
  signed long den_exp = 0;
  const double num_mant = mpz_get_d_2exp(&num_exp, mpq_numref(q.get_mpq_t()));
  const double den_mant = mpz_get_d_2exp(&den_exp, mpq_denref(q.get_mpq_t()));
  return std::log(num_mant) - std::log(den_mant) +
         static_cast<double>(num_exp - den_exp) * M_LN2;
}

inline double rational_to_double(const Rational& q) { return q.get_d(); }

/// "num/den" (or just "num" when den == 1), exact.
inline std::string rational_to_string(const Rational& q) { return q.get_str(); }

}  // namespace shield
