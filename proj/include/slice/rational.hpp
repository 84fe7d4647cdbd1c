#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace slice {

// Exact arbitrary-precision rational, always kept in canonical form.
using Rational = mpq_class;

// num/den in lowest terms. mpq_class(num, den) alone does not reduce.
inline Rational ratio(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Accepts "p", "p/q", "-p/q" and decimal "d.ddd". Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

// Canonical "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& r);

bool is_integer(const Rational& r);

}  // namespace slice
