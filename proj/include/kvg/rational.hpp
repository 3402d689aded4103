#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace kvg {

/// Arbitrary precision rational, always kept in lowest terms with a positive denominator.
using Rational = mpq_class;

/// Canonical text form: "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& q);

/// Accepts "p", "-p" or "p/q". Throws kvg::Error(Parse) on malformed input or q = 0.
Rational parse_rational(std::string_view text);

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

}  // namespace kvg
