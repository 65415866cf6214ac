#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace liesym {

using Rational = mpq_class;

// Accepts "3", "-3/4", "0.25", "1e-3", "-2.5E+2". Throws std::invalid_argument.
Rational rational_from_string(std::string_view text);

// Exact value of a double's shortest round-trip decimal form (0.1 -> 1/10).
Rational rational_from_double(double value);

std::string to_string(const Rational& q);

std::size_t hash_value(const Rational& q);

bool is_integer(const Rational& q);

// Only meaningful when is_integer(q) and the value fits.
long to_long(const Rational& q);

Rational pow_int(const Rational& base, long exponent);

// Exact k-th root if numerator and denominator are both perfect k-th powers (q > 0).
std::optional<Rational> exact_root(const Rational& q, unsigned long k);

}  // namespace liesym
