#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace lmt {

// Arbitrary-precision rational, always kept in canonical form.
using Rational = mpq_class;

// Accepts integers ("-12"), decimals ("3.25", scaled exactly) and "p/q".
// Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

// "p/q", or a plain integer when the denominator is 1.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

// Nearest rational with the given denominator (ties away from zero).
Rational round_to_denominator(double value, long denominator);

inline Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }

}  // namespace lmt
