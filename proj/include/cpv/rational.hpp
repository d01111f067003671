#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace cpv {

// Exact rational arithmetic for trace values and formula literals.
// Comparisons in the evaluator must be deterministic, so every value that
// reaches an atom is a cpp_rational; doubles coming out of simulation are
// converted exactly (binary floats are dyadic rationals).
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Exact conversion; rejects NaN/inf.
Rat rat_from_double(double x);

// Nearest double (saturating); used only for reporting, never for comparisons.
double rat_to_double(const Rat& x);

// Parses "5", "5.4", "-0.9" or "3/7". Decimal digits are read as exact
// decimal fractions (0.1 -> 1/10), not via binary floating point.
std::optional<Rat> rat_from_string(const std::string& text);

// Canonical text form: integer when denominator is 1, terminating decimal
// when the denominator is 2^a*5^b, "n/d" otherwise. rat_from_string is a
// left inverse of this.
std::string rat_to_string(const Rat& x);

Rat rat_floor(const Rat& x);
Rat rat_ceil(const Rat& x);
Rat rat_abs(const Rat& x);
Rat rat_clamp(const Rat& x, const Rat& lo, const Rat& hi);
Rat rat_median3(const Rat& a, const Rat& b, const Rat& c);

}  // namespace cpv
