#include "cpv/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace cpv {

Rat rat_from_double(double x) {
  if (!std::isfinite(x)) {
    throw std::domain_error("rat_from_double: value is not finite");
  }
  // cpp_rational's float conversion decomposes the significand exactly.
  return Rat(x);
}

double rat_to_double(const Rat& x) {
  return x.convert_to<double>();
}

std::optional<Rat> rat_from_string(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '-' || text[pos] == '+') {
    negative = text[pos] == '-';
    ++pos;
  }
  auto read_digits = [&](BigInt& out) -> std::size_t {
    std::size_t count = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      out = out * 10 + (text[pos] - '0');
      ++pos;
      ++count;
    }
    return count;
  };
  BigInt intpart = 0;
  if (read_digits(intpart) == 0) return std::nullopt;
  BigInt num = intpart;
  BigInt den = 1;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    BigInt frac = 0;
    std::size_t digits = read_digits(frac);
    if (digits == 0) return std::nullopt;
    for (std::size_t i = 0; i < digits; ++i) den *= 10;
    num = num * den + frac;
  } else if (pos < text.size() && text[pos] == '/') {
    ++pos;
    den = 0;
    if (read_digits(den) == 0 || den == 0) return std::nullopt;
  }
  if (pos != text.size()) return std::nullopt;
  Rat r(num, den);
  return negative ? Rat(-r) : r;
}

std::string rat_to_string(const Rat& x) {
  BigInt num = numerator(x);
  BigInt den = denominator(x);
  if (den == 1) return num.str();
  // Count factors of 2 and 5; the decimal form terminates iff nothing is left.
  BigInt d = den;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return num.str() + "/" + den.str();
  int digits = std::max(twos, fives);
  BigInt scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  BigInt scaled = num * (scale / den);
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string s = scaled.str();
  if (static_cast<int>(s.size()) <= digits) {
    s.insert(0, digits + 1 - s.size(), '0');
  }
  s.insert(s.size() - digits, ".");
  // Trim trailing zeros of the fraction but keep at least one digit.
  while (s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return neg ? "-" + s : s;
}

Rat rat_floor(const Rat& x) {
  BigInt q = numerator(x) / denominator(x);
  if (x < 0 && q * denominator(x) != numerator(x)) q -= 1;
  return Rat(q);
}

Rat rat_ceil(const Rat& x) {
  return -rat_floor(-x);
}

Rat rat_abs(const Rat& x) {
  return x < 0 ? Rat(-x) : x;
}

Rat rat_clamp(const Rat& x, const Rat& lo, const Rat& hi) {
  if (x < lo) return lo;
  if (x > hi) return hi;
  return x;
}

Rat rat_median3(const Rat& a, const Rat& b, const Rat& c) {
  const Rat& lo = std::min(a, b);
  const Rat& hi = std::max(a, b);
  return std::max(lo, std::min(hi, c));
}

}  // namespace cpv
