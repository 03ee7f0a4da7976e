#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

#include "horolmmp/errors.hpp"

namespace horo {

// Arbitrary-precision integers and rationals. Rationals are always stored
// reduced, with a positive denominator; arithmetic is exact.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& r) { return numerator(r); }
inline Int rat_den(const Rat& r) { return denominator(r); }

inline Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw DomainError("zero denominator");
  return Rat(num, den);
}

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline Int int_floor_div(const Int& a, const Int& b) {
  // b > 0 assumed
  Int q = a / b;
  if (a % b != 0 && a < 0) --q;
  return q;
}

inline Int rat_floor(const Rat& r) { return int_floor_div(rat_num(r), rat_den(r)); }

inline Int rat_ceil(const Rat& r) { return -rat_floor(-r); }

// Serializes as "p/q", or "p" when q = 1. Base 10, no whitespace.
inline std::string rat_str(const Rat& r) {
  Int n = rat_num(r), d = rat_den(r);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

inline bool is_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

// Parses "p/q" or "p" (optional leading '-' on p; q strictly positive digits).
inline Rat parse_rat(std::string_view s) {
  auto bad = [&] { return ParseError("malformed rational '" + std::string(s) + "'"); };
  std::string_view numpart = s, denpart;
  auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    numpart = s.substr(0, slash);
    denpart = s.substr(slash + 1);
  }
  bool neg = false;
  if (!numpart.empty() && (numpart[0] == '-' || numpart[0] == '+')) {
    neg = numpart[0] == '-';
    numpart.remove_prefix(1);
  }
  if (!is_digits(numpart)) throw bad();
  Int num{std::string(numpart)};
  if (neg) num = -num;
  Int den = 1;
  if (slash != std::string_view::npos) {
    if (!is_digits(denpart)) throw bad();
    den = Int{std::string(denpart)};
    if (den == 0) throw ParseError("zero denominator in '" + std::string(s) + "'");
  }
  return Rat(num, den);
}

}  // namespace horo
