#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include "critlab/error.hpp"

namespace critlab {

/// Unbounded exact rational, used for arc endpoints on the circle.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

/// Bounded exact rational for Haar measures of finite groups. Denominators
/// never exceed the group order, so 64-bit parts cannot overflow.
using Fraction = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

inline std::string to_string(const Fraction& f) {
  return std::to_string(f.numerator()) + "/" + std::to_string(f.denominator());
}

namespace detail {

inline bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

}  // namespace detail

/// Parses "p/q" or "p". Decimal notation is rejected.
inline Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!detail::is_integer_literal(num) || !detail::is_integer_literal(den))
    throw Error(ErrorCode::parse_error, "malformed rational '" + std::string(text) + "'",
                {{"input", std::string(text)}});
  using boost::multiprecision::cpp_int;
  cpp_int p(std::string(num[0] == '+' ? num.substr(1) : num));
  cpp_int q(std::string(den[0] == '+' ? den.substr(1) : den));
  if (q == 0)
    throw Error(ErrorCode::parse_error, "zero denominator in '" + std::string(text) + "'",
                {{"input", std::string(text)}});
  return Rational(p, q);
}

inline Rational floor(const Rational& r) {
  using boost::multiprecision::cpp_int;
  cpp_int p = boost::multiprecision::numerator(r);
  cpp_int q = boost::multiprecision::denominator(r);
  cpp_int fl = p >= 0 ? cpp_int(p / q) : cpp_int(-((-p + q - 1) / q));
  return Rational(fl);
}

/// Representative of r in [0, 1).
inline Rational mod_one(const Rational& r) { return r - floor(r); }

inline Rational to_rational(const Fraction& f) {
  return Rational(f.numerator(), f.denominator());
}

}  // namespace critlab
