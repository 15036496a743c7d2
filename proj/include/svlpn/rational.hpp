#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace svlpn {

using BigInt = boost::multiprecision::cpp_int;

// Exact arbitrary-precision rational. All verification paths run on this
// type; doubles appear only on the sampling side.
using Rational = boost::multiprecision::cpp_rational;

// 2^e for possibly negative e.
inline Rational pow2(int e) {
  if (e >= 0) return Rational(BigInt(1) << e);
  return Rational(BigInt(1), BigInt(1) << (-e));
}

inline Rational rational_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Canonical textual form "num/den" (denominator always printed, always > 0).
inline std::string rational_to_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

namespace detail {
// cpp_int("") quietly yields 0, so emptiness is checked by hand.
inline BigInt parse_bigint(const std::string& s) {
  if (s.empty() || s == "-" || s == "+") throw std::runtime_error("empty integer");
  return BigInt(s);
}
}  // namespace detail

// Accepts "num/den" or a bare integer "num".
inline Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(detail::parse_bigint(s));
    BigInt num = detail::parse_bigint(s.substr(0, slash));
    BigInt den = detail::parse_bigint(s.substr(slash + 1));
    if (den <= 0) throw std::invalid_argument("denominator must be positive: " + s);
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("not a rational: '" + s + "'");
  }
}

// Exact square root, if the value is the square of a rational.
inline std::optional<Rational> exact_sqrt(const Rational& r) {
  if (r < 0) return std::nullopt;
  const BigInt num = numerator(r), den = denominator(r);
  const BigInt sn = sqrt(num), sd = sqrt(den);
  if (sn * sn != num || sd * sd != den) return std::nullopt;
  return Rational(sn, sd);
}

}  // namespace svlpn
