#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace hypogeo {

using BigInt   = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(const BigInt& n) { return n.convert_to<double>(); }

/// Exact conversion: every finite double is a dyadic rational.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite input");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [1/2, 1)
  // 53 bits of mantissa
  auto mant = static_cast<long long>(std::ldexp(m, 53));
  exp -= 53;
  Rational r(mant);
  BigInt two(1);
  if (exp >= 0) {
    r *= Rational(BigInt(1) << exp);
  } else {
    r /= Rational(BigInt(1) << (-exp));
  }
  return r;
}

/// Parses "p", "-p", or "p/q".
inline Rational rational_from_string(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(BigInt(s));
  BigInt num(s.substr(0, slash));
  BigInt den(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("rational_from_string: zero denominator");
  return Rational(num, den);
}

inline std::string to_string(const Rational& q) {
  const BigInt& num = boost::multiprecision::numerator(q);
  const BigInt& den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace hypogeo
