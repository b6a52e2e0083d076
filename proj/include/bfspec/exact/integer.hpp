#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bfspec::exact {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Raised for malformed or degenerate exact-arithmetic inputs.
class ExactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Integer abs(const Integer& a) { return a < 0 ? Integer(-a) : a; }
inline Rational abs(const Rational& a) { return a < 0 ? Rational(-a) : a; }

inline Integer gcd(const Integer& a, const Integer& b) {
  return boost::multiprecision::gcd(abs(a), abs(b));
}

inline Integer lcm(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return 0;
  return abs(a / gcd(a, b) * b);
}

struct ExtendedGcd {
  Integer g;  // g = s*a + t*b, g >= 0
  Integer s;
  Integer t;
};

inline ExtendedGcd extended_gcd(const Integer& a, const Integer& b) {
  Integer old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    Integer q = old_r / r;
    Integer tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  return {old_r, old_s, old_t};
}

/// Floor division for a possibly negative numerator; b must be positive.
inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if ((a % b != 0) && (a < 0)) q -= 1;
  return q;
}

/// Non-negative remainder modulo a positive b.
inline Integer mod(const Integer& a, const Integer& b) {
  Integer r = a % b;
  if (r < 0) r += b;
  return r;
}

/// Modular inverse of a modulo m (m > 1, gcd(a, m) = 1).
inline Integer mod_inverse(const Integer& a, const Integer& m) {
  auto eg = extended_gcd(mod(a, m), m);
  if (eg.g != 1) throw ExactError("mod_inverse: arguments are not coprime");
  return mod(eg.s, m);
}

inline Integer numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

inline bool is_integral(const Rational& q) { return denominator(q) == 1; }

inline Integer floor(const Rational& q) { return floor_div(numerator(q), denominator(q)); }

/// Fractional part in [0, 1).
inline Rational frac(const Rational& q) { return q - Rational(floor(q)); }

inline Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw ExactError("zero denominator");
  return Rational(num, den);
}

inline std::string to_string(const Integer& a) { return a.str(); }

/// "p/q" or "p" when the denominator is 1.
inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

/// Parses "p", "-p", or "p/q".
inline Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(Integer(text));
    Integer num(text.substr(0, slash));
    Integer den(text.substr(slash + 1));
    return make_rational(num, den);
  } catch (const ExactError&) {
    throw;
  } catch (const std::exception&) {
    throw ExactError("malformed rational '" + text + "'");
  }
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline long double to_long_double(const Rational& q) { return q.convert_to<long double>(); }

inline std::int64_t to_int64(const Integer& a) {
  if (a > std::numeric_limits<std::int64_t>::max() || a < std::numeric_limits<std::int64_t>::min())
    throw ExactError("integer does not fit in 64 bits");
  return a.convert_to<std::int64_t>();
}

using RationalVector = std::vector<Rational>;
using IntegerVector = std::vector<Integer>;

}  // namespace bfspec::exact
