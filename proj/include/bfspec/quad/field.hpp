#pragma once

#include "bfspec/bfree/primes.hpp"
#include "bfspec/errors.hpp"
#include "bfspec/exact/integer.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>

namespace bfspec::quad {

using exact::Integer;
using exact::Rational;

/// Q(sqrt d) with integral basis {1, ω}: ω = (1+√d)/2 if d ≡ 1 mod 4, else √d.
class QuadField {
 public:
  explicit QuadField(std::int64_t d) : d_(d) {
    if (d == 0 || d == 1) throw ConfigError("field parameter d must differ from 0 and 1");
    for (auto& [p, e] : bfree::factorize(Integer(d)))
      if (e > 1) throw ConfigError("field parameter d = " + std::to_string(d) + " is not square-free");
    half_ = exact::mod(Integer(d), Integer(4)) == 1;
    if (half_) {
      s_ = (d - 1) / 4;
      t_ = 1;
    } else {
      s_ = d;
      t_ = 0;
    }
  }

  std::int64_t d() const { return d_; }
  bool imaginary() const { return d_ < 0; }
  /// ω = (1+√d)/2.
  bool omega_half() const { return half_; }
  /// ω² = s + t ω.
  std::int64_t s() const { return s_; }
  std::int64_t t() const { return t_; }
  /// δ = |d| for imaginary fields.
  std::int64_t delta() const { return d_ < 0 ? -d_ : d_; }
  std::int64_t discriminant() const { return half_ ? d_ : 4 * d_; }

  std::string omega_string() const {
    std::string root = imaginary() ? "i*sqrt(" + std::to_string(delta()) + ")" : "sqrt(" + std::to_string(d_) + ")";
    if (d_ == -1) root = "i";
    return half_ ? "(1+" + root + ")/2" : root;
  }

  std::string unit_group() const {
    if (d_ == -1) return "C4";
    if (d_ == -3) return "C6";
    if (imaginary()) return "C2";
    return "C2 x Cinf";
  }

  friend bool operator==(const QuadField&, const QuadField&) = default;

 private:
  std::int64_t d_;
  bool half_ = false;
  std::int64_t s_ = 0;
  std::int64_t t_ = 0;
};

/// a + b ω with rational coordinates.
struct QuadElem {
  QuadField field;
  Rational a;
  Rational b;

  QuadElem(const QuadField& f, Rational a_ = 0, Rational b_ = 0) : field(f), a(std::move(a_)), b(std::move(b_)) {}

  static QuadElem omega(const QuadField& f) { return {f, 0, 1}; }

  /// √d as an element of K.
  static QuadElem sqrt_d(const QuadField& f) { return f.omega_half() ? QuadElem(f, -1, 2) : QuadElem(f, 0, 1); }

  bool is_zero() const { return a == 0 && b == 0; }
  bool is_integral() const { return exact::is_integral(a) && exact::is_integral(b); }

  /// Galois conjugate; complex conjugation for imaginary fields.
  QuadElem conj() const { return {field, a + b * field.t(), -b}; }

  Rational norm() const { return a * a + a * b * field.t() - b * b * field.s(); }
  Rational trace() const { return 2 * a + b * field.t(); }

  QuadElem inverse() const {
    Rational n = norm();
    if (n == 0) throw DomainError("inverse of zero field element");
    QuadElem c = conj();
    return {field, c.a / n, c.b / n};
  }

  friend QuadElem operator+(const QuadElem& x, const QuadElem& y) {
    check(x, y);
    return {x.field, x.a + y.a, x.b + y.b};
  }
  friend QuadElem operator-(const QuadElem& x, const QuadElem& y) {
    check(x, y);
    return {x.field, x.a - y.a, x.b - y.b};
  }
  friend QuadElem operator-(const QuadElem& x) { return {x.field, -x.a, -x.b}; }
  friend QuadElem operator*(const QuadElem& x, const QuadElem& y) {
    check(x, y);
    const auto s = x.field.s(), t = x.field.t();
    Rational bb = x.b * y.b;
    return {x.field, x.a * y.a + bb * s, x.a * y.b + x.b * y.a + bb * t};
  }
  friend QuadElem operator*(const Rational& q, const QuadElem& x) { return {x.field, q * x.a, q * x.b}; }
  friend QuadElem operator/(const QuadElem& x, const QuadElem& y) { return x * y.inverse(); }

  friend bool operator==(const QuadElem& x, const QuadElem& y) { return x.field == y.field && x.a == y.a && x.b == y.b; }

  std::string str() const { return "(" + exact::to_string(a) + ")+(" + exact::to_string(b) + ")w"; }
  friend std::ostream& operator<<(std::ostream& os, const QuadElem& x) { return os << x.str(); }

 private:
  static void check(const QuadElem& x, const QuadElem& y) {
    if (!(x.field == y.field)) throw DomainError("field mismatch");
  }
};

/// Numeric images of 1 and ω: (Re, Im) for imaginary fields, (x, x') for real ones.
inline std::array<std::array<long double, 2>, 2> omega_embedding(const QuadField& f) {
  const long double root = std::sqrt(static_cast<long double>(f.delta()));
  if (f.imaginary()) {
    if (f.omega_half()) return {{{1.0L, 0.0L}, {0.5L, root / 2}}};
    return {{{1.0L, 0.0L}, {0.0L, root}}};
  }
  if (f.omega_half()) return {{{1.0L, 1.0L}, {(1 + root) / 2, (1 - root) / 2}}};
  return {{{1.0L, 1.0L}, {root, -root}}};
}

/// Numeric image in R^2.
inline std::array<long double, 2> embed(const QuadElem& x) {
  auto e = omega_embedding(x.field);
  long double a = exact::to_long_double(x.a), b = exact::to_long_double(x.b);
  return {a * e[0][0] + b * e[1][0], a * e[0][1] + b * e[1][1]};
}

/// Exact bilinear form agreeing with the Euclidean product of embedded images:
/// Re(conj(x) y) for imaginary fields, tr(x y) for real ones.
inline Rational bilinear(const QuadElem& x, const QuadElem& y) {
  if (x.field.imaginary()) return (x.conj() * y).trace() / 2;
  return (x * y).trace();
}

}  // namespace bfspec::quad
