#pragma once

#include "bfspec/errors.hpp"
#include "bfspec/exact/int_matrix.hpp"
#include "bfspec/quad/field.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace bfspec::quad {

using exact::IntMatrix;

/// Fractional ideal scale * (Z a + Z (b + c ω)), with [[a, b], [0, c]] a primitive
/// column HNF in the basis {1, ω}. Primitive H makes (scale, H) canonical.
class QuadIdeal {
 public:
  /// The ideal generated over O by the given elements.
  static QuadIdeal from_generators(const QuadField& f, const std::vector<QuadElem>& gens) {
    std::vector<QuadElem> module;
    const QuadElem w = QuadElem::omega(f);
    for (const auto& g : gens) {
      if (!(g.field == f)) throw DomainError("field mismatch");
      module.push_back(g);
      module.push_back(g * w);
    }
    return from_module(f, module);
  }

  static QuadIdeal principal(const QuadElem& x) { return from_generators(x.field, {x}); }
  static QuadIdeal unit(const QuadField& f) { return principal(QuadElem(f, 1)); }

  const QuadField& field() const { return field_; }
  const Rational& scale() const { return scale_; }
  const IntMatrix& hnf() const { return hnf_; }
  const Integer& a() const { return hnf_(0, 0); }
  const Integer& b() const { return hnf_(0, 1); }
  const Integer& c() const { return hnf_(1, 1); }

  /// Z-basis {scale a, scale (b + c ω)}.
  std::vector<QuadElem> z_basis() const {
    return {QuadElem(field_, scale_ * Rational(a()), 0), QuadElem(field_, scale_ * Rational(b()), scale_ * Rational(c()))};
  }

  bool is_integral() const {
    for (const auto& g : z_basis())
      if (!g.is_integral()) return false;
    return true;
  }

  bool contains(const QuadElem& x) const {
    if (!(x.field == field_)) throw DomainError("field mismatch");
    Rational v = x.b / scale_;
    Rational j = v / Rational(c());
    if (!exact::is_integral(j)) return false;
    Rational u = x.a / scale_ - j * Rational(b());
    return exact::is_integral(u / Rational(a()));
  }

  /// scale^2 * a * c.
  Rational norm() const { return scale_ * scale_ * Rational(a() * c()); }

  /// Integer coordinate matrix of the Z-basis (integral ideals only).
  IntMatrix integer_basis() const {
    if (!is_integral()) throw DomainError("ideal is not integral");
    IntMatrix m(2, 2);
    auto g = z_basis();
    m(0, 0) = exact::numerator(g[0].a);
    m(0, 1) = exact::numerator(g[1].a);
    m(1, 1) = exact::numerator(g[1].b);
    return m;
  }

  std::string str() const {
    std::string s = "[[" + exact::to_string(a()) + "," + exact::to_string(b()) + "],[0," + exact::to_string(c()) + "]]";
    if (scale_ != 1) s = exact::to_string(scale_) + "*" + s;
    return s;
  }

  friend bool operator==(const QuadIdeal& x, const QuadIdeal& y) {
    return x.field_ == y.field_ && x.scale_ == y.scale_ && x.hnf_ == y.hnf_;
  }
  friend std::ostream& operator<<(std::ostream& os, const QuadIdeal& i) { return os << i.str(); }

 private:
  QuadIdeal(QuadField f, Rational scale, IntMatrix h) : field_(std::move(f)), scale_(std::move(scale)), hnf_(std::move(h)) {}

  // The Z-module spanned by the elements; callers guarantee O-closure.
  static QuadIdeal from_module(const QuadField& f, const std::vector<QuadElem>& elems) {
    Integer den = 1;
    for (const auto& e : elems) den = exact::lcm(den, exact::lcm(exact::denominator(e.a), exact::denominator(e.b)));
    IntMatrix m(2, elems.size());
    for (std::size_t i = 0; i < elems.size(); ++i) {
      m(0, i) = exact::numerator(elems[i].a * Rational(den));
      m(1, i) = exact::numerator(elems[i].b * Rational(den));
    }
    IntMatrix h;
    try {
      h = exact::hnf(m);
    } catch (const exact::ExactError&) {
      throw DomainError("zero ideal");
    }
    Integer g = h.content();
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) h(r, c) /= g;
    return QuadIdeal(f, Rational(g, den), std::move(h));
  }

  friend QuadIdeal ideal_mul(const QuadIdeal&, const QuadIdeal&);
  friend QuadIdeal ideal_add(const QuadIdeal&, const QuadIdeal&);
  friend QuadIdeal ideal_conj(const QuadIdeal&);
  friend QuadIdeal ideal_scale(const QuadElem&, const QuadIdeal&);

  QuadField field_;
  Rational scale_;
  IntMatrix hnf_;
};

inline QuadIdeal ideal_mul(const QuadIdeal& x, const QuadIdeal& y) {
  if (!(x.field() == y.field())) throw DomainError("field mismatch");
  std::vector<QuadElem> prods;
  for (const auto& g : x.z_basis())
    for (const auto& h : y.z_basis()) prods.push_back(g * h);
  return QuadIdeal::from_module(x.field(), prods);
}

inline QuadIdeal ideal_add(const QuadIdeal& x, const QuadIdeal& y) {
  if (!(x.field() == y.field())) throw DomainError("field mismatch");
  auto gens = x.z_basis();
  for (const auto& g : y.z_basis()) gens.push_back(g);
  return QuadIdeal::from_module(x.field(), gens);
}

inline QuadIdeal ideal_conj(const QuadIdeal& x) {
  std::vector<QuadElem> gens;
  for (const auto& g : x.z_basis()) gens.push_back(g.conj());
  return QuadIdeal::from_module(x.field(), gens);
}

/// z * A for a nonzero field element z.
inline QuadIdeal ideal_scale(const QuadElem& z, const QuadIdeal& x) {
  if (z.is_zero()) throw DomainError("zero ideal");
  std::vector<QuadElem> gens;
  for (const auto& g : x.z_basis()) gens.push_back(z * g);
  return QuadIdeal::from_module(x.field(), gens);
}

inline Rational ideal_norm(const QuadIdeal& x) { return x.norm(); }

inline bool ideal_member(const QuadIdeal& x, const QuadElem& e) { return x.contains(e); }

/// A^{-1} = N(A)^{-1} conj(A).
inline QuadIdeal ideal_inverse(const QuadIdeal& x) {
  Rational n = x.norm();
  if (n == 0) throw DomainError("zero ideal");
  return ideal_scale(QuadElem(x.field(), 1 / n), ideal_conj(x));
}

inline QuadIdeal ideal_pow(const QuadIdeal& x, long long k) {
  QuadIdeal base = k < 0 ? ideal_inverse(x) : x;
  unsigned long long e = k < 0 ? static_cast<unsigned long long>(-k) : static_cast<unsigned long long>(k);
  QuadIdeal result = QuadIdeal::unit(x.field());
  while (e > 0) {
    if (e & 1) result = ideal_mul(result, base);
    e >>= 1;
    if (e) base = ideal_mul(base, base);
  }
  return result;
}

/// Invariant factors (> 1) of O / A for an integral ideal A.
inline std::vector<Integer> quotient_structure(const QuadIdeal& x) {
  if (!x.is_integral()) throw DomainError("quotient_structure needs an integral ideal");
  return exact::snf(x.integer_basis());
}

/// Integral ideal with 64-bit HNF for fast membership of integer coordinates.
struct IdealHnf64 {
  std::int64_t a = 1, b = 0, c = 1;

  static IdealHnf64 from(const QuadIdeal& x) {
    IntMatrix m = x.integer_basis();
    return {exact::to_int64(m(0, 0)), exact::to_int64(m(0, 1)), exact::to_int64(m(1, 1))};
  }

  bool contains(std::int64_t u, std::int64_t v) const {
    if (v % c != 0) return false;
    __int128 rest = static_cast<__int128>(u) - static_cast<__int128>(v / c) * b;
    return rest % a == 0;
  }

  /// Canonical representative of (u, v) modulo the ideal: 0 <= v' < c, 0 <= u' < a.
  std::pair<std::int64_t, std::int64_t> reduce(std::int64_t u, std::int64_t v) const {
    std::int64_t q = v / c;
    std::int64_t vr = v - q * c;
    __int128 ur = static_cast<__int128>(u) - static_cast<__int128>(q) * b;
    if (vr < 0) {
      vr += c;
      ur += b;
    }
    ur %= a;
    if (ur < 0) ur += a;
    return {static_cast<std::int64_t>(ur), vr};
  }
};

}  // namespace bfspec::quad
