#pragma once

#include "bfspec/bfree/primes.hpp"
#include "bfspec/errors.hpp"
#include "bfspec/quad/ideal.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bfspec::quad {

enum class SplitKind { ramified, inert, split };

inline std::string split_name(SplitKind k) {
  switch (k) {
    case SplitKind::ramified: return "ramified";
    case SplitKind::inert: return "inert";
    case SplitKind::split: return "split";
  }
  return "?";
}

/// (p, r, conj): the prime (p, ω - r) for the smallest root r of ω's minimal
/// polynomial mod p, or its conjugate when conj is set. Inert primes use r = -1.
struct PrimeHandle {
  std::int64_t p = 0;
  std::int64_t r = -1;
  bool conj = false;

  auto operator<=>(const PrimeHandle&) const = default;

  std::string str() const { return std::to_string(p) + ":" + std::to_string(r) + ":" + (conj ? "1" : "0"); }
};

inline PrimeHandle parse_handle(const std::string& text) {
  auto a = text.find(':');
  auto b = text.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) throw ConfigError("prime handle must read p:r:conj, got '" + text + "'");
  try {
    return {std::stoll(text.substr(0, a)), std::stoll(text.substr(a + 1, b - a - 1)), text.substr(b + 1) == "1"};
  } catch (const std::exception&) {
    throw ConfigError("malformed prime handle '" + text + "'");
  }
}

struct PrimeIdeal {
  PrimeHandle handle;
  SplitKind kind;
  QuadIdeal ideal;
  Integer norm;
};

struct Splitting {
  SplitKind kind;
  std::vector<PrimeIdeal> ideals;  // handle order: conj = false first
};

inline std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m) {
  return static_cast<std::int64_t>(static_cast<__int128>(a) * b % m);
}

inline std::int64_t powmod(std::int64_t a, std::int64_t e, std::int64_t m) {
  std::int64_t r = 1 % m;
  a %= m;
  if (a < 0) a += m;
  while (e > 0) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

/// Kronecker symbol (D / p) for a prime p.
inline int kronecker(std::int64_t disc, std::int64_t p) {
  std::int64_t dm = disc % p;
  if (dm < 0) dm += p;
  if (p == 2) {
    if (disc % 2 == 0) return 0;
    std::int64_t r = ((disc % 8) + 8) % 8;
    return (r == 1 || r == 7) ? 1 : -1;
  }
  if (dm == 0) return 0;
  return powmod(dm, (p - 1) / 2, p) == 1 ? 1 : -1;
}

/// A square root of n modulo an odd prime p (n a nonzero square), Tonelli–Shanks.
inline std::int64_t sqrt_mod(std::int64_t n, std::int64_t p) {
  n %= p;
  if (n < 0) n += p;
  if (n == 0) return 0;
  std::int64_t q = p - 1, s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  std::int64_t z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
  std::int64_t m = s, c = powmod(z, q, p), t = powmod(n, q, p), r = powmod(n, (q + 1) / 2, p);
  while (t != 1) {
    std::int64_t i = 0, tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, p);
      ++i;
    }
    std::int64_t b = c;
    for (std::int64_t j = 0; j < m - i - 1; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return r;
}

/// Roots of X^2 - t X - s modulo p, ascending.
inline std::vector<std::int64_t> omega_roots(const QuadField& f, std::int64_t p) {
  auto value = [&](std::int64_t x) {
    __int128 v = static_cast<__int128>(x) * x - static_cast<__int128>(f.t()) * x - f.s();
    v %= p;
    if (v < 0) v += p;
    return static_cast<std::int64_t>(v);
  };
  std::vector<std::int64_t> roots;
  if (p < 1000) {
    for (std::int64_t x = 0; x < p; ++x)
      if (value(x) == 0) roots.push_back(x);
    return roots;
  }
  // p odd: complete the square, (2X - t)^2 = t^2 + 4s.
  std::int64_t disc = (f.t() * f.t() + 4 * f.s()) % p;
  if (disc < 0) disc += p;
  if (disc != 0 && powmod(disc, (p - 1) / 2, p) != 1) return roots;
  std::int64_t y = sqrt_mod(disc, p);
  std::int64_t inv2 = (p + 1) / 2;
  for (std::int64_t sign : {1, -1}) {
    std::int64_t x = mulmod(((f.t() + sign * y) % p + p) % p, inv2, p);
    if (value(x) == 0 && (roots.empty() || roots[0] != x)) roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

inline QuadIdeal prime_ideal_from_root(const QuadField& f, std::int64_t p, std::int64_t r) {
  return QuadIdeal::from_generators(f, {QuadElem(f, p), QuadElem(f, -r, 1)});
}

/// Decomposition of the rational prime p in the field.
inline Splitting split_type(std::int64_t p, const QuadField& f) {
  if (!bfree::is_prime(Integer(p))) throw DomainError(std::to_string(p) + " is not prime");
  const int chi = kronecker(f.discriminant(), p);
  auto roots = omega_roots(f, p);
  Splitting s;
  if (chi == -1) {
    if (!roots.empty()) throw DomainError("splitting inconsistent with Kronecker symbol");
    s.kind = SplitKind::inert;
    s.ideals.push_back({{p, -1, false}, SplitKind::inert, QuadIdeal::principal(QuadElem(f, p)), Integer(p) * p});
    return s;
  }
  if (chi == 0) {
    if (roots.size() != 1) throw DomainError("splitting inconsistent with Kronecker symbol");
    s.kind = SplitKind::ramified;
    s.ideals.push_back({{p, roots[0], false}, SplitKind::ramified, prime_ideal_from_root(f, p, roots[0]), Integer(p)});
    return s;
  }
  if (roots.size() != 2) throw DomainError("splitting inconsistent with Kronecker symbol");
  s.kind = SplitKind::split;
  s.ideals.push_back({{p, roots[0], false}, SplitKind::split, prime_ideal_from_root(f, p, roots[0]), Integer(p)});
  s.ideals.push_back({{p, roots[0], true}, SplitKind::split, prime_ideal_from_root(f, p, roots[1]), Integer(p)});
  return s;
}

inline PrimeIdeal prime_from_handle(const QuadField& f, const PrimeHandle& h) {
  for (auto& pi : split_type(h.p, f).ideals)
    if (pi.handle == h) return pi;
  throw ConfigError("no prime ideal with handle " + h.str());
}

/// Handle of the conjugate prime ideal.
inline PrimeHandle conjugate_handle(const PrimeHandle& h, SplitKind kind) {
  if (kind != SplitKind::split) return h;
  return {h.p, h.r, !h.conj};
}

/// Exponent of the prime ideal in the fractional ideal generated by x (x != 0).
inline long long valuation(const QuadElem& x, const PrimeIdeal& pi) {
  if (x.is_zero()) throw DomainError("valuation of zero");
  // Write x = alpha / n with alpha integral and n a positive integer.
  Integer n = exact::lcm(exact::denominator(x.a), exact::denominator(x.b));
  QuadElem alpha = Rational(n) * x;
  const Integer p = pi.handle.p;
  long long vn = 0;
  for (Integer m = n; m % p == 0; m /= p) ++vn;
  const long long e = pi.kind == SplitKind::ramified ? 2 : 1;
  long long va = 0;
  QuadIdeal power = pi.ideal;
  while (power.contains(alpha)) {
    ++va;
    power = ideal_mul(power, pi.ideal);
  }
  return va - e * vn;
}

}  // namespace bfspec::quad
