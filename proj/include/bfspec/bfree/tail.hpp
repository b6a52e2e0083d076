#pragma once

#include <cfloat>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>

namespace bfspec::bfree {

/// Closed real interval [lo, hi].
struct Interval {
  long double lo = 0;
  long double hi = 0;

  long double mid() const { return (lo + hi) / 2; }
  long double width() const { return hi - lo; }
  bool contains(long double x) const { return lo <= x && x <= hi; }

  /// Distance from x to the interval (0 if inside).
  long double distance(long double x) const {
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0;
  }

  friend std::ostream& operator<<(std::ostream& os, const Interval& i) {
    return os << '[' << static_cast<double>(i.lo) << ", " << static_cast<double>(i.hi) << ']';
  }
};

/// Upper bound on sum_{p > x} p^{-s} for real s > 1, x >= 2.
// Stieltjes integration against pi(t) < 1.25506 t / ln t (valid for t > 1).
inline long double prime_tail_bound(long double s, long double x) {
  if (!(s > 1)) throw std::invalid_argument("prime_tail_bound needs s > 1");
  if (x < 2) x = 2;
  long double bound = 1.25506L * s / ((s - 1) * std::pow(x, s - 1) * std::log(x));
  return bound * (1 + 1e-12L);
}

/// Relative error bound for a product of n long-double factors each carrying
/// one rounding of its own.
inline long double product_rounding_bound(std::size_t n) { return 2.2L * static_cast<long double>(n + 1) * LDBL_EPSILON; }

/// Enclosure of P * prod_{tail}(1 - t_i) given the computed partial product P
/// (n roundings) and T >= sum t_i with all t_i in [0, 1).
inline Interval enclose_product(long double partial, std::size_t n, long double tail) {
  long double rel = product_rounding_bound(n);
  long double hi = partial * (1 + rel);
  long double shrink = tail >= 1 ? 0 : 1 - tail;
  long double lo = partial * (1 - rel) * shrink;
  return {lo, hi};
}

}  // namespace bfspec::bfree
