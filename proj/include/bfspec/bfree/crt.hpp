#pragma once

#include "bfspec/bfree/primes.hpp"
#include "bfspec/bfree/system.hpp"
#include "bfspec/errors.hpp"

#include <cstdint>
#include <vector>

namespace bfspec::bfree {

/// Translation t such that no point of t + [0, m)^d is visible. Cell j gets
/// its own prime p_j and t ≡ -j (mod p_j) coordinate-wise.
inline IntegerVector crt_hole(std::size_t d, std::size_t m) {
  if (d < 2) throw DomainError("crt_hole needs d >= 2");
  if (m < 1) throw DomainError("crt_hole needs m >= 1");
  std::size_t cells = 1;
  for (std::size_t i = 0; i < d; ++i) {
    cells *= m;
    if (cells > 100'000) throw BudgetError("crt_hole: too many cells");
  }
  auto primes = PrimeTable::instance().first_primes(cells);

  IntegerVector t(d);
  Integer modulus = 1;
  std::vector<std::size_t> offset(d, 0);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const Integer p = primes[cell];
    for (std::size_t c = 0; c < d; ++c) {
      // Combine t_c (mod modulus) with t_c ≡ -offset_c (mod p).
      Integer target = exact::mod(Integer(-static_cast<long long>(offset[c])), p);
      Integer delta = exact::mod(target - t[c], p);
      Integer step = exact::mod(delta * exact::mod_inverse(exact::mod(modulus, p), p), p);
      t[c] += modulus * step;
    }
    modulus *= p;
    for (std::size_t c = 0; c < d; ++c) {
      if (++offset[c] < m) break;
      offset[c] = 0;
    }
  }
  for (auto& v : t)
    if (v == 0) v = modulus;
  return t;
}

/// Exhaustive check that t + [0, m)^d contains no visible point.
inline bool verify_hole(const IntegerVector& t, std::size_t m) {
  const std::size_t d = t.size();
  std::vector<std::size_t> offset(d, 0);
  for (;;) {
    IntegerVector x(d);
    for (std::size_t c = 0; c < d; ++c) x[c] = t[c] + offset[c];
    if (visible_member(x)) return false;
    std::size_t c = 0;
    for (; c < d; ++c) {
      if (++offset[c] < m) break;
      offset[c] = 0;
    }
    if (c == d) return true;
  }
}

}  // namespace bfspec::bfree
