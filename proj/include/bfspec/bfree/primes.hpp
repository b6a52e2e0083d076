#pragma once

#include "bfspec/errors.hpp"
#include "bfspec/exact/integer.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace bfspec::bfree {

using exact::Integer;

/// Primes and smallest prime factors below 10^6, built once by an Eratosthenes sieve.
class PrimeTable {
 public:
  static constexpr std::uint32_t kLimit = 1'000'000;
  static constexpr std::uint64_t kFactorBudget = 1'000'000'000'000ULL;  // kLimit^2

  static const PrimeTable& instance() {
    static const PrimeTable table;
    return table;
  }

  const std::vector<std::uint32_t>& primes() const { return primes_; }

  /// Smallest prime factor of n for 2 <= n <= kLimit.
  std::uint32_t spf(std::uint32_t n) const { return spf_[n]; }

  std::vector<std::uint32_t> primes_up_to(std::uint64_t bound) const {
    if (bound > kLimit) throw BudgetError("prime bound " + std::to_string(bound) + " exceeds table limit 1000000");
    auto end = std::upper_bound(primes_.begin(), primes_.end(), static_cast<std::uint32_t>(bound));
    return {primes_.begin(), end};
  }

  std::vector<std::uint32_t> first_primes(std::size_t count) const {
    if (count > primes_.size()) throw BudgetError("requested more primes than the table holds");
    return {primes_.begin(), primes_.begin() + static_cast<std::ptrdiff_t>(count)};
  }

 private:
  PrimeTable() : spf_(kLimit + 1, 0) {
    for (std::uint32_t i = 2; i <= kLimit; ++i) {
      if (spf_[i] != 0) continue;
      primes_.push_back(i);
      for (std::uint64_t j = static_cast<std::uint64_t>(i) * i; j <= kLimit; j += i)
        if (spf_[j] == 0) spf_[j] = i;
      spf_[i] = i;
    }
  }

  std::vector<std::uint32_t> primes_;
  std::vector<std::uint32_t> spf_;
};

/// Prime factorisation of |n| as (prime, exponent) pairs in increasing order.
/// Complete for |n| up to 10^12; larger inputs succeed only if the cofactor
/// left after trial division is at most 10^12.
inline std::vector<std::pair<Integer, unsigned>> factorize(const Integer& n) {
  const auto& table = PrimeTable::instance();
  Integer m = exact::abs(n);
  if (m == 0) throw DomainError("cannot factorise 0");
  std::vector<std::pair<Integer, unsigned>> out;
  auto push = [&](const Integer& p) {
    if (!out.empty() && out.back().first == p)
      ++out.back().second;
    else
      out.emplace_back(p, 1);
  };
  if (m <= PrimeTable::kLimit) {
    auto v = m.convert_to<std::uint32_t>();
    while (v > 1) {
      std::uint32_t p = table.spf(v);
      push(p);
      v /= p;
    }
    return out;
  }
  const Integer original = m;
  for (std::uint32_t p : table.primes()) {
    if (Integer(p) * p > m) break;
    while (m % p == 0) {
      push(p);
      m /= p;
    }
    if (m <= PrimeTable::kLimit) break;
  }
  if (m <= PrimeTable::kLimit) {
    auto v = m.convert_to<std::uint32_t>();
    while (v > 1) {
      std::uint32_t p = table.spf(v);
      push(p);
      v /= p;
    }
    return out;
  }
  if (m > PrimeTable::kFactorBudget)
    throw BudgetError("factorisation budget exceeded for " + exact::to_string(original));
  // Trial division reached sqrt(m), so the cofactor is prime.
  push(m);
  return out;
}

inline bool is_prime(const Integer& n) {
  if (n < 2) return false;
  if (n <= PrimeTable::kLimit) return PrimeTable::instance().spf(n.convert_to<std::uint32_t>()) == n;
  auto f = factorize(n);
  return f.size() == 1 && f[0].second == 1;
}

/// Prime divisors of |n| (n != 0).
inline std::vector<Integer> prime_divisors(const Integer& n) {
  std::vector<Integer> out;
  for (auto& [p, e] : factorize(n)) out.push_back(p);
  return out;
}

inline Integer ipow(const Integer& base, unsigned exp) { return boost::multiprecision::pow(base, exp); }

}  // namespace bfspec::bfree
