#pragma once

#include "bfspec/bfree/kappa.hpp"
#include "bfspec/bfree/primes.hpp"
#include "bfspec/bfree/tail.hpp"
#include "bfspec/errors.hpp"
#include "bfspec/quad/dual.hpp"
#include "bfspec/quad/primes.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace bfspec::quad {

using bfree::Kappa;
using bfree::kKappaInfinity;
using IdealKappa = bfree::KappaAssignment<PrimeHandle>;

/// Expands overrides keyed by rational prime (applied to every prime above it)
/// and by handle into an IdealKappa.
inline IdealKappa make_ideal_kappa(const QuadField& f, Kappa default_kappa,
                                   const std::map<std::int64_t, Kappa>& by_prime,
                                   const std::map<PrimeHandle, Kappa>& by_handle = {}) {
  std::map<PrimeHandle, Kappa> overrides;
  for (const auto& [p, k] : by_prime)
    for (const auto& pi : split_type(p, f).ideals) overrides[pi.handle] = k;
  for (const auto& [h, k] : by_handle) {
    prime_from_handle(f, h);
    overrides[h] = k;
  }
  return IdealKappa(default_kappa, std::move(overrides));
}

struct RemovedIdeal {
  PrimeIdeal prime;
  Kappa kappa;
  QuadIdeal power;  // prime^kappa
  Integer index;    // N(prime)^kappa
};

/// κ-free integers of O: V = O minus the union of 𝔭^{κ_𝔭}. Prime ideals above
/// rational primes up to prime_bound are materialised; membership of any
/// integral element is decided exactly by factoring its norm.
class QuadKappaSystem {
 public:
  QuadKappaSystem(QuadField f, IdealKappa kappa, std::uint64_t prime_bound)
      : field_(std::move(f)), kappa_(std::move(kappa)), prime_bound_(prime_bound) {
    for (std::uint32_t p : bfree::PrimeTable::instance().primes_up_to(prime_bound))
      for (auto& pi : split_type(p, field_).ideals) {
        Kappa k = kappa_.at(pi.handle);
        if (k == kKappaInfinity) continue;
        Integer idx = bfree::ipow(pi.norm, k);
        removed_.push_back({pi, k, ideal_pow(pi.ideal, k), idx});
      }
  }

  const QuadField& field() const { return field_; }
  const IdealKappa& kappa() const { return kappa_; }
  std::uint64_t prime_bound() const { return prime_bound_; }
  const std::vector<RemovedIdeal>& removed() const { return removed_; }

  std::string name() const { return "kappa-free-quadratic(d=" + std::to_string(field_.d()) + ")"; }

  /// 1 / covolume of the embedded order: 2/sqrt|D| (imaginary), 1/sqrt(D) (real).
  long double gamma_density() const {
    long double disc = std::fabs(static_cast<long double>(field_.discriminant()));
    return field_.imaginary() ? 2 / std::sqrt(disc) : 1 / std::sqrt(disc);
  }

  /// Membership of an integral element given by coordinates (u, v) in {1, ω}.
  bool member(std::int64_t u, std::int64_t v) const {
    if (u == 0 && v == 0) return kappa_.min_kappa() == kKappaInfinity;
    __int128 n = static_cast<__int128>(u) * u + static_cast<__int128>(u) * v * field_.t() -
                 static_cast<__int128>(v) * v * field_.s();
    if (n < 0) n = -n;
    Integer norm = 0;
    {
      // Avoid a decimal round trip for common sizes.
      unsigned __int128 un = static_cast<unsigned __int128>(n);
      norm = static_cast<std::uint64_t>(un >> 64);
      norm <<= 64;
      norm += static_cast<std::uint64_t>(un);
    }
    for (const auto& [p, e] : bfree::factorize(norm)) {
      const auto& ideals = ideals_above(p.convert_to<std::int64_t>());
      for (const auto& entry : ideals) {
        // 𝔭^κ | x forces N(𝔭)^κ | N(x).
        if (static_cast<std::uint64_t>(e) < entry.min_norm_exponent) continue;
        if (entry.power.contains(u, v)) return false;
      }
    }
    return true;
  }

  bool member(const QuadElem& x) const {
    if (!(x.field == field_)) throw DomainError("field mismatch");
    if (!x.is_integral()) throw DomainError("element is not integral");
    return member(exact::to_int64(exact::numerator(x.a)), exact::to_int64(exact::numerator(x.b)));
  }

 private:
  struct PowerEntry {
    IdealHnf64 power;
    std::uint64_t min_norm_exponent;
  };

  const std::vector<PowerEntry>& ideals_above(std::int64_t p) const {
    auto it = cache_.find(p);
    if (it != cache_.end()) return it->second;
    std::vector<PowerEntry> entries;
    for (auto& pi : split_type(p, field_).ideals) {
      Kappa k = kappa_.at(pi.handle);
      if (k == kKappaInfinity) continue;
      std::uint64_t f = pi.kind == SplitKind::inert ? 2 : 1;
      entries.push_back({IdealHnf64::from(ideal_pow(pi.ideal, k)), f * k});
    }
    return cache_.emplace(p, std::move(entries)).first->second;
  }

  QuadField field_;
  IdealKappa kappa_;
  std::uint64_t prime_bound_;
  std::vector<RemovedIdeal> removed_;
  // Lazily filled; not safe for concurrent first use.
  mutable std::unordered_map<std::int64_t, std::vector<PowerEntry>> cache_;
};

/// Stand-alone membership test: x integral; 0 is never κ-free when some κ is finite.
inline bool quad_kappa_free_member(const QuadElem& x, const IdealKappa& kappa) {
  if (!x.is_integral()) throw DomainError("element is not integral");
  if (x.is_zero()) return kappa.min_kappa() == kKappaInfinity;
  for (const auto& [p, e] : bfree::factorize(exact::numerator(x.norm())))
    for (auto& pi : split_type(p.convert_to<std::int64_t>(), x.field).ideals) {
      Kappa k = kappa.at(pi.handle);
      if (k == kKappaInfinity) continue;
      if (ideal_pow(pi.ideal, k).contains(x)) return false;
    }
  return true;
}

/// Enclosure of dens(V) = dens(O) prod_𝔭 (1 - N(𝔭)^{-κ_𝔭}) using all prime
/// ideals of norm <= norm_bound; the rest is bounded through
/// sum_{N𝔭 > X} N𝔭^{-κ} <= 2 S_κ(X) + S_{2κ}(sqrt X).
inline bfree::Interval quad_density_limit(const QuadKappaSystem& sys, std::uint64_t norm_bound) {
  const auto& table = bfree::PrimeTable::instance();
  if (norm_bound > bfree::PrimeTable::kLimit) throw BudgetError("norm bound exceeds the prime table");
  long double prod = sys.gamma_density();
  std::size_t roundings = 3;
  auto factor = [&](long double norm, Kappa k) {
    if (k == kKappaInfinity) return;
    prod *= 1 - std::pow(norm, -static_cast<long double>(k));
    roundings += 3;
  };
  std::set<std::int64_t> special;
  for (const auto& [h, k] : sys.kappa().overrides()) special.insert(h.p);
  const std::int64_t disc = sys.field().discriminant();
  const Kappa def = sys.kappa().default_kappa();
  for (std::uint32_t p : table.primes_up_to(norm_bound)) {
    int chi = kronecker(disc, p);
    if (chi == -1 && static_cast<std::uint64_t>(p) * p > norm_bound) continue;
    if (!special.count(p)) {
      // Norm p^2 (inert), p (ramified), or two ideals of norm p (split).
      factor(chi == -1 ? static_cast<long double>(p) * p : p, def);
      if (chi == 1) factor(p, def);
      continue;
    }
    for (auto& pi : split_type(p, sys.field()).ideals) factor(pi.norm.convert_to<long double>(), sys.kappa().at(pi.handle));
  }
  long double tail = 0;
  const long double x = static_cast<long double>(norm_bound);
  if (def != kKappaInfinity)
    tail = 2 * bfree::prime_tail_bound(def, x) + bfree::prime_tail_bound(2.0L * def, std::sqrt(x));
  for (const auto& [h, k] : sys.kappa().overrides()) {
    if (k == kKappaInfinity || k >= def) continue;
    long double n = static_cast<long double>(h.p);
    if (h.r < 0) n *= n;
    if (n > x) tail += std::pow(n, -static_cast<long double>(k));
  }
  return bfree::enclose_product(prod, roundings, tail);
}

}  // namespace bfspec::quad
