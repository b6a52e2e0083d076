#pragma once

#include "bfspec/bfree/kappa.hpp"
#include "bfspec/bfree/primes.hpp"
#include "bfspec/bfree/tail.hpp"
#include "bfspec/errors.hpp"
#include "bfspec/exact/lattice.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bfspec::bfree {

using exact::Integer;
using exact::IntegerVector;
using exact::Lattice;
using exact::Rational;
using exact::RationalVector;

using PrimeKappa = KappaAssignment<std::uint64_t>;

enum class Family { visible, kappa_free_integers, custom };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::visible: return "visible";
    case Family::kappa_free_integers: return "kappa-free-Z";
    case Family::custom: return "custom-lattices";
  }
  return "?";
}

enum class Verdict { out, in, undecided };

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::out: return "false";
    case Verdict::in: return "true";
    case Verdict::undecided: return "undecided";
  }
  return "?";
}

/// gcd of the coordinates is 1; the origin (gcd 0) is not visible.
inline bool visible_member(std::span<const std::int64_t> x) {
  std::uint64_t g = 0;
  for (auto v : x) {
    g = std::gcd(g, static_cast<std::uint64_t>(v < 0 ? -static_cast<std::uint64_t>(v) : v));
    if (g == 1) return true;
  }
  return g == 1;
}

inline bool visible_member(const IntegerVector& x) {
  Integer g = 0;
  for (const auto& v : x) {
    g = exact::gcd(g, v);
    if (g == 1) return true;
  }
  return g == 1;
}

/// n is not divisible by p^{kappa_p} for any prime p with finite kappa_p.
inline bool kappa_free_member(const Integer& n, const PrimeKappa& kappa) {
  if (n == 0) return kappa.min_kappa() == kKappaInfinity;
  for (const auto& [p, e] : factorize(n)) {
    Kappa k = kappa.at(p.convert_to<std::uint64_t>());
    if (k != kKappaInfinity && e >= k) return false;
  }
  return true;
}

/// V = Γ minus the union of Γ_i. Arithmetic families (visible points, kappa-free
/// integers) are infinite; the first lattices up to a prime bound are
/// materialised exactly and membership is decided by factorisation. Custom
/// systems list their lattices explicitly with a caller-certified tail.
class BFreeSystem {
 public:
  static BFreeSystem visible(std::size_t dim, std::uint64_t prime_bound) {
    if (dim < 2) throw ConfigError("visible points need d >= 2");
    BFreeSystem s(Family::visible, Lattice::integer_lattice(dim));
    s.prime_bound_ = prime_bound;
    for (std::uint32_t p : PrimeTable::instance().primes_up_to(prime_bound)) {
      s.labels_.push_back(p);
      s.indices_.push_back(ipow(p, static_cast<unsigned>(dim)));
      s.exponents_.push_back(1);
    }
    return s;
  }

  static BFreeSystem kappa_free_integers(const PrimeKappa& kappa, std::uint64_t prime_bound) {
    BFreeSystem s(Family::kappa_free_integers, Lattice::integer_lattice(1));
    s.prime_bound_ = prime_bound;
    s.kappa_ = kappa;
    struct Entry {
      Integer n;
      std::uint64_t p;
      Kappa k;
    };
    std::vector<Entry> entries;
    for (std::uint32_t p : PrimeTable::instance().primes_up_to(prime_bound)) {
      Kappa k = kappa.at(p);
      if (k == kKappaInfinity) continue;
      entries.push_back({ipow(p, k), p, k});
    }
    // B1 asks for nondecreasing indices; only matters with per-prime overrides.
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.n < b.n; });
    for (auto& e : entries) {
      s.labels_.push_back(e.p);
      s.indices_.push_back(e.n);
      s.exponents_.push_back(e.k);
    }
    return s;
  }

  /// tail_bound certifies sum_{i > N} 1/N_i over the lattices not listed; 0 means
  /// the listed family is complete.
  static BFreeSystem custom(const Lattice& gamma, std::vector<Lattice> removed, long double tail_bound) {
    if (tail_bound < 0) throw ConfigError("tail bound must be non-negative");
    BFreeSystem s(Family::custom, gamma);
    s.tail_bound_ = tail_bound;
    for (std::size_t i = 0; i < removed.size(); ++i) {
      const Lattice& l = removed[i];
      if (l.dim() != gamma.dim()) throw ConfigError("removed lattice " + std::to_string(i) + ": dimension mismatch");
      Integer n;
      try {
        n = exact::index(gamma, l);
      } catch (const exact::ExactError&) {
        throw ConfigError("B1 violated: removed lattice " + std::to_string(i) + " is not contained in the ambient lattice");
      }
      if (n <= 1) throw ConfigError("B1 violated: removed lattice " + std::to_string(i) + " has index 1");
      if (!s.indices_.empty() && n < s.indices_.back())
        throw ConfigError("B1 violated: indices must be nondecreasing (lattice " + std::to_string(i) + ")");
      s.indices_.push_back(n);
      s.labels_.push_back(i);
    }
    s.custom_removed_ = std::move(removed);
    return s;
  }

  Family family() const { return family_; }
  std::size_t dim() const { return gamma_.dim(); }
  const Lattice& gamma() const { return gamma_; }
  bool is_arithmetic() const { return family_ != Family::custom; }

  /// Number of removed lattices materialised exactly.
  std::size_t truncation() const { return indices_.size(); }
  const std::vector<Integer>& indices() const { return indices_; }

  /// Prime of removed lattice i (arithmetic families) or its position (custom).
  const std::vector<std::uint64_t>& labels() const { return labels_; }
  /// Exponent of the prime of lattice i (1 for visible points).
  const std::vector<Kappa>& exponents() const { return exponents_; }

  std::uint64_t prime_bound() const { return prime_bound_; }
  const PrimeKappa& kappa() const { return kappa_; }
  long double custom_tail_bound() const { return tail_bound_; }

  /// Γ_i as an explicit lattice.
  Lattice removed_lattice(std::size_t i) const {
    if (i >= truncation()) throw DomainError("truncation exceeded");
    if (family_ == Family::custom) return custom_removed_[i];
    Integer q = ipow(labels_[i], exponents_[i]);
    return Lattice::scaled_integer_lattice(dim(), Rational(q));
  }

  /// Position of the removed lattice attached to prime p, if materialised.
  std::optional<std::size_t> position_of_prime(std::uint64_t p) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == p) return i;
    return std::nullopt;
  }

  std::string name() const {
    if (family_ == Family::visible) return "visible(d=" + std::to_string(dim()) + ")";
    return family_name(family_);
  }

 private:
  BFreeSystem(Family f, Lattice gamma) : family_(f), gamma_(std::move(gamma)) {}

  Family family_;
  Lattice gamma_;
  std::vector<Integer> indices_;
  std::vector<std::uint64_t> labels_;
  std::vector<Kappa> exponents_;
  std::uint64_t prime_bound_ = 0;
  PrimeKappa kappa_;
  long double tail_bound_ = 0;
  std::vector<Lattice> custom_removed_;
};

/// Membership of x ∈ Γ in V.
inline Verdict bfree_member(const BFreeSystem& sys, const RationalVector& x) {
  if (x.size() != sys.dim()) throw DomainError("dimension mismatch");
  if (!sys.gamma().contains(x)) throw DomainError("not in ambient lattice");
  switch (sys.family()) {
    case Family::visible: {
      IntegerVector v;
      for (const auto& c : x) v.push_back(exact::numerator(c));
      return visible_member(v) ? Verdict::in : Verdict::out;
    }
    case Family::kappa_free_integers:
      return kappa_free_member(exact::numerator(x[0]), sys.kappa()) ? Verdict::in : Verdict::out;
    case Family::custom:
      for (std::size_t i = 0; i < sys.truncation(); ++i)
        if (sys.removed_lattice(i).contains(x)) return Verdict::out;
      return sys.custom_tail_bound() == 0 ? Verdict::in : Verdict::undecided;
  }
  return Verdict::undecided;
}

/// dens(Γ) * prod_{i<=n} (1 - 1/N_i), exact.
inline Rational density_periodic(const BFreeSystem& sys, std::size_t n) {
  if (n > sys.truncation()) throw DomainError("truncation exceeded");
  if (sys.family() == Family::custom) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (!(exact::lattice_sum(sys.removed_lattice(i), sys.removed_lattice(j)) == sys.gamma()))
          throw DomainError("B2 violated: lattices " + std::to_string(i) + " and " + std::to_string(j) +
                            " are not coprime");
  }
  Rational d = sys.gamma().density();
  for (std::size_t i = 0; i < n; ++i) d *= Rational(sys.indices()[i] - 1, sys.indices()[i]);
  return d;
}

/// Built-in bound on sum_{i > N} 1/N_i for arithmetic families.
inline std::optional<long double> builtin_tail(const BFreeSystem& sys) {
  const long double x = static_cast<long double>(std::max<std::uint64_t>(sys.prime_bound(), 2));
  switch (sys.family()) {
    case Family::visible:
      return prime_tail_bound(static_cast<long double>(sys.dim()), x);
    case Family::kappa_free_integers: {
      long double t = 0;
      const Kappa def = sys.kappa().default_kappa();
      if (def != kKappaInfinity) t += prime_tail_bound(static_cast<long double>(def), x);
      for (const auto& [p, k] : sys.kappa().overrides())
        if (p > sys.prime_bound() && k != kKappaInfinity && k < def) t += std::pow(static_cast<long double>(p), -static_cast<long double>(k));
      return t;
    }
    case Family::custom:
      return sys.custom_tail_bound();
  }
  return std::nullopt;
}

/// Enclosure of the natural density lim dens(V_n). hi is the periodic density
/// at the truncation; lo accounts for all lattices beyond it through the tail.
inline Interval density_limit(const BFreeSystem& sys, std::optional<long double> tail_bound = std::nullopt) {
  long double tail = tail_bound ? *tail_bound : builtin_tail(sys).value_or(-1);
  if (tail < 0) throw DomainError("no tail bound available for this system");
  long double prod = exact::to_long_double(sys.gamma().density());
  for (const auto& n : sys.indices()) {
    long double nn = n.convert_to<long double>();
    prod *= 1 - 1 / nn;
  }
  return enclose_product(prod, sys.indices().size() + 1, tail);
}

}  // namespace bfspec::bfree
