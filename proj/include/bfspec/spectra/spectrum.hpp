#pragma once

#include "bfspec/bfree/system.hpp"
#include "bfspec/errors.hpp"
#include "bfspec/exact/lattice.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bfspec::spectra {

using bfree::BFreeSystem;
using bfree::Family;
using bfree::Interval;
using exact::Integer;
using exact::IntMatrix;
using exact::Lattice;
using exact::RatMatrix;
using exact::Rational;
using exact::RationalVector;

/// Least q >= 1 with q k integral; den(0) = 1.
inline Integer denominator(const RationalVector& k) {
  Integer q = 1;
  for (const auto& c : k) q = exact::lcm(q, exact::denominator(c));
  return q;
}

/// Spectrum membership of k with the set D(k) of removed lattices (positions in
/// the system's list) that k needs.
struct Membership {
  bool in_spectrum = false;
  std::vector<std::size_t> support;
};

struct FbCoefficient {
  bool in_spectrum = false;
  std::vector<std::size_t> support;
  Rational factor;   // prod_{i in D(k)} 1/(1 - N_i); 0 off the spectrum
  Interval density;  // enclosure of dens(V)
  Interval value;    // enclosure of a(k) = dens(V) * factor

  /// |a(k)|^2 = dens(V)^2 * factor^2.
  Rational intensity_factor() const { return factor * factor; }
  Interval intensity() const {
    long double a = value.lo * value.lo, b = value.hi * value.hi;
    if (value.lo <= 0 && value.hi >= 0) return {0, std::max(a, b)};
    return {std::min(a, b), std::max(a, b)};
  }
};

inline Interval scale_interval(const Interval& iv, const Rational& s) {
  long double f = exact::to_long_double(s);
  long double a = iv.lo * f, b = iv.hi * f;
  // One rounding on each end; widen by an ulp-scale margin.
  long double pad = (std::fabs(a) + std::fabs(b)) * 4 * LDBL_EPSILON;
  return {std::min(a, b) - pad, std::max(a, b) + pad};
}

/// Spectrum data for a system over Z^d (or a custom Γ): L = sum of the duals of
/// the listed removed lattices, the density enclosure, and, for custom systems,
/// the duals needed to read off D(k).
class SpectrumContext {
 public:
  explicit SpectrumContext(const BFreeSystem& sys, std::optional<long double> tail = std::nullopt)
      : sys_(&sys), gamma_dual_(exact::dual_lattice(sys.gamma())), density_(bfree::density_limit(sys, tail)) {
    if (sys.family() == Family::custom) {
      bfree::density_periodic(sys, sys.truncation());
      for (std::size_t i = 0; i < sys.truncation(); ++i) duals_.push_back(exact::dual_lattice(sys.removed_lattice(i)));
      full_ = sum_except(duals_.size());
      for (std::size_t i = 0; i < duals_.size(); ++i) complements_.push_back(sum_except(i));
    }
  }

  const BFreeSystem& system() const { return *sys_; }
  const Lattice& gamma_dual() const { return gamma_dual_; }
  const Interval& density() const { return density_; }

  Membership classify(const RationalVector& k) const {
    if (k.size() != sys_->dim()) throw DomainError("dimension mismatch");
    switch (sys_->family()) {
      case Family::visible:
      case Family::kappa_free_integers: return classify_arithmetic(k);
      case Family::custom: return classify_custom(k);
    }
    return {};
  }

  FbCoefficient coefficient(const RationalVector& k) const {
    Membership m = classify(k);
    FbCoefficient c;
    c.in_spectrum = m.in_spectrum;
    c.support = m.support;
    c.density = density_;
    c.factor = 0;
    if (m.in_spectrum) {
      c.factor = 1;
      for (auto i : m.support) c.factor /= Rational(1 - sys_->indices()[i]);
    }
    c.value = scale_interval(density_, c.factor);
    return c;
  }

  /// Σ_{i in positions} Γ_i* + Γ*.
  Lattice spectrum_lattice(const std::vector<std::size_t>& positions) const {
    Lattice l = gamma_dual_;
    for (auto i : positions) l = exact::lattice_sum(l, exact::dual_lattice(sys_->removed_lattice(i)));
    return l;
  }

 private:
  Membership classify_arithmetic(const RationalVector& k) const {
    Membership m{true, {}};
    Integer q = denominator(k);
    if (q == 1) return m;
    for (const auto& [p, e] : bfree::factorize(q)) {
      auto pp = p.convert_to<std::uint64_t>();
      bfree::Kappa kap = sys_->family() == Family::visible ? 1 : sys_->kappa().at(pp);
      if (kap == bfree::kKappaInfinity || e > kap) {
        m.in_spectrum = false;
        m.support.clear();
        return m;
      }
      auto pos = sys_->position_of_prime(pp);
      if (!pos) throw DomainError("truncation exceeded: prime " + exact::to_string(p) + " of den(k) is beyond the bound");
      m.support.push_back(*pos);
    }
    std::sort(m.support.begin(), m.support.end());
    return m;
  }

  Membership classify_custom(const RationalVector& k) const {
    Membership m;
    if (!full_.contains(k)) {
      if (sys_->custom_tail_bound() > 0) throw DomainError("truncation exceeded: k lies outside the listed duals");
      return m;
    }
    m.in_spectrum = true;
    for (std::size_t i = 0; i < complements_.size(); ++i)
      if (!complements_[i].contains(k)) m.support.push_back(i);
    return m;
  }

  Lattice sum_except(std::size_t skip) const {
    Lattice l = gamma_dual_;
    for (std::size_t i = 0; i < duals_.size(); ++i)
      if (i != skip) l = exact::lattice_sum(l, duals_[i]);
    return l;
  }

  const BFreeSystem* sys_;
  Lattice gamma_dual_;
  Interval density_;
  std::vector<Lattice> duals_;
  Lattice full_ = Lattice::integer_lattice(1);
  std::vector<Lattice> complements_;
};

/// Convenience wrappers building a one-off context.
inline Membership in_spectrum(const BFreeSystem& sys, const RationalVector& k) { return SpectrumContext(sys).classify(k); }

inline FbCoefficient fb_coefficient(const BFreeSystem& sys, const RationalVector& k) {
  return SpectrumContext(sys).coefficient(k);
}

struct SpectrumPoint {
  RationalVector k;
  Integer den;
  FbCoefficient coeff;
};

struct SpectrumListing {
  Lattice lattice;                    // Σ Γ_i* + Γ* over the chosen positions
  std::vector<std::size_t> positions;
  std::vector<SpectrumPoint> points;  // ordered by den, then coordinates
  bool beyond_truncation = false;     // L^⊛ has points outside `lattice` in the region
};

inline constexpr std::size_t kSpectrumBudget = 4'000'000;

inline void canonical_order(std::vector<SpectrumPoint>& pts) {
  std::sort(pts.begin(), pts.end(), [](const SpectrumPoint& a, const SpectrumPoint& b) {
    if (a.den != b.den) return a.den < b.den;
    return a.k < b.k;
  });
}

/// Coset representatives of sup / sub (sub ⊆ sup), reduced into [0,1)^d in the
/// coordinates of sub.
inline std::vector<RationalVector> coset_representatives(const Lattice& sup, const Lattice& sub) {
  const std::size_t d = sup.dim();
  RatMatrix bs = sup.basis(), bsub = sub.basis(), bsub_inv = exact::inverse(bsub);
  RatMatrix rel = exact::inverse(bs) * bsub;
  if (!rel.is_integral()) throw DomainError("not a sublattice");
  IntMatrix h = exact::hnf(rel.scaled_to_integer(1));
  Integer count = 1;
  for (std::size_t i = 0; i < d; ++i) count *= h(i, i);
  if (count > kSpectrumBudget) throw BudgetError("spectrum enumeration needs " + exact::to_string(count) + " points");
  std::vector<RationalVector> out;
  out.reserve(count.convert_to<std::size_t>());
  // The box prod [0, h_ii) is a fundamental domain of Z^d mod hZ^d.
  std::vector<Integer> c(d, 0);
  while (true) {
    RationalVector coeff(d);
    for (std::size_t i = 0; i < d; ++i) coeff[i] = Rational(c[i]);
    RationalVector y = bsub_inv.apply(bs.apply(coeff));
    for (auto& v : y) v = exact::frac(v);
    out.push_back(bsub.apply(y));
    std::size_t i = 0;
    while (i < d && ++c[i] == h(i, i)) c[i++] = 0;
    if (i == d) break;
  }
  return out;
}

/// Torus variant: representatives of (Σ_{i ∈ positions} Γ_i* + Γ*) / Γ*.
inline SpectrumListing enumerate_spectrum_torus(const SpectrumContext& ctx, std::vector<std::size_t> positions) {
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  SpectrumListing out{ctx.spectrum_lattice(positions), positions, {}, false};
  for (auto& k : coset_representatives(out.lattice, ctx.gamma_dual())) {
    Integer den = denominator(k);
    FbCoefficient c = ctx.coefficient(k);
    out.points.push_back({std::move(k), std::move(den), std::move(c)});
  }
  canonical_order(out.points);
  return out;
}

/// Points of the lattice with Euclidean norm <= radius (closed ball).
inline std::vector<RationalVector> lattice_points_in_ball(const Lattice& l, const Rational& radius) {
  const std::size_t d = l.dim();
  RatMatrix b = l.basis();  // upper triangular
  const Rational r2 = radius * radius;
  std::vector<RationalVector> out;
  std::vector<Integer> y(d);
  // Fix y_{d-1}, ..., y_0 from the bottom: x_i = sum_{j >= i} b_ij y_j.
  auto rec = [&](auto&& self, std::size_t level, const Rational& used) -> void {
    const std::size_t i = level;
    Rational shift = 0;
    for (std::size_t j = i + 1; j < d; ++j) shift += b(i, j) * Rational(y[j]);
    Rational left = r2 - used;
    // |b_ii y_i + shift| <= sqrt(left): bracket by rationals and filter exactly.
    long double lim = std::sqrt(static_cast<long double>(exact::to_long_double(left))) + 1e-9L;
    long double bii = exact::to_long_double(b(i, i));
    long double s = exact::to_long_double(shift);
    auto lo = static_cast<long long>(std::floor((-lim - s) / bii)) - 1;
    auto hi = static_cast<long long>(std::ceil((lim - s) / bii)) + 1;
    if (out.size() + static_cast<std::size_t>(hi - lo) > kSpectrumBudget) throw BudgetError("ball enumeration too large");
    for (long long t = lo; t <= hi; ++t) {
      Rational x = b(i, i) * Rational(t) + shift;
      Rational u = used + x * x;
      if (u > r2) continue;
      y[i] = t;
      if (i == 0) {
        RationalVector coeff(d);
        for (std::size_t j = 0; j < d; ++j) coeff[j] = Rational(y[j]);
        out.push_back(b.apply(coeff));
      } else {
        self(self, i - 1, u);
      }
    }
  };
  rec(rec, d - 1, Rational(0));
  return out;
}

/// Ball variant: points of Σ_{i ∈ positions} Γ_i* + Γ* with |k| <= radius.
inline SpectrumListing enumerate_spectrum_ball(const SpectrumContext& ctx, std::vector<std::size_t> positions,
                                                const Rational& radius) {
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  SpectrumListing out{ctx.spectrum_lattice(positions), positions, {}, false};
  const BFreeSystem& sys = ctx.system();
  out.beyond_truncation = sys.is_arithmetic() || sys.custom_tail_bound() > 0 || positions.size() < sys.truncation();
  for (auto& k : lattice_points_in_ball(out.lattice, radius)) {
    Integer den = denominator(k);
    FbCoefficient c = ctx.coefficient(k);
    out.points.push_back({std::move(k), std::move(den), std::move(c)});
  }
  canonical_order(out.points);
  return out;
}

/// Positions of the removed lattices attached to the given primes.
inline std::vector<std::size_t> positions_for_primes(const BFreeSystem& sys, const std::vector<std::uint64_t>& primes) {
  std::vector<std::size_t> out;
  for (auto p : primes) {
    auto pos = sys.position_of_prime(p);
    if (!pos) throw DomainError("truncation exceeded: prime " + std::to_string(p) + " is not materialised");
    out.push_back(*pos);
  }
  return out;
}

inline std::string support_string(const BFreeSystem& sys, const std::vector<std::size_t>& support) {
  std::string s;
  for (auto i : support) {
    if (!s.empty()) s += ' ';
    s += std::to_string(sys.labels()[i]);
  }
  return s;
}

}  // namespace bfspec::spectra
