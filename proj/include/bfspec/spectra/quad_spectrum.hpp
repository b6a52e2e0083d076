#pragma once

#include "bfspec/errors.hpp"
#include "bfspec/quad/dual.hpp"
#include "bfspec/quad/system.hpp"
#include "bfspec/spectra/spectrum.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace bfspec::spectra {

using quad::QuadElem;
using quad::QuadIdeal;
using quad::QuadKappaSystem;

/// Spectrum of κ-free integers of a quadratic field. Frequencies are field
/// elements k = prefactor * m with O* = prefactor * O; k lies in L^⊛ iff the
/// denominator ideal of m is (κ+1)-free, where the exponent at 𝔮 is taken from
/// the conjugate prime for imaginary fields and from 𝔮 itself for real ones.
class QuadSpectrumContext {
 public:
  explicit QuadSpectrumContext(const QuadKappaSystem& sys, std::uint64_t norm_bound = 1'000'000)
      : sys_(&sys), dual_(quad::dual_order(sys.field())), density_(quad::quad_density_limit(sys, norm_bound)) {}

  const QuadKappaSystem& system() const { return *sys_; }
  const quad::DualOrder& dual_order() const { return dual_; }
  const Interval& density() const { return density_; }

  QuadElem core_of(const QuadElem& k) const { return k / dual_.prefactor; }
  QuadElem frequency_of(const QuadElem& m) const { return dual_.prefactor * m; }

  struct Classified {
    Membership membership;
    Integer den_norm = 1;  // norm of the denominator ideal of m
  };

  Classified classify_core(const QuadElem& m) const {
    Classified out;
    out.membership.in_spectrum = true;
    if (m.is_zero() || m.is_integral()) return out;
    const bool imag = sys_->field().imaginary();
    Integer n = exact::lcm(exact::denominator(m.a), exact::denominator(m.b));
    for (const auto& [p, e] : bfree::factorize(n)) {
      auto split = quad::split_type(p.convert_to<std::int64_t>(), sys_->field());
      for (const auto& q : split.ideals) {
        long long v = quad::valuation(m, q);
        if (v >= 0) continue;
        quad::PrimeHandle removed = imag ? quad::conjugate_handle(q.handle, split.kind) : q.handle;
        bfree::Kappa kap = sys_->kappa().at(removed);
        if (kap == bfree::kKappaInfinity || static_cast<unsigned long long>(-v) > kap) {
          out.membership = {};
          out.den_norm = 1;
          return out;
        }
        auto pos = position_of(removed);
        if (!pos) throw DomainError("truncation exceeded: prime ideal " + removed.str() + " is beyond the bound");
        out.membership.support.push_back(*pos);
        out.den_norm *= bfree::ipow(q.norm, static_cast<unsigned>(-v));
      }
    }
    std::sort(out.membership.support.begin(), out.membership.support.end());
    return out;
  }

  FbCoefficient coefficient_core(const QuadElem& m) const {
    Classified c = classify_core(m);
    FbCoefficient f;
    f.in_spectrum = c.membership.in_spectrum;
    f.support = c.membership.support;
    f.density = density_;
    f.factor = f.in_spectrum ? 1 : 0;
    for (auto i : f.support) f.factor /= Rational(1 - sys_->removed()[i].index);
    f.value = scale_interval(density_, f.factor);
    return f;
  }

  FbCoefficient coefficient(const QuadElem& k) const { return coefficient_core(core_of(k)); }

  /// The lattice prefactor^{-1} (O* + Σ_{i ∈ positions} (𝔭_i^κ)*) as an ideal:
  /// the product of 𝔭̄_i^{-κ} (imaginary) or 𝔭_i^{-κ} (real).
  QuadIdeal core_lattice(const std::vector<std::size_t>& positions) const {
    QuadIdeal m = QuadIdeal::unit(sys_->field());
    for (auto i : positions) {
      const auto& r = sys_->removed().at(i);
      QuadIdeal base = sys_->field().imaginary() ? quad::ideal_conj(r.prime.ideal) : r.prime.ideal;
      m = quad::ideal_add(m, quad::ideal_pow(base, -static_cast<long long>(r.kappa)));
    }
    return m;
  }

  std::optional<std::size_t> position_of(const quad::PrimeHandle& h) const {
    const auto& rem = sys_->removed();
    for (std::size_t i = 0; i < rem.size(); ++i)
      if (rem[i].prime.handle == h) return i;
    return std::nullopt;
  }

 private:
  const QuadKappaSystem* sys_;
  quad::DualOrder dual_;
  Interval density_;
};

struct QuadSpectrumPoint {
  QuadElem core;                  // m
  QuadElem k;                     // prefactor * m
  Integer den_norm;
  std::array<Rational, 2> bt;     // B^T θ(k) = (<1, k>, <ω, k>), exact
  std::array<long double, 2> embedded;
  FbCoefficient coeff;
};

struct QuadSpectrumListing {
  QuadIdeal core_lattice;
  QuadIdeal lattice;  // prefactor * core_lattice
  std::vector<std::size_t> positions;
  std::vector<QuadSpectrumPoint> points;
};

/// Representatives of (prefactor * M) / O* with M = core_lattice(positions),
/// taken in [0,1)^2 with respect to {1, ω} before scaling.
inline QuadSpectrumListing enumerate_quad_spectrum_torus(const QuadSpectrumContext& ctx, std::vector<std::size_t> positions) {
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  const auto& f = ctx.system().field();
  QuadIdeal core = ctx.core_lattice(positions);
  QuadSpectrumListing out{core, quad::ideal_scale(ctx.dual_order().prefactor, core), positions, {}};
  auto zb = core.z_basis();
  RatMatrix b(2, 2, {zb[0].a, zb[1].a, zb[0].b, zb[1].b});
  const QuadElem one(f, 1), w = QuadElem::omega(f);
  for (auto& coords : coset_representatives(Lattice::from_basis(b), Lattice::integer_lattice(2))) {
    QuadElem m(f, coords[0], coords[1]);
    QuadElem k = ctx.frequency_of(m);
    auto cls = ctx.classify_core(m);
    QuadSpectrumPoint pt{m, k, cls.den_norm, {quad::bilinear(one, k), quad::bilinear(w, k)}, quad::embed(k),
                         ctx.coefficient_core(m)};
    out.points.push_back(std::move(pt));
  }
  std::sort(out.points.begin(), out.points.end(), [](const QuadSpectrumPoint& x, const QuadSpectrumPoint& y) {
    if (x.den_norm != y.den_norm) return x.den_norm < y.den_norm;
    if (x.core.a != y.core.a) return x.core.a < y.core.a;
    return x.core.b < y.core.b;
  });
  return out;
}

/// Positions of all removed prime ideals above the given rational primes.
inline std::vector<std::size_t> quad_positions_for_primes(const QuadKappaSystem& sys, const std::vector<std::uint64_t>& primes) {
  std::vector<std::size_t> out;
  for (auto p : primes) {
    if (p > sys.prime_bound()) throw DomainError("truncation exceeded: prime " + std::to_string(p) + " is beyond the bound");
    for (std::size_t i = 0; i < sys.removed().size(); ++i)
      if (static_cast<std::uint64_t>(sys.removed()[i].prime.handle.p) == p) out.push_back(i);
  }
  return out;
}

}  // namespace bfspec::spectra
