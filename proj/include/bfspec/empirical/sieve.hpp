#pragma once

#include "bfspec/bfree/primes.hpp"
#include "bfspec/bfree/system.hpp"
#include "bfspec/errors.hpp"
#include "bfspec/quad/system.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace bfspec::empirical {

using bfree::BFreeSystem;
using bfree::Family;

enum class Region { ball, cube };

struct SieveOptions {
  Region region = Region::ball;
  // Sieve t + V instead of V: points y = x + t with y in the region.
  std::vector<std::int64_t> shift;
};

/// Points of V (or t + V) in the closed ball / cube of radius r. `coords` are
/// integer coordinates of the underlying lattice point x (in the basis of Γ, or
/// {1, ω} for quadratic fields); `points` are the positions y = θ(x) + t in R^d.
struct SievedSet {
  std::string system;
  std::size_t dim = 0;
  double radius = 0;
  Region region = Region::ball;
  double volume = 0;
  std::vector<std::int64_t> shift;
  std::vector<std::int64_t> coords;
  std::vector<double> points;

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
  const std::int64_t* coord(std::size_t i) const { return coords.data() + i * dim; }
  const double* point(std::size_t i) const { return points.data() + i * dim; }
};

inline double ball_volume(std::size_t d, double r) {
  const double dd = static_cast<double>(d);
  return std::pow(M_PI, dd / 2) * std::pow(r, dd) / std::tgamma(dd / 2 + 1);
}

inline double region_volume(Region region, std::size_t d, double r) {
  return region == Region::ball ? ball_volume(d, r) : std::pow(2 * r, static_cast<double>(d));
}

inline constexpr std::uint64_t kPointBudget = 200'000'000;

namespace detail {

inline std::vector<std::int64_t> resolved_shift(const SieveOptions& opt, std::size_t d) {
  if (opt.shift.empty()) return std::vector<std::int64_t>(d, 0);
  if (opt.shift.size() != d) throw ConfigError("shift must have one entry per dimension");
  return opt.shift;
}

// Calls f(y) for every integer vector y with y in the region (closed); y is the
// shifted position, so the lattice point is y - t.
template <class F>
void for_each_integer_point(std::size_t d, double r, Region region, F&& f) {
  const auto R = static_cast<std::int64_t>(std::floor(r));
  const long double r2 = static_cast<long double>(r) * r;
  std::vector<std::int64_t> y(d);
  auto rec = [&](auto&& self, std::size_t i, long double used) -> void {
    std::int64_t lim = R;
    if (region == Region::ball) {
      long double left = r2 - used;
      lim = static_cast<std::int64_t>(std::floor(std::sqrt(left)));
      while (static_cast<long double>(lim + 1) * (lim + 1) <= left) ++lim;
      while (lim >= 0 && static_cast<long double>(lim) * lim > left) --lim;
      if (lim < 0) return;
    }
    for (std::int64_t t = -lim; t <= lim; ++t) {
      y[i] = t;
      long double u = used + static_cast<long double>(t) * t;
      if (i + 1 == d)
        f(y);
      else
        self(self, i + 1, u);
    }
  };
  rec(rec, 0, 0);
}

inline std::uint64_t estimated_count(std::size_t d, double r) { return static_cast<std::uint64_t>(std::pow(2 * r + 1, static_cast<double>(d))); }

}  // namespace detail

/// Visible points, kappa-free integers, custom systems over Γ.
inline SievedSet sieve_ball(const BFreeSystem& sys, double r, const SieveOptions& opt = {}) {
  if (!(r > 0)) throw ConfigError("radius must be positive");
  const std::size_t d = sys.dim();
  SievedSet out{sys.name(), d, r, opt.region, region_volume(opt.region, d, r), detail::resolved_shift(opt, d), {}, {}};
  if (detail::estimated_count(d, r) > kPointBudget) throw BudgetError("sieve region holds more than 2e8 lattice points");
  const auto& t = out.shift;

  if (sys.family() == Family::visible) {
    std::vector<std::int64_t> x(d);
    detail::for_each_integer_point(d, r, opt.region, [&](const std::vector<std::int64_t>& y) {
      for (std::size_t j = 0; j < d; ++j) x[j] = y[j] - t[j];
      if (!bfree::visible_member(x)) return;
      for (std::size_t j = 0; j < d; ++j) {
        out.coords.push_back(x[j]);
        out.points.push_back(static_cast<double>(y[j]));
      }
    });
    return out;
  }

  if (sys.family() == Family::kappa_free_integers) {
    // Interval sieve over |x| <= R' covering every lattice point x = y - t.
    const auto R = static_cast<std::int64_t>(std::floor(r));
    const std::int64_t lo = -R - t[0], hi = R - t[0];
    const std::int64_t span = std::max(std::llabs(lo), std::llabs(hi));
    std::vector<std::uint8_t> bad(static_cast<std::size_t>(span) + 1, 0);
    bad[0] = sys.kappa().min_kappa() != bfree::kKappaInfinity;
    const auto& table = bfree::PrimeTable::instance();
    if (span > 0) {
      // Only primes with p^kappa <= span can remove anything.
      auto limited = [&](std::uint64_t p, bfree::Kappa k) -> std::int64_t {
        if (k == bfree::kKappaInfinity) return 0;
        __int128 m = 1;
        for (bfree::Kappa e = 0; e < k; ++e) {
          m *= p;
          if (m > span) return 0;
        }
        return static_cast<std::int64_t>(m);
      };
      const bfree::Kappa kmin = sys.kappa().min_kappa();
      const auto pmax = static_cast<std::uint64_t>(std::pow(static_cast<long double>(span), 1.0L / std::max<bfree::Kappa>(kmin, 1)) + 2);
      if (pmax > bfree::PrimeTable::kLimit) throw BudgetError("interval sieve needs primes beyond the table");
      for (std::uint32_t p : table.primes_up_to(pmax)) {
        std::int64_t m = limited(p, sys.kappa().at(p));
        if (m == 0) continue;
        for (std::int64_t n = m; n <= span; n += m) bad[n] = 1;
      }
    }
    for (std::int64_t y = -R; y <= R; ++y) {
      std::int64_t x = y - t[0];
      if (bad[static_cast<std::size_t>(std::llabs(x))]) continue;
      out.coords.push_back(x);
      out.points.push_back(static_cast<double>(y));
    }
    return out;
  }

  // Custom: lattice points of Γ with exact membership; any undecided point is fatal.
  const exact::RatMatrix b = sys.gamma().basis();
  std::vector<double> bd(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) bd[i * d + j] = exact::to_double(b(i, j));
  // Removed lattices in Γ-coordinates: integral upper-triangular HNFs, tested in int64.
  const exact::RatMatrix binv = exact::inverse(b);
  std::vector<std::vector<std::int64_t>> sub;
  for (std::size_t l = 0; l < sys.truncation(); ++l) {
    exact::Lattice m = exact::Lattice::from_basis(binv * sys.removed_lattice(l).basis());
    if (m.denominator() != 1) throw DomainError("removed lattice is not contained in the ambient lattice");
    std::vector<std::int64_t> h(d * d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) h[i * d + j] = exact::to_int64(m.hnf_basis()(i, j));
    sub.push_back(std::move(h));
  }
  auto in_sub = [&](const std::vector<std::int64_t>& h, const std::vector<std::int64_t>& c) {
    std::vector<__int128> y(d);
    for (std::size_t step = 0; step < d; ++step) {
      const std::size_t i = d - 1 - step;
      __int128 rhs = c[i];
      for (std::size_t j = i + 1; j < d; ++j) rhs -= static_cast<__int128>(h[i * d + j]) * y[j];
      if (rhs % h[i * d + i] != 0) return false;
      y[i] = rhs / h[i * d + i];
    }
    return true;
  };
  const bool decided = sys.custom_tail_bound() == 0;
  std::vector<std::int64_t> c(d);
  // The HNF basis is upper triangular, so coordinate i is fixed by c_i given c_{i+1..}.
  auto rec = [&](auto&& self, std::size_t level) -> void {
    const std::size_t i = d - 1 - level;
    double shift_i = 0;
    for (std::size_t j = i + 1; j < d; ++j) shift_i += bd[i * d + j] * static_cast<double>(c[j]);
    double bii = bd[i * d + i];
    auto lo = static_cast<std::int64_t>(std::floor((-r - 1 - shift_i - static_cast<double>(t[i])) / bii)) - 1;
    auto hi = static_cast<std::int64_t>(std::ceil((r + 1 - shift_i - static_cast<double>(t[i])) / bii)) + 1;
    for (std::int64_t v = lo; v <= hi; ++v) {
      c[i] = v;
      if (i == 0) {
        long double n2 = 0, linf = 0;
        std::vector<double> y(d);
        for (std::size_t j = 0; j < d; ++j) {
          long double acc = 0;
          for (std::size_t k = j; k < d; ++k) acc += static_cast<long double>(bd[j * d + k]) * c[k];
          y[j] = static_cast<double>(acc) + static_cast<double>(t[j]);
          n2 += static_cast<long double>(y[j]) * y[j];
          linf = std::max<long double>(linf, std::fabs(y[j]));
        }
        bool inside = opt.region == Region::ball ? n2 <= static_cast<long double>(r) * r : linf <= r;
        if (!inside) continue;
        bool removed = false;
        for (const auto& h : sub)
          if ((removed = in_sub(h, c))) break;
        if (removed) continue;
        if (!decided) throw BudgetError("membership undecided at a sieve point; the custom family needs tail 0");
        for (std::size_t j = 0; j < d; ++j) {
          out.coords.push_back(c[j]);
          out.points.push_back(y[j]);
        }
      } else {
        self(self, level + 1);
      }
    }
  };
  rec(rec, 0);
  return out;
}

/// κ-free integers of a quadratic field; imaginary fields use N(x) <= r^2, real
/// fields the Minkowski norm tr(x^2) = x^2 + x'^2 <= r^2, both exact in integers.
inline SievedSet sieve_ball(const quad::QuadKappaSystem& sys, double r, const SieveOptions& opt = {}) {
  if (!(r > 0)) throw ConfigError("radius must be positive");
  const auto& f = sys.field();
  SievedSet out{sys.name(), 2, r, opt.region, region_volume(opt.region, 2, r), detail::resolved_shift(opt, 2), {}, {}};
  if (!out.shift.empty() && (out.shift[0] != 0 || out.shift[1] != 0))
    throw ConfigError("shifted sieves are supported for Z^d systems only");
  if (r * r > 1e12) throw BudgetError("norms up to r^2 exceed the factorisation budget 1e12");
  const auto emb = quad::omega_embedding(f);
  const long double r2 = static_cast<long double>(r) * r;
  const long double s = f.s(), tt = f.t();
  // Exact squared radius of u + vω in integers (or halves for the imaginary half basis).
  auto norm2 = [&](std::int64_t u, std::int64_t v) -> long double {
    long double uu = u, vv = v;
    if (f.imaginary()) return uu * uu + uu * vv * tt - vv * vv * s;  // N(x) = |x|^2
    // tr(x^2) = 2u^2 + 2uv t + v^2 (t^2 + 2s)
    return 2 * uu * uu + 2 * uu * vv * tt + vv * vv * (tt * tt + 2 * s);
  };
  auto inside = [&](std::int64_t u, std::int64_t v) {
    if (opt.region == Region::ball) return norm2(u, v) <= r2;
    long double x0 = u * emb[0][0] + v * emb[1][0], x1 = u * emb[0][1] + v * emb[1][1];
    return std::fabs(x0) <= r && std::fabs(x1) <= r;
  };
  // Bounds on v from the second embedded coordinate (imaginary) or x - x' (real).
  long double vspan = f.imaginary() ? r / emb[1][1] : std::sqrt(2.0L) * r / (emb[1][0] - emb[1][1]);
  if (opt.region == Region::cube) vspan *= std::sqrt(2.0L);
  const auto vmax = static_cast<std::int64_t>(std::ceil(vspan)) + 1;
  if (static_cast<long double>(2 * vmax + 1) * (2 * vmax + 1) * 4 > kPointBudget) throw BudgetError("quadratic sieve region too large");
  for (std::int64_t v = -vmax; v <= vmax; ++v) {
    // Real parts x + x' = 2u + vt (real) or Re = u + v t/2 (imaginary).
    long double centre = -v * tt / 2;
    long double half = f.imaginary() ? r : std::sqrt(2.0L) * r / 2;
    if (opt.region == Region::cube) half *= std::sqrt(2.0L);
    auto ulo = static_cast<std::int64_t>(std::floor(centre - half)) - 1;
    auto uhi = static_cast<std::int64_t>(std::ceil(centre + half)) + 1;
    for (std::int64_t u = ulo; u <= uhi; ++u) {
      if (!inside(u, v)) continue;
      if (!sys.member(u, v)) continue;
      out.coords.push_back(u);
      out.coords.push_back(v);
      out.points.push_back(static_cast<double>(u * emb[0][0] + v * emb[1][0]));
      out.points.push_back(static_cast<double>(u * emb[0][1] + v * emb[1][1]));
    }
  }
  return out;
}

inline double empirical_density(const SievedSet& s) { return s.volume > 0 ? static_cast<double>(s.size()) / s.volume : 0; }

}  // namespace bfspec::empirical
