#pragma once

#include "bfspec/empirical/sieve.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace bfspec::empirical {

/// Keep decisions for a parent set. Generator: std::mt19937_64 seeded with
/// `seed`; point i (in sieve order) is kept iff (draw_i >> 11) * 2^-53 < p.
struct ThinnedSet {
  double p = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> mask;

  std::size_t kept() const {
    std::size_t n = 0;
    for (auto m : mask) n += m;
    return n;
  }
};

inline ThinnedSet bernoulli_thin(const SievedSet& parent, double p, std::uint64_t seed) {
  if (!(p > 0 && p < 1)) throw ConfigError("thinning probability must lie in (0, 1)");
  ThinnedSet t{p, seed, std::vector<std::uint8_t>(parent.size())};
  std::mt19937_64 rng(seed);
  for (auto& m : t.mask) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    m = u < p;
  }
  return t;
}

/// The kept points as a sieved set over the same region.
inline SievedSet apply_mask(const SievedSet& parent, const ThinnedSet& t) {
  if (t.mask.size() != parent.size()) throw DomainError("mask length differs from the point count");
  SievedSet out = parent;
  out.coords.clear();
  out.points.clear();
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (!t.mask[i]) continue;
    out.coords.insert(out.coords.end(), parent.coord(i), parent.coord(i) + parent.dim);
    out.points.insert(out.points.end(), parent.point(i), parent.point(i) + parent.dim);
  }
  return out;
}

}  // namespace bfspec::empirical
