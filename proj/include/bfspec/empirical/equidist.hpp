#pragma once

#include "bfspec/bfree/system.hpp"
#include "bfspec/empirical/sieve.hpp"
#include "bfspec/errors.hpp"
#include "bfspec/quad/system.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bfspec::empirical {

/// Γ / Γ_i for one removed lattice, with residues encoded as integers in
/// [0, order). Code 0 is the zero class.
class ResidueGroup {
 public:
  /// Z^d / m Z^d.
  static ResidueGroup cyclic_power(std::size_t position, std::string label, std::size_t dim, std::int64_t modulus) {
    ResidueGroup g;
    g.position_ = position;
    g.label_ = std::move(label);
    g.dim_ = dim;
    g.modulus_ = modulus;
    g.order_ = 1;
    for (std::size_t j = 0; j < dim; ++j) {
      if (g.order_ > (1ULL << 40) / static_cast<std::uint64_t>(modulus)) throw BudgetError("residue group too large");
      g.order_ *= static_cast<std::uint64_t>(modulus);
    }
    return g;
  }

  /// O / A for an integral ideal A, coordinates in {1, ω}.
  static ResidueGroup ideal_quotient(std::size_t position, std::string label, const quad::IdealHnf64& h) {
    ResidueGroup g;
    g.position_ = position;
    g.label_ = std::move(label);
    g.dim_ = 2;
    g.ideal_ = h;
    g.is_ideal_ = true;
    g.order_ = static_cast<std::uint64_t>(h.a) * static_cast<std::uint64_t>(h.c);
    return g;
  }

  std::size_t position() const { return position_; }
  const std::string& label() const { return label_; }
  std::uint64_t order() const { return order_; }
  std::size_t dim() const { return dim_; }

  std::uint64_t code(const std::int64_t* x) const {
    if (is_ideal_) {
      auto [u, v] = ideal_.reduce(x[0], x[1]);
      return static_cast<std::uint64_t>(u) + static_cast<std::uint64_t>(ideal_.a) * static_cast<std::uint64_t>(v);
    }
    std::uint64_t c = 0, scale = 1;
    for (std::size_t j = 0; j < dim_; ++j) {
      std::int64_t r = x[j] % modulus_;
      if (r < 0) r += modulus_;
      c += static_cast<std::uint64_t>(r) * scale;
      scale *= static_cast<std::uint64_t>(modulus_);
    }
    return c;
  }

  std::uint64_t code(const std::vector<std::int64_t>& x) const {
    if (x.size() != dim_) throw ConfigError("residue for " + label_ + " needs " + std::to_string(dim_) + " entries");
    return code(x.data());
  }

  std::vector<std::int64_t> decode(std::uint64_t c) const {
    if (is_ideal_) {
      auto a = static_cast<std::uint64_t>(ideal_.a);
      return {static_cast<std::int64_t>(c % a), static_cast<std::int64_t>(c / a)};
    }
    std::vector<std::int64_t> x(dim_);
    for (auto& v : x) {
      v = static_cast<std::int64_t>(c % static_cast<std::uint64_t>(modulus_));
      c /= static_cast<std::uint64_t>(modulus_);
    }
    return x;
  }

 private:
  std::size_t position_ = 0;
  std::string label_;
  std::size_t dim_ = 1;
  std::int64_t modulus_ = 1;
  std::uint64_t order_ = 1;
  bool is_ideal_ = false;
  quad::IdealHnf64 ideal_;
};

/// Groups for the first n removed lattices of a visible / kappa-free system.
inline std::vector<ResidueGroup> residue_groups(const BFreeSystem& sys, std::size_t n) {
  if (!sys.is_arithmetic()) throw DomainError("equidistribution needs visible points or kappa-free integers");
  if (n > sys.truncation()) throw DomainError("truncation exceeded");
  std::vector<ResidueGroup> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto m = bfree::ipow(exact::Integer(sys.labels()[i]), sys.exponents()[i]);
    out.push_back(ResidueGroup::cyclic_power(i, std::to_string(sys.labels()[i]), sys.dim(), exact::to_int64(m)));
  }
  return out;
}

/// Groups O / 𝔭^κ for the given removed positions of a quadratic system.
inline std::vector<ResidueGroup> residue_groups(const quad::QuadKappaSystem& sys, const std::vector<std::size_t>& positions) {
  std::vector<ResidueGroup> out;
  for (auto i : positions) {
    const auto& r = sys.removed().at(i);
    out.push_back(ResidueGroup::ideal_quotient(i, r.prime.handle.str(), quad::IdealHnf64::from(r.power)));
  }
  return out;
}

struct CylinderConstraint {
  std::size_t position = 0;                       // removed-lattice position
  std::vector<std::vector<std::int64_t>> residues;  // allowed classes U_i
};

/// Cylinder set fixing finitely many coordinates; no constraints = whole group.
struct Cylinder {
  std::string label;
  std::vector<CylinderConstraint> constraints;
};

struct EquidistRow {
  std::string label;
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  double observed = 0;
  double expected = 0;  // ν(W ∩ C) / ν(W) = prod |U_i ∩ W_i| / |W_i|, W_i = G_i \ {0}
};

inline constexpr std::uint64_t kHistogramBudget = 20'000'000;

/// Frequencies of the ⋆-images of the sieve points (their classes modulo each
/// Γ_i) in the given cylinders, against the exact Haar ratios.
inline std::vector<EquidistRow> equidist_check(const SievedSet& s, const std::vector<ResidueGroup>& groups,
                                               const std::vector<Cylinder>& cylinders) {
  std::map<std::size_t, std::size_t> slot;
  for (std::size_t g = 0; g < groups.size(); ++g) slot[groups[g].position()] = g;
  for (const auto& g : groups)
    if (g.dim() != s.dim) throw DomainError("residue group dimension differs from the point set");

  // Codes per point and group.
  const std::size_t n = s.size();
  std::vector<std::vector<std::uint64_t>> codes(groups.size(), std::vector<std::uint64_t>(n));
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t i = 0; i < n; ++i) codes[g][i] = groups[g].code(s.coord(i));

  std::map<std::vector<std::size_t>, std::vector<std::uint64_t>> histograms;
  std::vector<EquidistRow> rows;
  for (const auto& cyl : cylinders) {
    EquidistRow row{cyl.label, 0, n, 0, 1};
    std::vector<std::size_t> involved;
    std::vector<std::vector<std::uint64_t>> allowed;
    for (const auto& c : cyl.constraints) {
      auto it = slot.find(c.position);
      if (it == slot.end()) throw DomainError("cylinder '" + cyl.label + "' references a lattice beyond the first N");
      const ResidueGroup& g = groups[it->second];
      std::vector<std::uint64_t> codes_u;
      for (const auto& r : c.residues) codes_u.push_back(g.code(r));
      std::sort(codes_u.begin(), codes_u.end());
      codes_u.erase(std::unique(codes_u.begin(), codes_u.end()), codes_u.end());
      auto nonzero = static_cast<double>(codes_u.size() - std::count(codes_u.begin(), codes_u.end(), 0ULL));
      row.expected *= nonzero / static_cast<double>(g.order() - 1);
      involved.push_back(it->second);
      allowed.push_back(std::move(codes_u));
    }
    if (involved.empty()) {
      row.hits = n;
    } else {
      // Joint histogram over the involved groups, shared between cylinders.
      std::vector<std::size_t> order(involved.size());
      for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return involved[a] < involved[b]; });
      std::vector<std::size_t> key;
      std::vector<std::vector<std::uint64_t>> sorted_allowed;
      for (auto j : order) {
        if (!key.empty() && key.back() == involved[j]) throw ConfigError("cylinder '" + cyl.label + "' constrains a lattice twice");
        key.push_back(involved[j]);
        sorted_allowed.push_back(allowed[j]);
      }
      std::uint64_t size = 1;
      for (auto g : key) {
        if (size > kHistogramBudget / groups[g].order()) throw BudgetError("joint cylinder histogram too large");
        size *= groups[g].order();
      }
      auto& hist = histograms[key];
      if (hist.empty()) {
        hist.assign(size, 0);
        for (std::size_t i = 0; i < n; ++i) {
          std::uint64_t c = 0, scale = 1;
          for (auto g : key) {
            c += codes[g][i] * scale;
            scale *= groups[g].order();
          }
          ++hist[c];
        }
      }
      // Sum the histogram over the product of allowed classes.
      std::vector<std::size_t> idx(key.size(), 0);
      bool empty = false;
      for (const auto& a : sorted_allowed) empty |= a.empty();
      while (!empty) {
        std::uint64_t c = 0, scale = 1;
        for (std::size_t j = 0; j < key.size(); ++j) {
          c += sorted_allowed[j][idx[j]] * scale;
          scale *= groups[key[j]].order();
        }
        row.hits += hist[c];
        std::size_t j = 0;
        while (j < key.size() && ++idx[j] == sorted_allowed[j].size()) idx[j++] = 0;
        if (j == key.size()) break;
      }
    }
    row.observed = n == 0 ? 0 : static_cast<double>(row.hits) / static_cast<double>(n);
    rows.push_back(row);
  }
  return rows;
}

/// One cylinder per nonzero class of each group.
inline std::vector<Cylinder> single_class_cylinders(const std::vector<ResidueGroup>& groups) {
  std::vector<Cylinder> out;
  for (const auto& g : groups)
    for (std::uint64_t c = 1; c < g.order(); ++c) {
      auto r = g.decode(c);
      std::string label = g.label() + ":(";
      for (std::size_t j = 0; j < r.size(); ++j) label += (j ? "," : "") + std::to_string(r[j]);
      out.push_back({label + ")", {{g.position(), {r}}}});
    }
  return out;
}

/// One cylinder per pair of nonzero classes for each pair of groups.
inline std::vector<Cylinder> pair_class_cylinders(const std::vector<ResidueGroup>& groups) {
  std::vector<Cylinder> out;
  auto singles = single_class_cylinders(groups);
  for (std::size_t a = 0; a < singles.size(); ++a)
    for (std::size_t b = a + 1; b < singles.size(); ++b) {
      const auto& ca = singles[a].constraints[0];
      const auto& cb = singles[b].constraints[0];
      if (ca.position == cb.position) continue;
      out.push_back({singles[a].label + "&" + singles[b].label, {ca, cb}});
    }
  return out;
}

/// The cylinder of the whole product group (every class allowed at one lattice).
inline Cylinder whole_group_cylinder(const ResidueGroup& g) {
  CylinderConstraint c{g.position(), {}};
  for (std::uint64_t code = 0; code < g.order(); ++code) c.residues.push_back(g.decode(code));
  return {"all:" + g.label(), {c}};
}

}  // namespace bfspec::empirical
