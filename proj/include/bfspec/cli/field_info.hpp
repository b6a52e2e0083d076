#pragma once

#include "bfspec/quad/dual.hpp"
#include "bfspec/quad/primes.hpp"

#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>

namespace bfspec::cli {

/// Symbol for ω in printed elements: i for Z[i], τ for real fields with the
/// half-integral basis, ω otherwise.
inline std::string omega_symbol(const quad::QuadField& f) {
  if (f.d() == -1) return "i";
  if (!f.imaginary() && f.omega_half()) return "τ";
  return "ω";
}

/// Integral element a + bω written with its positive term first ("2τ-1", "1+i").
inline std::string format_element(const quad::QuadElem& x, const std::string& sym) {
  auto ws = [&](const exact::Rational& b) {
    if (b == 1) return sym;
    if (b == -1) return "-" + sym;
    return exact::to_string(b) + sym;
  };
  if (x.b == 0) return exact::to_string(x.a);
  if (x.a == 0) return ws(x.b);
  const std::string a = exact::to_string(x.a);
  if (x.a > 0 && x.b < 0) return a + ws(x.b);
  if (x.a < 0 && x.b > 0) return ws(x.b) + a;
  if (x.a > 0) return a + "+" + ws(x.b);
  return ws(x.b) + a;  // both negative
}

/// A small generator of a principal ideal, preferring ones whose square is
/// ±p exactly when `square_target` is set.
inline std::optional<quad::QuadElem> find_generator(const quad::QuadIdeal& ideal, const exact::Integer& norm,
                                                    std::optional<std::int64_t> square_target = std::nullopt) {
  const auto& f = ideal.field();
  std::optional<quad::QuadElem> best;
  long best_score = 0;
  bool best_exact = false;
  const long box = 40;
  for (long u = -box; u <= box; ++u)
    for (long v = -box; v <= box; ++v) {
      quad::QuadElem x(f, u, v);
      if (exact::abs(x.norm()) != exact::Rational(norm)) continue;
      if (!ideal.contains(x)) continue;
      if (!(quad::QuadIdeal::principal(x) == ideal)) continue;
      bool exact_sq = false;
      if (square_target) {
        quad::QuadElem sq = x * x;
        exact_sq = sq.b == 0 && exact::abs(sq.a) == exact::Rational(*square_target);
      }
      // Shortest first, then fewest negative coefficients.
      long score = 4 * (std::labs(u) + std::labs(v)) + (u < 0) + (v < 0);
      if (!best || (exact_sq && !best_exact) || (exact_sq == best_exact && score < best_score)) {
        best = x;
        best_score = score;
        best_exact = exact_sq;
      }
    }
  return best;
}

inline std::string unit_group(const quad::QuadField& f) {
  if (!f.imaginary()) return "C2 x Cinf";
  if (f.d() == -1) return "C4";
  if (f.d() == -3) return "C6";
  return "C2";
}

/// Human-readable report: ring of integers, basis matrix, dual order and the
/// splitting of small primes.
inline void write_field_info(std::ostream& os, const quad::QuadField& f, std::int64_t prime_limit = 30) {
  const std::string w = omega_symbol(f);
  const std::int64_t d = f.d();
  os << "field: Q(sqrt(" << d << "))\n";
  os << "discriminant: " << f.discriminant() << "\n";
  std::string root = d < 0 ? (d == -1 ? "i" : "i*sqrt(" + std::to_string(-d) + ")") : "sqrt(" + std::to_string(d) + ")";
  os << "ring of integers: Z[" << w << "]";
  if (w != root) os << ", " << w << " = " << (f.omega_half() ? "(1+" + root + ")/2" : root);
  os << "\n";
  os << w << "^2 = " << format_element(quad::QuadElem(f, f.s(), f.t()), w) << "\n";
  os << "unit group: " << unit_group(f) << "\n";
  auto b = quad::basis_matrix(f);
  os << "basis matrix (columns 1, " << w << "): [[" << b[0][0].str() << ", " << b[0][1].str() << "], [" << b[1][0].str() << ", "
     << b[1][1].str() << "]]\n";
  auto od = quad::dual_order(f);
  os << "dual order: O* = " << od.symbolic << " * O\n";
  os << "splitting (p < " << prime_limit << "):\n";
  for (std::uint32_t p : bfree::PrimeTable::instance().primes_up_to(static_cast<std::uint64_t>(prime_limit - 1))) {
    auto s = quad::split_type(p, f);
    os << "  " << p << ": " << quad::split_name(s.kind);
    if (s.kind == quad::SplitKind::inert) {
      os << ", (" << p << ") prime of norm " << p * p << "\n";
      continue;
    }
    for (const auto& pi : s.ideals) os << ", " << pi.ideal.str() << " [" << pi.handle.str() << "]";
    auto g = find_generator(s.ideals[0].ideal, s.ideals[0].norm, s.kind == quad::SplitKind::ramified ? std::optional<std::int64_t>(p) : std::nullopt);
    if (g) {
      std::string gs = format_element(*g, w);
      if (s.kind == quad::SplitKind::ramified) {
        quad::QuadElem unit = quad::QuadElem(f, p) / (*g * *g);
        std::string u = unit == quad::QuadElem(f, 1) ? "" : (unit == quad::QuadElem(f, -1) ? "-" : format_element(unit, w) + "*");
        os << "; " << p << " = " << u << "(" << gs << ")²";
      } else {
        os << "; generator " << gs;
      }
    } else {
      os << "; non-principal";
    }
    os << "\n";
  }
}

}  // namespace bfspec::cli
