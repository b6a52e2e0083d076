#pragma once

#include "bfspec/quad/field.hpp"
#include "bfspec/quad/ideal.hpp"

#include <array>
#include <cmath>
#include <string>

namespace bfspec::quad {

/// r + q sqrt(m), kept exact for display of basis matrices.
struct Surd {
  Rational rational;
  Rational irrational;
  std::int64_t radicand = 1;

  long double value() const {
    return exact::to_long_double(rational) +
           exact::to_long_double(irrational) * std::sqrt(static_cast<long double>(radicand));
  }

  std::string str() const {
    if (radicand == 1) return exact::to_string(rational + irrational);
    std::string out;
    if (rational != 0 || irrational == 0) out = exact::to_string(rational);
    if (irrational != 0) {
      std::string coeff = exact::to_string(irrational < 0 ? Rational(-irrational) : irrational);
      std::string term = (coeff == "1" ? "" : coeff + "*") + "sqrt(" + std::to_string(radicand) + ")";
      if (out.empty())
        out = (irrational < 0 ? "-" : "") + term;
      else
        out += (irrational < 0 ? "-" : "+") + term;
    }
    return out;
  }
};

/// Basis matrix with columns the images of 1 and ω: (Re, Im) for imaginary
/// fields, the Minkowski embedding (x, x') for real ones.
inline std::array<std::array<Surd, 2>, 2> basis_matrix(const QuadField& f) {
  const std::int64_t m = f.delta();
  std::array<std::array<Surd, 2>, 2> b;
  for (auto& row : b)
    for (auto& e : row) e.radicand = m;
  b[0][0].rational = 1;
  if (f.imaginary()) {
    if (f.omega_half()) {
      b[0][1].rational = Rational(1, 2);
      b[1][1].irrational = Rational(1, 2);
    } else {
      b[1][1].irrational = 1;
    }
  } else {
    b[1][0].rational = 1;
    if (f.omega_half()) {
      b[0][1] = {Rational(1, 2), Rational(1, 2), m};
      b[1][1] = {Rational(1, 2), Rational(-1, 2), m};
    } else {
      b[0][1].irrational = 1;
      b[1][1].irrational = -1;
    }
  }
  return b;
}

inline std::array<std::array<long double, 2>, 2> basis_matrix_numeric(const QuadField& f) {
  auto b = basis_matrix(f);
  return {{{b[0][0].value(), b[0][1].value()}, {b[1][0].value(), b[1][1].value()}}};
}

/// O* = prefactor * O. The prefactor is an exact element of K:
/// i psi/sqrt(delta) = psi sqrt(d)/delta (imaginary), psi/(2 sqrt d) = psi sqrt(d)/(2d) (real).
struct DualOrder {
  QuadElem prefactor;
  Rational psi;
  std::string symbolic;
  QuadIdeal ideal;
};

inline DualOrder dual_order(const QuadField& f) {
  const std::int64_t m = f.delta();
  QuadElem root = QuadElem::sqrt_d(f);
  if (f.imaginary()) {
    Rational psi = m % 4 == 3 ? 2 : 1;
    QuadElem pre = Rational(psi / m) * root;
    std::string sym = (psi == 2 ? "2i" : "i");
    if (m != 1) sym += "/sqrt(" + std::to_string(m) + ")";
    return {pre, psi, sym, ideal_scale(pre, QuadIdeal::unit(f))};
  }
  Rational psi = f.omega_half() ? 2 : 1;
  QuadElem pre = Rational(psi / (2 * m)) * root;
  std::string sym = psi == 2 ? "1/sqrt(" + std::to_string(m) + ")" : "1/(2*sqrt(" + std::to_string(m) + "))";
  return {pre, psi, sym, ideal_scale(pre, QuadIdeal::unit(f))};
}

/// A* = prefactor * core with core = conj(A)^{-1} (imaginary) or A^{-1} (real).
struct DualIdeal {
  QuadElem prefactor;
  QuadIdeal core;
  QuadIdeal ideal;
};

inline DualIdeal dual_ideal(const QuadIdeal& x) {
  DualOrder od = dual_order(x.field());
  QuadIdeal core = x.field().imaginary() ? ideal_inverse(ideal_conj(x)) : ideal_inverse(x);
  return {od.prefactor, core, ideal_scale(od.prefactor, core)};
}

}  // namespace bfspec::quad
