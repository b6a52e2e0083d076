#pragma once

#include "bfspec/bfree/system.hpp"
#include "bfspec/errors.hpp"
#include "bfspec/spectra/spectrum.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace bfspec::spectra {

/// u^⋆ ∈ ⊕_p (Z / p^{κ_p})^d over the truncation primes.
struct StarImage {
  std::vector<std::uint64_t> primes;
  std::vector<Integer> moduli;                   // p^{κ_p}
  std::vector<exact::IntegerVector> components;  // entries in [0, p^{κ_p})
};

/// For u with p-primary part a_p / p^e (a_p = n (q/p^e)^{-1} mod p^e where
/// u = n/q), the component at p is -a_p p^{κ_p - e} mod p^{κ_p}. Any u + Z^d
/// has the same image.
inline StarImage dual_star_map(const RationalVector& u, const BFreeSystem& sys) {
  if (!sys.is_arithmetic()) throw DomainError("star map needs visible points or kappa-free integers");
  if (u.size() != sys.dim()) throw DomainError("dimension mismatch");
  const Integer q = denominator(u);
  const std::size_t d = u.size();
  exact::IntegerVector n(d);
  for (std::size_t j = 0; j < d; ++j) n[j] = exact::numerator(u[j] * Rational(q));
  StarImage img;
  Integer covered = 1;
  for (std::size_t i = 0; i < sys.truncation(); ++i) {
    const std::uint64_t p = sys.labels()[i];
    const bfree::Kappa kap = sys.exponents()[i];
    const Integer mod = bfree::ipow(Integer(p), kap);
    img.primes.push_back(p);
    img.moduli.push_back(mod);
    unsigned e = 0;
    Integer pe = 1;
    for (Integer rest = q; rest % p == 0; rest /= p) {
      ++e;
      pe *= p;
    }
    exact::IntegerVector comp(d, 0);
    if (e > 0) {
      if (e > kap) throw DomainError("u is not in the spectrum: p^" + std::to_string(e) + " divides den(u)");
      covered *= pe;
      const Integer cofactor_inv = exact::mod_inverse(q / pe, pe);
      const Integer lift = bfree::ipow(Integer(p), kap - e);
      for (std::size_t j = 0; j < d; ++j) {
        Integer a = exact::mod(n[j] * cofactor_inv, pe);
        comp[j] = exact::mod(-a * lift, mod);
      }
    }
    img.components.push_back(std::move(comp));
  }
  if (covered != q) throw DomainError("truncation exceeded: den(u) has primes beyond the bound");
  return img;
}

/// prod_x exp(2πi x.u) prod_p exp(2πi x.k_p / p^{κ_p}) == 1 within tol for all
/// sample points x. Each phase is reduced mod 1 exactly before evaluation.
inline bool verify_annihilator(const RationalVector& u, const StarImage& img,
                               const std::vector<exact::IntegerVector>& sample, long double tol = 1e-10L) {
  const std::size_t d = u.size();
  for (const auto& x : sample) {
    if (x.size() != d) throw DomainError("dimension mismatch");
    std::complex<long double> prod = 1;
    auto multiply = [&](const Rational& phase) {
      long double t = exact::to_long_double(exact::frac(phase));
      prod *= std::polar(1.0L, 2 * M_PIl * t);
    };
    Rational xu = 0;
    for (std::size_t j = 0; j < d; ++j) xu += Rational(x[j]) * u[j];
    multiply(xu);
    for (std::size_t i = 0; i < img.primes.size(); ++i) {
      Integer dot = 0;
      for (std::size_t j = 0; j < d; ++j) dot += x[j] * img.components[i][j];
      multiply(Rational(dot, img.moduli[i]));
    }
    if (std::abs(prod - std::complex<long double>(1)) > tol) return false;
  }
  return true;
}

}  // namespace bfspec::spectra
