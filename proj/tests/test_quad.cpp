#include "bfspec/exact/lattice.hpp"
#include "bfspec/quad/dual.hpp"
#include "bfspec/quad/system.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace bfspec;
using namespace bfspec::quad;
using exact::Integer;
using exact::Rational;

namespace {

QuadElem el(const QuadField& f, Rational a, Rational b = 0) { return QuadElem(f, a, b); }

// Gaussian integer x + y i: ω = i.
QuadElem gauss(std::int64_t x, std::int64_t y) { return el(QuadField(-1), x, y); }

std::vector<Integer> factors(std::initializer_list<long> v) {
  std::vector<Integer> out;
  for (long x : v) out.emplace_back(x);
  return out;
}

QuadIdeal random_ideal(const QuadField& f, std::mt19937_64& rng, bool fractional) {
  std::uniform_int_distribution<int> c(-9, 9), den(1, 4);
  QuadElem x = el(f, c(rng), c(rng)), y = el(f, c(rng), c(rng));
  if (x.is_zero()) x = el(f, 1, 1);
  if (fractional) y = Rational(1, den(rng)) * y;
  return QuadIdeal::from_generators(f, {x, y});
}

const std::vector<std::int64_t> kFields = {-1, -2, -3, -7, -11, 2, 3, 5, 13};

}  // namespace

TEST(QuadField, Basics) {
  QuadField g(-1), e(-3), r2(2), r5(5);
  EXPECT_FALSE(g.omega_half());
  EXPECT_TRUE(e.omega_half());
  EXPECT_EQ(g.discriminant(), -4);
  EXPECT_EQ(e.discriminant(), -3);
  EXPECT_EQ(r2.discriminant(), 8);
  EXPECT_EQ(r5.discriminant(), 5);
  EXPECT_EQ(g.unit_group(), "C4");
  EXPECT_EQ(e.unit_group(), "C6");
  EXPECT_EQ(r5.unit_group(), "C2 x Cinf");
  EXPECT_THROW(QuadField(12), ConfigError);
  EXPECT_THROW(QuadField(1), ConfigError);
  EXPECT_THROW(QuadField(0), ConfigError);
  // ω² = s + t ω
  for (auto d : kFields) {
    QuadField f(d);
    QuadElem w = QuadElem::omega(f);
    EXPECT_EQ(w * w, el(f, f.s(), f.t()));
    QuadElem r = QuadElem::sqrt_d(f);
    EXPECT_EQ(r * r, el(f, d));
  }
}

TEST(QuadField, ElementArithmetic) {
  QuadElem z = gauss(2, 1);
  EXPECT_EQ(z.norm(), 5);
  EXPECT_EQ(z.conj(), gauss(2, -1));
  EXPECT_EQ(z * z.inverse(), gauss(1, 0));
  QuadField f(5);
  QuadElem tau = QuadElem::omega(f);
  EXPECT_EQ(tau.norm(), -1);
  EXPECT_EQ(tau.trace(), 1);
}

TEST(QuadEmbed, Examples) {
  auto v = embed(gauss(1, 1));
  EXPECT_NEAR(v[0], 1.0, 1e-15);
  EXPECT_NEAR(v[1], 1.0, 1e-15);
  QuadField f(5);
  auto w = embed(QuadElem::omega(f));
  EXPECT_NEAR(w[0], (1 + std::sqrt(5.0)) / 2, 1e-15);
  EXPECT_NEAR(w[1], (1 - std::sqrt(5.0)) / 2, 1e-15);
  for (auto d : kFields) {
    auto one = embed(el(QuadField(d), 1));
    EXPECT_EQ(one[0], 1.0L);
    EXPECT_EQ(one[1], d < 0 ? 0.0L : 1.0L);
  }
}

TEST(QuadEmbed, BasisMatrixExamples) {
  auto b3 = basis_matrix(QuadField(-3));
  EXPECT_EQ(b3[0][0].str(), "1");
  EXPECT_EQ(b3[0][1].str(), "1/2");
  EXPECT_EQ(b3[1][0].str(), "0");
  EXPECT_EQ(b3[1][1].str(), "1/2*sqrt(3)");
  auto b2 = basis_matrix(QuadField(2));
  EXPECT_EQ(b2[0][1].str(), "sqrt(2)");
  EXPECT_EQ(b2[1][1].str(), "-sqrt(2)");
  EXPECT_EQ(b2[1][0].str(), "1");
  auto b5 = basis_matrix(QuadField(5));
  EXPECT_EQ(b5[0][1].str(), "1/2+1/2*sqrt(5)");
  EXPECT_EQ(b5[1][1].str(), "1/2-1/2*sqrt(5)");
}

TEST(QuadEmbed, BasisMatrixMapsOrderToZ2) {
  // Columns of B are the images of 1 and ω, so B^{-1} θ(u + vω) = (u, v).
  for (auto d : kFields) {
    QuadField f(d);
    auto b = basis_matrix_numeric(f);
    long double det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    for (int u = -3; u <= 3; ++u)
      for (int v = -3; v <= 3; ++v) {
        auto y = embed(el(f, u, v));
        long double cu = (b[1][1] * y[0] - b[0][1] * y[1]) / det;
        long double cv = (-b[1][0] * y[0] + b[0][0] * y[1]) / det;
        EXPECT_NEAR(static_cast<double>(cu), u, 1e-12);
        EXPECT_NEAR(static_cast<double>(cv), v, 1e-12);
      }
  }
}

TEST(QuadEmbed, BilinearFormMatchesDotProduct) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> c(-20, 20);
  for (auto d : kFields) {
    QuadField f(d);
    for (int i = 0; i < 50; ++i) {
      QuadElem x = el(f, Rational(c(rng), 3), c(rng)), y = el(f, c(rng), Rational(c(rng), 2));
      auto ex = embed(x), ey = embed(y);
      long double dot = ex[0] * ey[0] + ex[1] * ey[1];
      EXPECT_NEAR(static_cast<double>(exact::to_long_double(bilinear(x, y)) - dot), 0.0,
                  1e-12 * std::max(1.0L, std::fabs(dot)));
    }
  }
}

TEST(QuadSplit, Examples) {
  QuadField g(-1);
  auto s2 = split_type(2, g);
  EXPECT_EQ(s2.kind, SplitKind::ramified);
  EXPECT_EQ(s2.ideals[0].ideal, QuadIdeal::principal(gauss(1, 1)));
  EXPECT_EQ(split_type(3, g).kind, SplitKind::inert);
  auto s5 = split_type(5, g);
  EXPECT_EQ(s5.kind, SplitKind::split);
  ASSERT_EQ(s5.ideals.size(), 2u);
  EXPECT_EQ(s5.ideals[0].norm, 5);
  EXPECT_EQ(ideal_norm(s5.ideals[1].ideal), 5);
  EXPECT_EQ(split_type(7, QuadField(2)).kind, SplitKind::split);
  EXPECT_THROW(split_type(9, g), DomainError);
  // 3 = ξ̄(1+ξ)² in the Eisenstein integers.
  auto e3 = split_type(3, QuadField(-3));
  EXPECT_EQ(e3.kind, SplitKind::ramified);
  EXPECT_EQ(ideal_pow(e3.ideals[0].ideal, 2), QuadIdeal::principal(el(QuadField(-3), 3)));
}

TEST(QuadSplit, CongruenceRules) {
  for (std::uint32_t p : bfree::PrimeTable::instance().primes_up_to(2000)) {
    if (p > 2) {
      EXPECT_EQ(split_type(p, QuadField(-1)).kind == SplitKind::inert, p % 4 == 3) << p;
      EXPECT_EQ(split_type(p, QuadField(2)).kind == SplitKind::inert, p % 8 == 3 || p % 8 == 5) << p;
    }
    if (p != 3) EXPECT_EQ(split_type(p, QuadField(-3)).kind == SplitKind::inert, p % 3 == 2) << p;
    if (p != 5) EXPECT_EQ(split_type(p, QuadField(5)).kind == SplitKind::inert, p % 5 == 2 || p % 5 == 3) << p;
  }
}

TEST(QuadSplit, PrimeIdealsMultiplyToP) {
  for (auto d : kFields) {
    QuadField f(d);
    for (std::uint32_t p : bfree::PrimeTable::instance().primes_up_to(200)) {
      auto s = split_type(p, f);
      QuadIdeal prod = QuadIdeal::unit(f);
      for (auto& pi : s.ideals) prod = ideal_mul(prod, pi.ideal);
      if (s.kind == SplitKind::ramified) prod = ideal_mul(prod, s.ideals[0].ideal);
      EXPECT_EQ(prod, QuadIdeal::principal(el(f, p))) << d << " " << p;
      if (s.kind == SplitKind::split) {
        EXPECT_NE(s.ideals[0].ideal, s.ideals[1].ideal);
        EXPECT_EQ(ideal_conj(s.ideals[0].ideal), s.ideals[1].ideal);
      }
    }
  }
}

TEST(QuadSplit, TonelliShanksAgreesWithExhaustiveSearch) {
  for (auto d : kFields) {
    QuadField f(d);
    for (std::uint32_t p : bfree::PrimeTable::instance().primes_up_to(4000)) {
      if (p < 1000) continue;
      std::vector<std::int64_t> brute;
      for (std::int64_t x = 0; x < p; ++x) {
        std::int64_t v = ((x * x - f.t() * x - f.s()) % p + p) % p;
        if (v == 0) brute.push_back(x);
      }
      EXPECT_EQ(omega_roots(f, p), brute) << d << " " << p;
    }
  }
}

TEST(QuadIdealOps, MulExamples) {
  QuadField g(-1);
  auto s5 = split_type(5, g);
  EXPECT_EQ(ideal_mul(s5.ideals[0].ideal, s5.ideals[1].ideal), QuadIdeal::principal(gauss(5, 0)));
  QuadIdeal a = QuadIdeal::principal(gauss(2, 1));
  EXPECT_EQ(ideal_mul(a, QuadIdeal::unit(g)), a);
  EXPECT_EQ(ideal_pow(QuadIdeal::principal(gauss(1, 1)), 2), QuadIdeal::principal(gauss(2, 0)));
}

TEST(QuadIdealOps, NormExamples) {
  QuadField g(-1);
  EXPECT_EQ(ideal_norm(QuadIdeal::principal(gauss(2, 1))), 5);
  EXPECT_EQ(ideal_norm(QuadIdeal::unit(g)), 1);
  EXPECT_EQ(ideal_norm(QuadIdeal::principal(gauss(3, 0))), 9);
}

TEST(QuadIdealOps, InverseExamples) {
  QuadField g(-1);
  QuadIdeal a = QuadIdeal::principal(gauss(2, 1));
  QuadIdeal inv = ideal_inverse(a);
  EXPECT_EQ(inv, QuadIdeal::principal(Rational(1, 5) * gauss(2, -1)));
  EXPECT_EQ(ideal_mul(a, inv), QuadIdeal::unit(g));
  EXPECT_EQ(ideal_inverse(QuadIdeal::unit(g)), QuadIdeal::unit(g));
  QuadIdeal three = QuadIdeal::principal(gauss(3, 0));
  EXPECT_EQ(ideal_inverse(three), QuadIdeal::principal(el(g, Rational(1, 3))));
  EXPECT_EQ(ideal_mul(three, ideal_inverse(three)), QuadIdeal::unit(g));
  EXPECT_THROW(QuadIdeal::principal(gauss(0, 0)), DomainError);
}

TEST(QuadIdealOps, MemberExamples) {
  EXPECT_TRUE(ideal_member(QuadIdeal::principal(gauss(2, 1)), gauss(5, 0)));
  EXPECT_FALSE(ideal_member(QuadIdeal::principal(gauss(1, 1)), gauss(1, 0)));
  EXPECT_TRUE(ideal_member(ideal_pow(QuadIdeal::principal(gauss(1, 1)), 2), gauss(2, 0)));
}

TEST(QuadIdealOps, QuotientExamples) {
  EXPECT_EQ(quotient_structure(ideal_pow(QuadIdeal::principal(gauss(1, 1)), 3)), factors({2, 4}));
  EXPECT_EQ(quotient_structure(QuadIdeal::principal(gauss(3, 0))), factors({3, 3}));
  EXPECT_EQ(quotient_structure(ideal_pow(QuadIdeal::principal(gauss(2, 1)), 2)), factors({25}));
  EXPECT_EQ(quotient_structure(ideal_pow(QuadIdeal::principal(gauss(1, 1)), 2)), factors({2, 2}));
  EXPECT_EQ(quotient_structure(QuadIdeal::principal(gauss(2, 1))), factors({5}));
}

TEST(QuadIdealOps, IdealClosedUnderOmega) {
  std::mt19937_64 rng(3);
  for (auto d : kFields) {
    QuadField f(d);
    for (int i = 0; i < 50; ++i) {
      QuadIdeal a = random_ideal(f, rng, true);
      for (const auto& g : a.z_basis()) EXPECT_TRUE(a.contains(g * QuadElem::omega(f)));
      EXPECT_GT(a.a(), 0);
      EXPECT_GT(a.c(), 0);
      EXPECT_GE(a.b(), 0);
      EXPECT_LT(a.b(), a.a());
    }
  }
}

TEST(QuadIdealProps, NormMultiplicative) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    QuadField f(kFields[i % kFields.size()]);
    QuadIdeal a = random_ideal(f, rng, i % 2 == 0), b = random_ideal(f, rng, i % 3 == 0);
    EXPECT_EQ(ideal_norm(ideal_mul(a, b)), ideal_norm(a) * ideal_norm(b));
  }
}

TEST(QuadIdealProps, InverseGivesUnitIdeal) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    QuadField f(kFields[i % kFields.size()]);
    QuadIdeal a = random_ideal(f, rng, i % 2 == 1);
    EXPECT_EQ(ideal_mul(a, ideal_inverse(a)), QuadIdeal::unit(f)) << a;
    EXPECT_EQ(ideal_pow(a, -2), ideal_inverse(ideal_mul(a, a)));
  }
}

TEST(QuadIdealProps, QuotientMatchesCaseTable) {
  for (auto d : kFields) {
    QuadField f(d);
    for (std::uint32_t p : bfree::PrimeTable::instance().primes_up_to(49)) {
      auto s = split_type(p, f);
      for (unsigned k = 1; k <= 4; ++k) {
        std::vector<Integer> expect;
        Integer pk = bfree::ipow(Integer(p), k);
        switch (s.kind) {
          case SplitKind::ramified: {
            Integer lo = bfree::ipow(Integer(p), k / 2), hi = bfree::ipow(Integer(p), (k + 1) / 2);
            if (lo > 1) expect.push_back(lo);
            expect.push_back(hi);
            break;
          }
          case SplitKind::inert: expect = {pk, pk}; break;
          case SplitKind::split: expect = {pk}; break;
        }
        for (auto& pi : s.ideals)
          EXPECT_EQ(quotient_structure(ideal_pow(pi.ideal, k)), expect) << d << " " << p << "^" << k;
      }
    }
  }
}

TEST(QuadIdealProps, NormEstimate) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> c(-6, 6);
  for (auto d : kFields) {
    QuadField f(d);
    for (int i = 0; i < 40; ++i) {
      QuadIdeal a = random_ideal(f, rng, false);
      auto basis = a.z_basis();
      for (int j = 0; j < 20; ++j) {
        QuadElem x = Rational(c(rng)) * basis[0] + Rational(c(rng)) * basis[1];
        if (x.is_zero()) continue;
        EXPECT_GE(exact::abs(x.norm()), ideal_norm(a));
      }
    }
    QuadElem z = el(f, 3, 1);
    EXPECT_EQ(exact::abs(z.norm()), ideal_norm(QuadIdeal::principal(z)));
  }
}

TEST(QuadIdealProps, Valuation) {
  QuadField g(-1);
  auto s2 = split_type(2, g).ideals[0];
  EXPECT_EQ(valuation(gauss(2, 0), s2), 2);
  EXPECT_EQ(valuation(gauss(1, 1), s2), 1);
  EXPECT_EQ(valuation(el(g, Rational(1, 4)), s2), -4);
  auto s5 = split_type(5, g).ideals;
  EXPECT_EQ(valuation(gauss(5, 0), s5[0]) + valuation(gauss(5, 0), s5[1]), 2);
  EXPECT_EQ(valuation(gauss(2, 1), s5[0]) + valuation(gauss(2, 1), s5[1]), 1);
}

TEST(QuadDual, OrderExamples) {
  EXPECT_EQ(dual_order(QuadField(-1)).ideal, QuadIdeal::unit(QuadField(-1)));
  EXPECT_EQ(dual_order(QuadField(-1)).symbolic, "i");
  auto e = dual_order(QuadField(-3));
  EXPECT_EQ(e.symbolic, "2i/sqrt(3)");
  EXPECT_EQ(e.psi, 2);
  EXPECT_EQ(dual_order(QuadField(5)).symbolic, "1/sqrt(5)");
  EXPECT_EQ(dual_order(QuadField(2)).symbolic, "1/(2*sqrt(2))");
}

TEST(QuadDual, OrderMatchesLatticeDual) {
  // θ(O*) must equal dual_lattice(θ(O)) as sets; compare via coordinates.
  std::vector<std::int64_t> ds = {-1, -2, -3, -7, -11, -19, -43, -67, -163, 2, 3, 5, 13};
  for (auto d : ds) {
    QuadField f(d);
    auto b = basis_matrix_numeric(f);
    long double det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    // Dual basis: columns of B^{-T}.
    long double dt[2][2] = {{b[1][1] / det, -b[1][0] / det}, {-b[0][1] / det, b[0][0] / det}};
    auto od = dual_order(f);
    ASSERT_TRUE(od.ideal.contains(od.prefactor));
    for (const auto& g : od.ideal.z_basis()) {
      auto y = embed(g);
      // Coordinates of y in the dual basis must be integral.
      long double ddet = dt[0][0] * dt[1][1] - dt[0][1] * dt[1][0];
      long double c0 = (dt[1][1] * y[0] - dt[0][1] * y[1]) / ddet;
      long double c1 = (-dt[1][0] * y[0] + dt[0][0] * y[1]) / ddet;
      EXPECT_NEAR(static_cast<double>(c0), std::round(static_cast<double>(c0)), 1e-12) << d;
      EXPECT_NEAR(static_cast<double>(c1), std::round(static_cast<double>(c1)), 1e-12) << d;
    }
    // Same covolume: |det B^{-T}| = 1/|det B| against the norm of the dual order.
    long double cov = std::fabs(det) * exact::to_long_double(ideal_norm(od.ideal));
    EXPECT_NEAR(static_cast<double>(cov), static_cast<double>(1 / std::fabs(det)), 1e-12) << d;
  }
}

TEST(QuadDual, OrderDualityPairing) {
  // x in O*, y in O  =>  <x, y> integral, and O* is the full dual.
  for (auto d : kFields) {
    QuadField f(d);
    auto od = dual_order(f);
    for (const auto& x : od.ideal.z_basis()) {
      EXPECT_TRUE(exact::is_integral(bilinear(x, el(f, 1))));
      EXPECT_TRUE(exact::is_integral(bilinear(x, QuadElem::omega(f))));
    }
  }
}

TEST(QuadDual, IdealExamples) {
  QuadField g(-1);
  auto z = gauss(2, 1);
  EXPECT_EQ(dual_ideal(QuadIdeal::principal(z)).ideal, QuadIdeal::principal(Rational(1, 5) * z));
  EXPECT_EQ(dual_ideal(QuadIdeal::unit(g)).ideal, dual_order(g).ideal);
  QuadField f(5);
  QuadElem x = el(f, 2, 1);
  Rational psi = dual_order(f).psi;
  EXPECT_EQ(dual_ideal(QuadIdeal::principal(x)).ideal,
            ideal_scale(QuadElem::sqrt_d(f).inverse(), QuadIdeal::principal(Rational(psi / 2 / x.norm()) * x.conj())));
}

TEST(QuadDual, IdealDualityPairing) {
  std::mt19937_64 rng(23);
  for (auto d : kFields) {
    QuadField f(d);
    for (int i = 0; i < 20; ++i) {
      QuadIdeal a = random_ideal(f, rng, true);
      auto dual = dual_ideal(a).ideal;
      for (const auto& x : dual.z_basis())
        for (const auto& y : a.z_basis()) EXPECT_TRUE(exact::is_integral(bilinear(x, y)));
      // Full dual: covolumes multiply to 1, i.e. N(A) N(A*) = N(O*).
      EXPECT_EQ(ideal_norm(a) * ideal_norm(dual), ideal_norm(dual_order(f).ideal));
    }
  }
}

TEST(QuadKappaFree, Examples) {
  QuadField g(-1);
  IdealKappa k2(2);
  EXPECT_FALSE(quad_kappa_free_member(gauss(2, 0), k2));
  EXPECT_TRUE(quad_kappa_free_member(gauss(1, 1), k2));
  EXPECT_TRUE(quad_kappa_free_member(gauss(1, 0), k2));
  EXPECT_FALSE(quad_kappa_free_member(gauss(0, 0), k2));
  EXPECT_THROW(quad_kappa_free_member(el(g, Rational(1, 2)), k2), DomainError);
}

TEST(QuadKappaFree, SystemMatchesIdealOracle) {
  for (auto d : {-1, -3, 2, 5}) {
    QuadField f(d);
    IdealKappa kappa = make_ideal_kappa(f, 2, {{5, 3}});
    QuadKappaSystem sys(f, kappa, 100);
    for (int u = -25; u <= 25; ++u)
      for (int v = -25; v <= 25; ++v) {
        bool oracle = u != 0 || v != 0;
        // Oracle: x ∉ 𝔭^κ for every prime 𝔭 above p | N(x), via generic ideal membership.
        QuadElem x = el(f, u, v);
        if (oracle)
          for (auto& [p, e] : bfree::factorize(exact::numerator(exact::abs(x.norm()))))
            for (auto& pi : split_type(p.convert_to<std::int64_t>(), f).ideals)
              if (ideal_pow(pi.ideal, kappa.at(pi.handle)).contains(x)) oracle = false;
        EXPECT_EQ(sys.member(u, v), oracle) << d << " " << u << " " << v;
      }
  }
}

TEST(QuadKappaFree, GaussianDensityEnclosure) {
  QuadField g(-1);
  QuadKappaSystem sys(g, IdealKappa(2), 0);
  auto iv = quad_density_limit(sys, 1000000);
  // 1/ζ_K(2) with ζ_{Q(i)}(2) = ζ(2) L(2, χ_4) = (π²/6) G (Catalan's constant).
  const long double catalan = 0.915965594177219015054603514932384110774L;
  const long double expect = 1 / (M_PIl * M_PIl / 6 * catalan);
  EXPECT_TRUE(iv.contains(expect)) << iv;
  EXPECT_LT(iv.width(), 1e-6);
}

TEST(QuadKappaFree, RemovedIdealIndices) {
  QuadField g(-1);
  QuadKappaSystem sys(g, IdealKappa(2), 5);
  // (1+i)^2, (3)^2, and the two primes above 5 squared.
  ASSERT_EQ(sys.removed().size(), 4u);
  EXPECT_EQ(sys.removed()[0].index, 4);
  EXPECT_EQ(sys.removed()[1].index, 81);
  EXPECT_EQ(sys.removed()[2].index, 25);
}
