#include "bfspec/empirical/calibration.hpp"
#include "bfspec/empirical/equidist.hpp"
#include "bfspec/empirical/fourier.hpp"
#include "bfspec/empirical/sieve.hpp"
#include "bfspec/empirical/thinning.hpp"
#include "bfspec/spectra/spectrum.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numeric>
#include <set>

using namespace bfspec;
using namespace bfspec::empirical;
using bfree::PrimeKappa;
using exact::Rational;
using exact::RationalVector;

namespace {

const double kPi = 3.14159265358979323846;

RationalVector rv(std::initializer_list<Rational> xs) { return RationalVector(xs); }

}  // namespace

TEST(Sieve, VisibleCountMatchesBruteForce) {
  auto sys = BFreeSystem::visible(2, 100);
  auto s = sieve_ball(sys, 10);
  std::size_t brute = 0;
  for (long x = -10; x <= 10; ++x)
    for (long y = -10; y <= 10; ++y)
      if (x * x + y * y <= 100 && std::gcd(x, y) == 1) ++brute;
  EXPECT_EQ(s.size(), brute);
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto c = s.coord(i);
    EXPECT_EQ(std::gcd(c[0], c[1]), 1);
  }
}

TEST(Sieve, TinyRadius) {
  auto vis = sieve_ball(BFreeSystem::visible(2, 10), 0.5);
  EXPECT_EQ(vis.size(), 0u);
  auto inf = sieve_ball(BFreeSystem::kappa_free_integers(PrimeKappa(bfree::kKappaInfinity), 10), 0.5);
  EXPECT_EQ(inf.size(), 1u);  // nothing removed, so 0 stays
  EXPECT_THROW(sieve_ball(BFreeSystem::visible(2, 10), 0), ConfigError);
}

TEST(Sieve, SquareFreePattern) {
  auto s = sieve_ball(BFreeSystem::kappa_free_integers(PrimeKappa(2), 100), 10);
  std::set<std::int64_t> got(s.coords.begin(), s.coords.end());
  std::set<std::int64_t> want;
  for (int n : {1, 2, 3, 5, 6, 7, 10}) {
    want.insert(n);
    want.insert(-n);
  }
  EXPECT_EQ(got, want);
}

TEST(Sieve, KappaFreeMatchesDirectCheck) {
  PrimeKappa kappa(3, {{2, 2}, {5, 1}});
  auto sys = BFreeSystem::kappa_free_integers(kappa, 1000);
  auto s = sieve_ball(sys, 2000);
  std::set<std::int64_t> got(s.coords.begin(), s.coords.end());
  for (std::int64_t n = -2000; n <= 2000; ++n)
    EXPECT_EQ(got.count(n) == 1, n != 0 && bfree::kappa_free_member(exact::Integer(n), kappa)) << n;
}

TEST(Sieve, CustomMatchesMembership) {
  // Γ = Z^2 minus 2Z x Z and Z x 3Z.
  using exact::IntMatrix;
  auto gamma = exact::Lattice::integer_lattice(2);
  std::vector<exact::Lattice> removed{exact::Lattice::from_basis(exact::RatMatrix(IntMatrix{{2, 0}, {0, 1}})),
                                      exact::Lattice::from_basis(exact::RatMatrix(IntMatrix{{1, 0}, {0, 3}}))};
  auto sys = BFreeSystem::custom(gamma, removed, 0);
  auto s = sieve_ball(sys, 8);
  std::size_t brute = 0;
  for (long x = -8; x <= 8; ++x)
    for (long y = -8; y <= 8; ++y)
      if (x * x + y * y <= 64 && x % 2 != 0 && y % 3 != 0) ++brute;
  EXPECT_EQ(s.size(), brute);
}

TEST(Sieve, QuadGaussianMatchesMembership) {
  quad::QuadField g(-1);
  quad::QuadKappaSystem sys(g, quad::IdealKappa(2), 100);
  auto s = sieve_ball(sys, 12);
  std::size_t brute = 0;
  for (long u = -12; u <= 12; ++u)
    for (long v = -12; v <= 12; ++v) {
      if (u * u + v * v > 144) continue;
      if (quad::quad_kappa_free_member(quad::QuadElem(g, u, v), sys.kappa())) ++brute;
    }
  EXPECT_EQ(s.size(), brute);
}

TEST(Sieve, QuadRealFieldUsesMinkowskiNorm) {
  quad::QuadField f(5);
  quad::QuadKappaSystem sys(f, quad::IdealKappa(2), 1000);
  const double r = 30;
  auto s = sieve_ball(sys, r);
  ASSERT_GT(s.size(), 0u);
  std::size_t brute = 0;
  // Brute force over a generous box in (u, v).
  for (long u = -100; u <= 100; ++u)
    for (long v = -100; v <= 100; ++v) {
      quad::QuadElem x(f, u, v);
      auto e = quad::embed(x);
      if (e[0] * e[0] + e[1] * e[1] > r * r + 1e-9) continue;
      if (quad::quad_kappa_free_member(x, sys.kappa())) ++brute;
    }
  EXPECT_EQ(s.size(), brute);
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto y = s.point(i);
    EXPECT_LE(y[0] * y[0] + y[1] * y[1], r * r + 1e-9);
  }
  EXPECT_THROW(sieve_ball(sys, 2e6), BudgetError);
}

TEST(Density, VisibleAndGaussian) {
  auto vis = sieve_ball(BFreeSystem::visible(2, 100), 1000);
  EXPECT_NEAR(empirical_density(vis), 6 / (kPi * kPi), 0.01);
  quad::QuadKappaSystem g(quad::QuadField(-1), quad::IdealKappa(2), 0);
  auto gs = sieve_ball(g, 500);
  // density counted against the Euclidean area, relative to the lattice density of Z[i]
  EXPECT_NEAR(empirical_density(gs) / static_cast<double>(g.gamma_density()), 0.6637, 0.01);
  SievedSet empty;
  EXPECT_EQ(empirical_density(empty), 0);
}

TEST(Fourier, ZeroFrequencyIsDensity) {
  auto s = sieve_ball(BFreeSystem::visible(2, 100), 200);
  auto z = empirical_fb(s, std::vector<double>{0, 0});
  EXPECT_EQ(z.real(), empirical_density(s));
  EXPECT_EQ(z.imag(), 0);
  auto zr = empirical_fb(s, rv({0, 0}));
  EXPECT_EQ(zr.real(), empirical_density(s));
}

TEST(Fourier, StableSumIsExactOnIntegers) {
  auto sum = stable_sum(100000, [](std::size_t i) { return std::complex<double>(static_cast<double>(i), 1); });
  EXPECT_EQ(sum.real(), 99999.0 * 100000 / 2);
  EXPECT_EQ(sum.imag(), 100000);
  EXPECT_EQ(stable_sum(0, [](std::size_t) { return std::complex<double>(1, 0); }), std::complex<double>(0, 0));
}

TEST(Fourier, VisibleSpectrumPoint) {
  auto s = sieve_ball(BFreeSystem::visible(2, 100), 500);
  auto a = empirical_fb(s, rv({Rational(1, 2), Rational(1, 2)}));
  EXPECT_NEAR(a.real(), -2 / (kPi * kPi), 0.02);
  EXPECT_NEAR(a.imag(), 0, 0.02);
  // The real-frequency evaluation agrees with the exact phase reduction.
  auto b = empirical_fb(s, std::vector<double>{0.5, 0.5});
  EXPECT_NEAR(std::abs(a - b), 0, 1e-9);
  auto off = empirical_fb(s, std::vector<double>{std::sqrt(2.0) / 7, 0.31});
  EXPECT_LT(std::abs(off), 0.02);
}

TEST(Fourier, TranslationCovarianceWithBoundaryCorrection) {
  auto sys = BFreeSystem::visible(2, 100);
  const double r = 60;
  const std::vector<std::int64_t> t{3, -2};
  auto base = sieve_ball(sys, r);
  auto shifted = sieve_ball(sys, r, {Region::ball, t});
  for (auto k : {std::vector<double>{0.5, 0.5}, {1.0 / 3, 0}, {0.1234, 0.777}}) {
    // Points of V in B_r(-t) but not in B_r(0), and the reverse.
    std::complex<double> extra = 0, missing = 0;
    auto phase = [&](std::int64_t x, std::int64_t y) { return std::polar(1.0, -2 * kPi * (k[0] * x + k[1] * y)); };
    for (std::int64_t x = -70; x <= 70; ++x)
      for (std::int64_t y = -70; y <= 70; ++y) {
        if (std::gcd(x, y) != 1) continue;
        bool in0 = x * x + y * y <= r * r;
        bool in1 = (x + t[0]) * (x + t[0]) + (y + t[1]) * (y + t[1]) <= r * r;
        if (in1 && !in0) extra += phase(x, y);
        if (in0 && !in1) missing += phase(x, y);
      }
    auto shift_phase = std::polar(1.0, -2 * kPi * (k[0] * t[0] + k[1] * t[1]));
    auto lhs = empirical_fb(shifted, k);
    auto rhs = shift_phase * (empirical_fb(base, k) + (extra - missing) / base.volume);
    EXPECT_NEAR(std::abs(lhs - rhs), 0, 1e-9);
    // Without correction the gap is a boundary term.
    EXPECT_LT(std::abs(lhs - shift_phase * empirical_fb(base, k)), 8.0 * std::hypot(3, 2) / r);
  }
}

TEST(Fourier, RealOnSymmetricSets) {
  auto s = sieve_ball(BFreeSystem::visible(2, 100), 150);
  for (auto k : {std::vector<double>{0.5, 0.5}, {0.1234, 0.777}, {0.3, 0.21}}) {
    auto a = empirical_fb(s, k);
    EXPECT_LT(std::fabs(a.imag()), 1e-10);  // V = -V and the ball is symmetric
  }
}

TEST(Fourier, MatchesClosedFormOnSpectrum) {
  auto sys = BFreeSystem::visible(2, 100);
  auto s = sieve_ball(sys, 500);
  for (auto k : {rv({Rational(1, 3), 0}), rv({Rational(1, 6), Rational(1, 6)}), rv({Rational(1, 5), Rational(2, 5)})}) {
    auto closed = static_cast<double>(spectra::fb_coefficient(sys, k).value.mid());
    EXPECT_NEAR(empirical_fb(s, k).real(), closed, 0.02);
  }
}

TEST(Thinning, Deterministic) {
  auto s = sieve_ball(BFreeSystem::visible(2, 100), 100);
  auto a = bernoulli_thin(s, 0.5, 42);
  auto b = bernoulli_thin(s, 0.5, 42);
  auto c = bernoulli_thin(s, 0.5, 43);
  EXPECT_EQ(a.mask, b.mask);
  EXPECT_NE(a.mask, c.mask);
  EXPECT_EQ(a.mask.size(), s.size());
  EXPECT_THROW(bernoulli_thin(s, 0, 1), ConfigError);
  EXPECT_THROW(bernoulli_thin(s, 1, 1), ConfigError);
}

TEST(Thinning, MaskMeanWithinFourSigma) {
  auto s = sieve_ball(BFreeSystem::visible(2, 100), 300);
  for (double p : {0.1, 0.3, 0.5, 0.9})
    for (std::uint64_t seed : {1ULL, 2ULL, 12345ULL}) {
      auto t = bernoulli_thin(s, p, seed);
      double n = static_cast<double>(s.size());
      double sigma = std::sqrt(p * (1 - p) / n);
      EXPECT_LE(std::fabs(static_cast<double>(t.kept()) / n - p), 4 * sigma) << p << " " << seed;
    }
}

TEST(Thinning, ScalesFourierCoefficients) {
  auto s = sieve_ball(BFreeSystem::visible(2, 100), 500);
  for (double p : {0.5, 0.3}) {
    auto thin = apply_mask(s, bernoulli_thin(s, p, 7));
    double n = static_cast<double>(s.size());
    EXPECT_LE(std::fabs(empirical_density(thin) / empirical_density(s) - p), 3 * std::sqrt(p * (1 - p) / n));
    for (auto k : {rv({Rational(1, 2), Rational(1, 2)}), rv({Rational(1, 3), 0})})
      EXPECT_LT(std::abs(empirical_fb(thin, k) - p * empirical_fb(s, k)), 0.03);
  }
}

TEST(Equidist, VisibleSingleClass) {
  auto sys = BFreeSystem::visible(2, 100);
  auto s = sieve_ball(sys, 500);
  auto groups = residue_groups(sys, 3);  // 2, 3, 5
  ASSERT_EQ(groups[1].label(), "3");
  EXPECT_EQ(groups[1].order(), 9u);
  auto rows = equidist_check(s, groups, {{"c", {{1, {{1, 2}}}}}});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].expected, 1.0 / 8);
  EXPECT_NEAR(rows[0].observed, 1.0 / 8, 0.01);
  // Direct count oracle.
  std::size_t hits = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto c = s.coord(i);
    if (((c[0] % 3) + 3) % 3 == 1 && ((c[1] % 3) + 3) % 3 == 2) ++hits;
  }
  EXPECT_EQ(rows[0].hits, hits);
}

TEST(Equidist, WholeGroupIsOne) {
  auto sys = BFreeSystem::visible(2, 100);
  auto s = sieve_ball(sys, 100);
  auto groups = residue_groups(sys, 2);
  auto rows = equidist_check(s, groups, {whole_group_cylinder(groups[0]), whole_group_cylinder(groups[1]), {"empty", {}}});
  for (const auto& r : rows) {
    EXPECT_EQ(r.observed, 1.0);
    EXPECT_EQ(r.expected, 1.0);
  }
}

TEST(Equidist, ZeroClassNeverHit) {
  auto sys = BFreeSystem::visible(2, 100);
  auto s = sieve_ball(sys, 100);
  auto groups = residue_groups(sys, 3);
  auto rows = equidist_check(s, groups, {{"zero", {{2, {{0, 0}}}}}});
  EXPECT_EQ(rows[0].hits, 0u);
  EXPECT_EQ(rows[0].expected, 0);
}

TEST(Equidist, SuiteSumsToOne) {
  auto sys = BFreeSystem::visible(2, 100);
  auto s = sieve_ball(sys, 200);
  auto groups = residue_groups(sys, 3);
  auto singles = single_class_cylinders(groups);
  EXPECT_EQ(singles.size(), 3u + 8u + 24u);
  auto rows = equidist_check(s, groups, singles);
  std::map<std::string, std::uint64_t> per_group;
  for (std::size_t i = 0; i < rows.size(); ++i) per_group[rows[i].label.substr(0, rows[i].label.find(':'))] += rows[i].hits;
  for (auto& [g, h] : per_group) EXPECT_EQ(h, s.size()) << g;
  auto pairs = equidist_check(s, groups, pair_class_cylinders(groups));
  for (const auto& r : pairs) EXPECT_NEAR(r.observed, r.expected, 0.02) << r.label;
}

TEST(Equidist, ThinnedSetKeepsRatios) {
  auto sys = BFreeSystem::visible(2, 100);
  auto s = sieve_ball(sys, 500);
  auto thin = apply_mask(s, bernoulli_thin(s, 0.5, 99));
  auto groups = residue_groups(sys, 3);
  for (const auto& r : equidist_check(thin, groups, single_class_cylinders(groups))) EXPECT_NEAR(r.observed, r.expected, 0.015) << r.label;
}

TEST(Equidist, RejectsLatticesBeyondN) {
  auto sys = BFreeSystem::visible(2, 100);
  auto s = sieve_ball(sys, 50);
  auto groups = residue_groups(sys, 2);
  EXPECT_THROW(equidist_check(s, groups, {{"far", {{2, {{1, 0}}}}}}), DomainError);
  EXPECT_THROW(residue_groups(sys, 1000), DomainError);
}

TEST(Equidist, KappaFreeAndQuadratic) {
  auto sf = BFreeSystem::kappa_free_integers(PrimeKappa(2), 100);
  auto s = sieve_ball(sf, 100000);
  auto groups = residue_groups(sf, 2);  // mod 4, mod 9
  for (const auto& r : equidist_check(s, groups, single_class_cylinders(groups))) EXPECT_NEAR(r.observed, r.expected, 0.01) << r.label;

  quad::QuadKappaSystem g(quad::QuadField(-1), quad::IdealKappa(2), 10);
  auto gs = sieve_ball(g, 150);
  auto qgroups = residue_groups(g, {0, 1, 2});
  EXPECT_EQ(qgroups[0].order(), 4u);  // (1+i)^2
  auto rows = equidist_check(gs, qgroups, single_class_cylinders(qgroups));
  for (const auto& r : rows) EXPECT_NEAR(r.observed, r.expected, 0.01) << r.label;
  // The zero class of O/𝔭^κ holds exactly the removed elements.
  for (const auto& r : equidist_check(gs, qgroups, {{"zero", {{1, {{0, 0}}}}}})) EXPECT_EQ(r.hits, 0u);
}

TEST(Calibration, PeriodicCoefficientMatchesPeriodAverage) {
  auto sys = BFreeSystem::visible(2, 100);
  // V_3 has period 30; a_{V_3}(k) is the average over one period.
  for (auto k : {rv({Rational(1, 2), Rational(1, 2)}), rv({Rational(1, 3), 0}), rv({Rational(1, 6), Rational(1, 6)}),
                 rv({Rational(1, 5), Rational(2, 5)}), rv({Rational(1, 4), 0}), rv({0, 0})}) {
    std::complex<double> sum = 0;
    for (int x = 0; x < 60; ++x)
      for (int y = 0; y < 60; ++y) {
        if ((x % 2 == 0 && y % 2 == 0) || (x % 3 == 0 && y % 3 == 0) || (x % 5 == 0 && y % 5 == 0)) continue;
        double ph = exact::to_double(k[0]) * x + exact::to_double(k[1]) * y;
        sum += std::polar(1.0, -2 * kPi * ph);
      }
    sum /= 3600.0;
    EXPECT_NEAR(exact::to_double(periodic_coefficient(sys, 3, k)), sum.real(), 1e-12);
    EXPECT_NEAR(sum.imag(), 0, 1e-12);
  }
  EXPECT_EQ(periodic_coefficient(sys, 4, rv({0, 0})), bfree::density_periodic(sys, 4));
  auto sf = BFreeSystem::kappa_free_integers(PrimeKappa(2), 100);
  EXPECT_EQ(periodic_coefficient(sf, 2, rv({Rational(1, 6)})), Rational(1, 36));  // only S = {4, 9} has m_S k integral
}

TEST(Calibration, PeriodicSieveAndTolerances) {
  auto sys = BFreeSystem::visible(2, 100);
  auto per = sieve_periodic(sys, 2, 20);
  std::size_t brute = 0;
  for (long x = -20; x <= 20; ++x)
    for (long y = -20; y <= 20; ++y)
      if (x * x + y * y <= 400 && !(x % 2 == 0 && y % 2 == 0) && !(x % 3 == 0 && y % 3 == 0)) ++brute;
  EXPECT_EQ(per.size(), brute);
  auto cal = calibrate_fb(sys, 150, {rv({Rational(1, 2), Rational(1, 2)}), rv({Rational(1, 3), 0})});
  EXPECT_EQ(cal.lattices, 6u);  // primes up to 13
  ASSERT_EQ(cal.tolerance.size(), 2u);
  for (double t : cal.tolerance) {
    EXPECT_GT(t, 0);
    EXPECT_LE(t, kToleranceCap);
  }
}
