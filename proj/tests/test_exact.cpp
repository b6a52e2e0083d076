#include "bfspec/exact/int_matrix.hpp"
#include "bfspec/exact/lattice.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace bfspec::exact;

namespace {

Lattice diag_lattice(std::initializer_list<Rational> diag) {
  RatMatrix b(diag.size(), diag.size());
  std::size_t i = 0;
  for (const auto& v : diag) {
    b(i, i) = v;
    ++i;
  }
  return Lattice::from_basis(b);
}

bool is_unimodular(const IntMatrix& u) {
  Integer det = determinant(u);
  return det == 1 || det == -1;
}

// Brute force: the set of points of L inside a window, using only member().
std::set<std::pair<Rational, Rational>> window_points(const Lattice& l, int den, int radius) {
  std::set<std::pair<Rational, Rational>> pts;
  for (int x = -radius * den; x <= radius * den; ++x)
    for (int y = -radius * den; y <= radius * den; ++y) {
      RationalVector v{Rational(x, den), Rational(y, den)};
      if (l.contains(v)) pts.insert({v[0], v[1]});
    }
  return pts;
}

Lattice random_lattice(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_int_distribution<int> entry(-6, 6);
  std::uniform_int_distribution<int> den(1, 6);
  for (;;) {
    RatMatrix b(dim, dim);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) b(r, c) = Rational(entry(rng), den(rng));
    if (determinant(b) != 0) return Lattice::from_basis(b);
  }
}

}  // namespace

TEST(Hnf, FixedPoint) {
  IntMatrix m{{2, 1}, {0, 1}};
  EXPECT_EQ(hnf(m), m);
}

TEST(Hnf, ReducesToDiagonal) {
  IntMatrix m{{4, 2}, {2, 2}};
  IntMatrix expected{{2, 0}, {0, 2}};
  EXPECT_EQ(hnf(m), expected);
}

TEST(Hnf, Identity) { EXPECT_EQ(hnf(IntMatrix::identity(3)), IntMatrix::identity(3)); }

TEST(Hnf, TransformIsUnimodularOnRandomInputs) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> entry(-20, 20);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 3, m = d + trial % 3;
    IntMatrix a(d, m);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < m; ++c) a(r, c) = entry(rng);
    HnfResult res;
    try {
      res = hnf_with_transform(a);
    } catch (const ExactError&) {
      continue;
    }
    ASSERT_TRUE(is_unimodular(res.u));
    IntMatrix prod = a * res.u;
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < m - d; ++c) ASSERT_EQ(prod(r, c), 0);
      for (std::size_t c = 0; c < d; ++c) ASSERT_EQ(prod(r, m - d + c), res.h(r, c));
    }
    for (std::size_t r = 0; r < d; ++r) {
      ASSERT_GT(res.h(r, r), 0);
      for (std::size_t c = 0; c < r; ++c) ASSERT_EQ(res.h(r, c), 0);
      for (std::size_t c = r + 1; c < d; ++c) {
        ASSERT_GE(res.h(r, c), 0);
        ASSERT_LT(res.h(r, c), res.h(r, r));
      }
    }
  }
}

TEST(Hnf, BruteForceTwoByTwoAgreement) {
  // HNF of a 2x2 matrix: the pivot in row 2 is the gcd of the bottom row, the
  // top-left pivot is |det| / that gcd.
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> entry(-15, 15);
  for (int trial = 0; trial < 300; ++trial) {
    IntMatrix a{{entry(rng), entry(rng)}, {entry(rng), entry(rng)}};
    Integer det = determinant(a);
    if (det == 0) continue;
    IntMatrix h = hnf(a);
    Integer g = gcd(a(1, 0), a(1, 1));
    EXPECT_EQ(h(1, 1), g);
    EXPECT_EQ(h(0, 0), abs(det) / g);
  }
}

TEST(Snf, Examples) {
  EXPECT_EQ(snf(IntMatrix{{3, 0}, {0, 3}}), (std::vector<Integer>{3, 3}));
  EXPECT_EQ(snf(IntMatrix{{2, 0}, {0, 2}}), (std::vector<Integer>{2, 2}));
  EXPECT_EQ(snf(IntMatrix{{5, 2}, {0, 1}}), (std::vector<Integer>{5}));
  EXPECT_THROW(snf(IntMatrix{{1, 2}, {2, 4}}), ExactError);
}

TEST(Snf, DivisibilityAndDeterminant) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> entry(-12, 12);
  int checked = 0;
  while (checked < 200) {
    const std::size_t n = 2 + checked % 2;
    IntMatrix a(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) a(r, c) = entry(rng);
    if (determinant(a) == 0) continue;
    ++checked;
    SnfResult res = snf_with_transform(a);
    ASSERT_TRUE(is_unimodular(res.left));
    ASSERT_TRUE(is_unimodular(res.right));
    IntMatrix d = res.left * a * res.right;
    Integer prod = 1;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) ASSERT_EQ(d(i, j), 0);
      ASSERT_EQ(d(i, i), res.invariants[i]);
      if (i + 1 < n) ASSERT_EQ(res.invariants[i + 1] % res.invariants[i], 0);
      prod *= res.invariants[i];
    }
    ASSERT_EQ(prod, abs(determinant(a)));
    // HNF and SNF describe the same module, so their invariants agree.
    ASSERT_EQ(snf(hnf(a)), snf(a));
  }
}

TEST(Lattice, DualExamples) {
  EXPECT_EQ(dual_lattice(Lattice::integer_lattice(2)), Lattice::integer_lattice(2));
  for (int p : {2, 3, 5, 7})
    EXPECT_EQ(dual_lattice(Lattice::scaled_integer_lattice(2, p)),
              Lattice::scaled_integer_lattice(2, Rational(1, p)));
}

TEST(Lattice, SumExamples) {
  Lattice half = Lattice::scaled_integer_lattice(2, Rational(1, 2));
  Lattice third = Lattice::scaled_integer_lattice(2, Rational(1, 3));
  Lattice sixth = Lattice::scaled_integer_lattice(2, Rational(1, 6));
  EXPECT_EQ(lattice_sum(half, half), half);
  EXPECT_EQ(lattice_sum(half, third), sixth);
  EXPECT_EQ(lattice_sum(Lattice::integer_lattice(2), Lattice::scaled_integer_lattice(2, Rational(1, 5))),
            Lattice::scaled_integer_lattice(2, Rational(1, 5)));
  // Closure oracle: every point of (1/6)Z^2 in a window is a small combination.
  std::set<std::pair<Rational, Rational>> closure;
  for (int a = -6; a <= 6; ++a)
    for (int b = -6; b <= 6; ++b)
      for (int c = -6; c <= 6; ++c)
        for (int e = -6; e <= 6; ++e) {
          Rational x = Rational(a, 2) + Rational(c, 3), y = Rational(b, 2) + Rational(e, 3);
          if (abs(x) <= 1 && abs(y) <= 1) closure.insert({x, y});
        }
  EXPECT_EQ(closure, window_points(sixth, 6, 1));
}

TEST(Lattice, IntersectExamples) {
  Lattice two = Lattice::scaled_integer_lattice(2, 2);
  Lattice three = Lattice::scaled_integer_lattice(2, 3);
  Lattice six = Lattice::scaled_integer_lattice(2, 6);
  EXPECT_EQ(lattice_intersect(two, three), six);
  EXPECT_EQ(lattice_intersect(two, two), two);
  // Brute-force scan over [-12,12]^2.
  for (int x = -12; x <= 12; ++x)
    for (int y = -12; y <= 12; ++y) {
      RationalVector v{x, y};
      EXPECT_EQ(six.contains(v), two.contains(v) && three.contains(v));
    }
  Lattice d = dual_lattice(lattice_intersect(Lattice::scaled_integer_lattice(1, 2), Lattice::scaled_integer_lattice(1, 5)));
  EXPECT_EQ(d, Lattice::scaled_integer_lattice(1, Rational(1, 10)));
}

TEST(Lattice, IndexExamples) {
  EXPECT_EQ(index(Lattice::integer_lattice(2), Lattice::scaled_integer_lattice(2, 3)), 9);
  Lattice g = diag_lattice({Rational(1, 2), 3});
  EXPECT_EQ(index(g, g), 1);
  // (2+i)Z[i] has basis 1*(2+i) = (2,1) and i*(2+i) = (-1,2).
  RatMatrix b(2, 2, {2, -1, 1, 2});
  EXPECT_EQ(index(Lattice::integer_lattice(2), Lattice::from_basis(b)), 5);
  EXPECT_THROW(index(Lattice::scaled_integer_lattice(2, 2), Lattice::integer_lattice(2)), ExactError);
}

TEST(Lattice, MemberExamples) {
  EXPECT_TRUE(member(Lattice::scaled_integer_lattice(2, 3), {6, 0}));
  EXPECT_FALSE(member(Lattice::integer_lattice(2), {Rational(1, 2), 0}));
  Lattice s = lattice_sum(Lattice::scaled_integer_lattice(2, Rational(1, 2)),
                          Lattice::scaled_integer_lattice(2, Rational(1, 5)));
  EXPECT_TRUE(member(s, {Rational(3, 10), Rational(1, 2)}));
  // Decomposition oracle: 3/10 = 1/2 - 1/5, 1/2 = 1/2.
  EXPECT_EQ(Rational(1, 2) - Rational(1, 5), Rational(3, 10));
}

TEST(Lattice, EqualityIsUpToUnimodularChange) {
  RatMatrix b(2, 2, {Rational(1, 2), 0, 0, Rational(1, 3)});
  RatMatrix u(2, 2, {1, 1, 0, 1});
  EXPECT_EQ(Lattice::from_basis(b), Lattice::from_basis(b * u));
  RatMatrix v(2, 2, {2, 0, 0, 1});
  EXPECT_NE(Lattice::from_basis(b), Lattice::from_basis(b * v));
}

TEST(LatticeProperties, DoubleDualIsIdentity) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    Lattice l = random_lattice(rng, 1 + trial % 3);
    ASSERT_EQ(dual_lattice(dual_lattice(l)), l);
  }
}

TEST(LatticeProperties, DualityExchangesSumAndIntersection) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 2;
    Lattice a = random_lattice(rng, d), b = random_lattice(rng, d);
    ASSERT_EQ(dual_lattice(lattice_intersect(a, b)), lattice_sum(dual_lattice(a), dual_lattice(b)));
    ASSERT_EQ(dual_lattice(lattice_sum(a, b)), lattice_intersect(dual_lattice(a), dual_lattice(b)));
  }
}

TEST(LatticeProperties, IntersectionMatchesWindowScan) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    Lattice a = random_lattice(rng, 2), b = random_lattice(rng, 2);
    Lattice i = lattice_intersect(a, b);
    const int den = static_cast<int>(to_int64(lcm(a.denominator(), b.denominator())));
    for (int x = -8; x <= 8; ++x)
      for (int y = -8; y <= 8; ++y) {
        RationalVector v{Rational(x, den), Rational(y, den)};
        ASSERT_EQ(i.contains(v), a.contains(v) && b.contains(v));
      }
  }
}

TEST(LatticeProperties, IndexIsMultiplicativeInChains) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> entry(-3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    Lattice g = random_lattice(rng, 2);
    auto sub = [&](const Lattice& l) {
      for (;;) {
        IntMatrix m{{entry(rng), entry(rng)}, {entry(rng), entry(rng)}};
        if (determinant(m) != 0) return Lattice::from_basis(l.basis() * RatMatrix(m));
      }
    };
    Lattice g1 = sub(g), g2 = sub(g1);
    ASSERT_EQ(index(g, g1) * index(g1, g2), index(g, g2));
    ASSERT_EQ(Rational(index(g, g1)), g1.covolume() / g.covolume());
  }
}

TEST(Rational, Parsing) {
  EXPECT_EQ(parse_rational("3/10"), Rational(3, 10));
  EXPECT_EQ(parse_rational("-4"), Rational(-4));
  EXPECT_EQ(to_string(Rational(6, 4)), "3/2");
  EXPECT_THROW(parse_rational("1/0"), ExactError);
  EXPECT_THROW(parse_rational("x"), ExactError);
}
