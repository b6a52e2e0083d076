#pragma once

#include "bfspec/exact/int_matrix.hpp"
#include "bfspec/exact/integer.hpp"

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace bfspec::exact {

/// Dense rational matrix, row-major.
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}
  RatMatrix(std::size_t rows, std::size_t cols, std::vector<Rational> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) throw ExactError("RatMatrix: entry count mismatch");
  }
  explicit RatMatrix(const IntMatrix& m) : rows_(m.rows()), cols_(m.cols()) {
    entries_.reserve(m.entries().size());
    for (const auto& e : m.entries()) entries_.emplace_back(e);
  }

  static RatMatrix identity(std::size_t n) {
    RatMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<Rational>& entries() const { return entries_; }

  Rational& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  RatMatrix transpose() const {
    RatMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  RatMatrix hconcat(const RatMatrix& other) const {
    if (rows_ != other.rows_) throw ExactError("hconcat: row count mismatch");
    RatMatrix m(rows_, cols_ + other.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) m(r, c) = (*this)(r, c);
      for (std::size_t c = 0; c < other.cols_; ++c) m(r, cols_ + c) = other(r, c);
    }
    return m;
  }

  /// Least common multiple of all entry denominators.
  Integer common_denominator() const {
    Integer q = 1;
    for (const auto& e : entries_) q = lcm(q, denominator(e));
    return q;
  }

  /// q * (*this) as an integer matrix; q must clear every denominator.
  IntMatrix scaled_to_integer(const Integer& q) const {
    IntMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      Rational v = entries_[i] * q;
      if (!exact::is_integral(v)) throw ExactError("scaled_to_integer: denominator not cleared");
      m(i / cols_, i % cols_) = numerator(v);
    }
    return m;
  }

  bool is_integral() const {
    for (const auto& e : entries_)
      if (!exact::is_integral(e)) return false;
    return true;
  }

  friend bool operator==(const RatMatrix&, const RatMatrix&) = default;

  friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
    if (a.cols_ != b.rows_) throw ExactError("RatMatrix product: shape mismatch");
    RatMatrix m(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Rational& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) m(i, j) += aik * b(k, j);
      }
    return m;
  }

  friend RatMatrix operator*(const Rational& s, const RatMatrix& a) {
    RatMatrix m = a;
    for (auto& e : m.entries_) e *= s;
    return m;
  }

  RationalVector apply(const RationalVector& v) const {
    if (v.size() != cols_) throw ExactError("RatMatrix apply: dimension mismatch");
    RationalVector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out[r] += (*this)(r, c) * v[c];
    return out;
  }

  friend std::ostream& operator<<(std::ostream& os, const RatMatrix& m) {
    os << '[';
    for (std::size_t r = 0; r < m.rows_; ++r) {
      os << (r ? ",[" : "[");
      for (std::size_t c = 0; c < m.cols_; ++c) os << (c ? "," : "") << to_string(m(r, c));
      os << ']';
    }
    return os << ']';
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> entries_;
};

inline RatMatrix inverse(const RatMatrix& m) {
  if (m.rows() != m.cols()) throw ExactError("inverse: matrix not square");
  const std::size_t n = m.rows();
  RatMatrix a = m;
  RatMatrix inv = RatMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && a(p, col) == 0) ++p;
    if (p == n) throw ExactError("degenerate module");
    if (p != col)
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(a(p, c), a(col, c));
        std::swap(inv(p, c), inv(col, c));
      }
    Rational pivot = a(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      a(col, c) /= pivot;
      inv(col, c) /= pivot;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col) == 0) continue;
      Rational f = a(r, col);
      for (std::size_t c = 0; c < n; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

inline Rational determinant(const RatMatrix& m) {
  Integer q = m.common_denominator();
  Integer det = determinant(m.scaled_to_integer(q));
  Rational scale = 1;
  for (std::size_t i = 0; i < m.rows(); ++i) scale *= Rational(q);
  return Rational(det) / scale;
}

/// Full-rank lattice in Q^d. Stored canonically as (1/q) * H with q the least
/// positive integer for which q*L lies in Z^d and H the column HNF of q*L.
class Lattice {
 public:
  /// The lattice spanned by the columns of a d x m rational matrix of rank d.
  static Lattice from_generators(const RatMatrix& gens) {
    if (gens.rows() == 0) throw ExactError("degenerate module");
    Integer q = gens.common_denominator();
    IntMatrix h = hnf(gens.scaled_to_integer(q));
    return Lattice(q, std::move(h));
  }

  /// The lattice spanned by the columns of a nonsingular d x d rational matrix.
  static Lattice from_basis(const RatMatrix& basis) {
    if (basis.rows() != basis.cols()) throw ExactError("Lattice basis must be square");
    return from_generators(basis);
  }

  static Lattice integer_lattice(std::size_t dim) { return scaled_integer_lattice(dim, Rational(1)); }

  /// s * Z^d for a nonzero rational s.
  static Lattice scaled_integer_lattice(std::size_t dim, const Rational& s) {
    if (s == 0) throw ExactError("degenerate module");
    RatMatrix b(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) b(i, i) = s;
    return from_basis(b);
  }

  std::size_t dim() const { return hnf_.rows(); }
  const Integer& denominator() const { return denom_; }
  const IntMatrix& hnf_basis() const { return hnf_; }

  RatMatrix basis() const { return Rational(1, denom_) * RatMatrix(hnf_); }

  /// Covolume |det basis|.
  Rational covolume() const {
    Rational v = Rational(determinant(hnf_));
    for (std::size_t i = 0; i < dim(); ++i) v /= Rational(denom_);
    return v < 0 ? Rational(-v) : v;
  }

  Rational density() const { return 1 / covolume(); }

  /// Coordinates of v relative to the canonical basis.
  RationalVector coordinates(const RationalVector& v) const {
    if (v.size() != dim()) throw ExactError("dimension mismatch");
    // Back substitution on the upper-triangular HNF: H c = q v.
    const std::size_t d = dim();
    RationalVector c(d);
    for (std::size_t step = 0; step < d; ++step) {
      const std::size_t i = d - 1 - step;
      Rational rhs = v[i] * Rational(denom_);
      for (std::size_t j = i + 1; j < d; ++j) rhs -= Rational(hnf_(i, j)) * c[j];
      c[i] = rhs / Rational(hnf_(i, i));
    }
    return c;
  }

  bool contains(const RationalVector& v) const {
    for (const auto& c : coordinates(v))
      if (!is_integral(c)) return false;
    return true;
  }

  /// Every basis vector of `other` lies in this lattice.
  bool contains(const Lattice& other) const {
    if (other.dim() != dim()) throw ExactError("dimension mismatch");
    RatMatrix b = other.basis();
    for (std::size_t c = 0; c < dim(); ++c) {
      RationalVector col(dim());
      for (std::size_t r = 0; r < dim(); ++r) col[r] = b(r, c);
      if (!contains(col)) return false;
    }
    return true;
  }

  friend bool operator==(const Lattice&, const Lattice&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Lattice& l) {
    return os << "(1/" << l.denom_ << ")*" << l.hnf_;
  }

 private:
  // q is already minimal: any q' with q'L integral clears every generator.
  Lattice(Integer q, IntMatrix h) : denom_(std::move(q)), hnf_(std::move(h)) {}

  Integer denom_ = 1;
  IntMatrix hnf_;
};

inline bool member(const Lattice& l, const RationalVector& v) { return l.contains(v); }

/// L* = { y : x.y in Z for all x in L }, basis inverse-transpose.
inline Lattice dual_lattice(const Lattice& l) { return Lattice::from_basis(inverse(l.basis()).transpose()); }

/// Smallest lattice containing A and B.
inline Lattice lattice_sum(const Lattice& a, const Lattice& b) {
  if (a.dim() != b.dim()) throw ExactError("dimension mismatch");
  // Rational full-rank lattices are always commensurate, so the sum is discrete.
  return Lattice::from_generators(a.basis().hconcat(b.basis()));
}

/// Largest lattice contained in A and B, from the integer kernel of [A | -B].
inline Lattice lattice_intersect(const Lattice& a, const Lattice& b) {
  if (a.dim() != b.dim()) throw ExactError("dimension mismatch");
  const std::size_t d = a.dim();
  Integer q = lcm(a.denominator(), b.denominator());
  IntMatrix ha = a.basis().scaled_to_integer(q);
  IntMatrix hb = b.basis().scaled_to_integer(q);
  IntMatrix neg_hb = Integer(-1) * hb;
  HnfResult res = hnf_with_transform(ha.hconcat(neg_hb));
  IntMatrix top(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) top(r, c) = res.u(r, c);
  IntMatrix gens = ha * top;
  return Lattice::from_generators(Rational(1, q) * RatMatrix(gens));
}

/// [super : sub] for sub contained in super.
inline Integer index(const Lattice& super, const Lattice& sub) {
  if (super.dim() != sub.dim()) throw ExactError("dimension mismatch");
  RatMatrix rel = inverse(super.basis()) * sub.basis();
  if (!rel.is_integral()) throw ExactError("not a sublattice");
  Integer det = determinant(rel.scaled_to_integer(1));
  return abs(det);
}

}  // namespace bfspec::exact
