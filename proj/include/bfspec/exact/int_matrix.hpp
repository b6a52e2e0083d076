#pragma once

#include "bfspec/exact/integer.hpp"

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <utility>
#include <vector>

namespace bfspec::exact {

/// Dense integer matrix, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}
  IntMatrix(std::size_t rows, std::size_t cols, std::vector<Integer> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) throw ExactError("IntMatrix: entry count mismatch");
  }
  IntMatrix(std::initializer_list<std::initializer_list<long long>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ExactError("IntMatrix: ragged initializer");
      for (long long v : r) entries_.emplace_back(v);
    }
  }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static IntMatrix diagonal(const std::vector<Integer>& diag) {
    IntMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<Integer>& entries() const { return entries_; }

  Integer& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Integer& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::vector<Integer> column(std::size_t c) const {
    std::vector<Integer> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  IntMatrix transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  /// Horizontal concatenation [*this | other].
  IntMatrix hconcat(const IntMatrix& other) const {
    if (rows_ != other.rows_) throw ExactError("hconcat: row count mismatch");
    IntMatrix m(rows_, cols_ + other.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) m(r, c) = (*this)(r, c);
      for (std::size_t c = 0; c < other.cols_; ++c) m(r, cols_ + c) = other(r, c);
    }
    return m;
  }

  Integer content() const {
    Integer g = 0;
    for (const auto& e : entries_) g = gcd(g, e);
    return g;
  }

  bool is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Integer& e) { return e == 0; });
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw ExactError("IntMatrix product: shape mismatch");
    IntMatrix m(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Integer& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) m(i, j) += aik * b(k, j);
      }
    return m;
  }

  friend IntMatrix operator*(const Integer& s, const IntMatrix& a) {
    IntMatrix m = a;
    for (auto& e : m.entries_) e *= s;
    return m;
  }

  friend std::ostream& operator<<(std::ostream& os, const IntMatrix& m) {
    os << '[';
    for (std::size_t r = 0; r < m.rows_; ++r) {
      os << (r ? ",[" : "[");
      for (std::size_t c = 0; c < m.cols_; ++c) os << (c ? "," : "") << m(r, c);
      os << ']';
    }
    return os << ']';
  }

  // Elementary column operations.
  void swap_columns(std::size_t a, std::size_t b) {
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
  }
  void negate_column(std::size_t c) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = -(*this)(r, c);
  }
  /// col[dst] += factor * col[src]
  void add_column_multiple(std::size_t dst, std::size_t src, const Integer& factor) {
    if (factor == 0) return;
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, dst) += factor * (*this)(r, src);
  }
  /// (col a, col b) <- (s*a + t*b, u*a + v*b); unimodular when s*v - t*u = ±1.
  void combine_columns(std::size_t a, std::size_t b, const Integer& s, const Integer& t,
                       const Integer& u, const Integer& v) {
    for (std::size_t r = 0; r < rows_; ++r) {
      Integer x = (*this)(r, a), y = (*this)(r, b);
      (*this)(r, a) = s * x + t * y;
      (*this)(r, b) = u * x + v * y;
    }
  }

  // Elementary row operations.
  void swap_rows(std::size_t a, std::size_t b) {
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }
  void negate_row(std::size_t r) {
    for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = -(*this)(r, c);
  }
  void add_row_multiple(std::size_t dst, std::size_t src, const Integer& factor) {
    if (factor == 0) return;
    for (std::size_t c = 0; c < cols_; ++c) (*this)(dst, c) += factor * (*this)(src, c);
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> entries_;
};

/// Determinant by fraction-free (Bareiss) elimination.
inline Integer determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw ExactError("determinant: matrix not square");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IntMatrix a = m;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      a.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

struct HnfResult {
  /// d x d upper-triangular, positive diagonal, 0 <= H(i,j) < H(i,i) for j > i.
  IntMatrix h;
  /// Unimodular m x m with input * U = [0 | H] (kernel columns first).
  IntMatrix u;
};

/// Column-style Hermite normal form of a d x m matrix of full row rank d.
inline HnfResult hnf_with_transform(const IntMatrix& input) {
  const std::size_t d = input.rows();
  const std::size_t m = input.cols();
  if (m < d) throw ExactError("degenerate module");
  IntMatrix a = input;
  IntMatrix u = IntMatrix::identity(m);
  std::vector<std::size_t> active(m);
  for (std::size_t c = 0; c < m; ++c) active[c] = c;
  std::vector<std::size_t> pivot(d);

  for (std::size_t step = 0; step < d; ++step) {
    const std::size_t row = d - 1 - step;
    auto it = std::find_if(active.begin(), active.end(), [&](std::size_t c) { return a(row, c) != 0; });
    if (it == active.end()) throw ExactError("degenerate module");
    const std::size_t pc = *it;
    for (std::size_t c : active) {
      if (c == pc || a(row, c) == 0) continue;
      Integer x = a(row, pc), y = a(row, c);
      auto eg = extended_gcd(x, y);
      Integer u21 = -y / eg.g, u22 = x / eg.g;
      a.combine_columns(pc, c, eg.s, eg.t, u21, u22);
      u.combine_columns(pc, c, eg.s, eg.t, u21, u22);
    }
    if (a(row, pc) < 0) {
      a.negate_column(pc);
      u.negate_column(pc);
    }
    pivot[row] = pc;
    active.erase(std::find(active.begin(), active.end(), pc));
  }

  // Reduce entries right of each pivot, bottom row first.
  for (std::size_t step = 0; step < d; ++step) {
    const std::size_t row = d - 1 - step;
    const std::size_t pc = pivot[row];
    for (std::size_t j = row + 1; j < d; ++j) {
      const std::size_t cj = pivot[j];
      Integer q = floor_div(a(row, cj), a(row, pc));
      a.add_column_multiple(cj, pc, -q);
      u.add_column_multiple(cj, pc, -q);
    }
  }

  HnfResult out{IntMatrix(d, d), IntMatrix(m, m)};
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t r = 0; r < d; ++r) out.h(r, j) = a(r, pivot[j]);
  std::vector<std::size_t> order = active;  // kernel columns
  order.insert(order.end(), pivot.begin(), pivot.end());
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t r = 0; r < m; ++r) out.u(r, j) = u(r, order[j]);
  return out;
}

inline IntMatrix hnf(const IntMatrix& m) { return hnf_with_transform(m).h; }

struct SnfResult {
  std::vector<Integer> invariants;  // d_1 | d_2 | ... | d_r, all positive
  IntMatrix left;                   // unimodular U
  IntMatrix right;                  // unimodular V with U*m*V = diag(invariants)
};

/// Smith normal form of a square nonsingular matrix.
inline SnfResult snf_with_transform(const IntMatrix& input) {
  if (input.rows() != input.cols()) throw ExactError("snf: matrix not square");
  const std::size_t n = input.rows();
  if (determinant(input) == 0) throw ExactError("degenerate module");
  IntMatrix a = input;
  IntMatrix left = IntMatrix::identity(n);
  IntMatrix right = IntMatrix::identity(n);

  for (std::size_t t = 0; t < n; ++t) {
    for (;;) {
      // Move the entry of least absolute value in the trailing block to (t, t).
      std::size_t br = t, bc = t;
      Integer best = -1;
      for (std::size_t i = t; i < n; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (a(i, j) != 0 && (best < 0 || abs(a(i, j)) < best)) {
            best = abs(a(i, j));
            br = i;
            bc = j;
          }
      a.swap_rows(t, br);
      left.swap_rows(t, br);
      a.swap_columns(t, bc);
      right.swap_columns(t, bc);

      bool clean = true;
      for (std::size_t i = t + 1; i < n; ++i) {
        Integer q = a(i, t) / a(t, t);
        a.add_row_multiple(i, t, -q);
        left.add_row_multiple(i, t, -q);
        if (a(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        Integer q = a(t, j) / a(t, t);
        a.add_column_multiple(j, t, -q);
        right.add_column_multiple(j, t, -q);
        if (a(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      // Divisibility: fold an offending row into row t and repeat.
      bool divides = true;
      for (std::size_t i = t + 1; i < n && divides; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (a(i, j) % a(t, t) != 0) {
            a.add_row_multiple(t, i, 1);
            left.add_row_multiple(t, i, 1);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (a(t, t) < 0) {
      a.negate_row(t);
      left.negate_row(t);
    }
  }

  SnfResult out{std::vector<Integer>(n), std::move(left), std::move(right)};
  for (std::size_t i = 0; i < n; ++i) out.invariants[i] = a(i, i);
  return out;
}

/// Invariant factors greater than one; their product is |det m|.
inline std::vector<Integer> snf(const IntMatrix& m) {
  std::vector<Integer> out;
  for (auto& d : snf_with_transform(m).invariants)
    if (d != 1) out.push_back(d);
  return out;
}

}  // namespace bfspec::exact
