#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "itersolve/errors.hpp"

namespace itersolve {

using Vector = std::vector<double>;

namespace detail {

inline std::string dims(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

inline void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + " contains a non-finite entry");
  }
}

}  // namespace detail

/// Row-major dense matrix of finite doubles. Immutable once built.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw InvalidArgument("dense matrix " + detail::dims(rows_, cols_) + " needs " +
                            std::to_string(rows_ * cols_) + " entries, got " +
                            std::to_string(data_.size()));
    }
    detail::require_finite(data_, "dense matrix");
  }

  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw InvalidArgument("ragged initializer for dense matrix");
      data_.insert(data_.end(), r.begin(), r.end());
    }
    detail::require_finite(data_, "dense matrix");
  }

  static DenseMatrix identity(std::size_t n) {
    std::vector<double> e(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
    return {n, n, std::move(e)};
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> entries() const noexcept { return data_; }

  template <typename F>
  void for_each_in_row(std::size_t r, F&& f) const {
    const double* p = data_.data() + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c) f(c, p[c]);
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row storage. Column indices are strictly increasing within a row.
class SparseMatrix {
 public:
  SparseMatrix() : row_offsets_{0} {}

  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, std::vector<double> values)
      : rows_(rows),
        cols_(cols),
        row_offsets_(std::move(row_offsets)),
        col_indices_(std::move(col_indices)),
        values_(std::move(values)) {
    validate();
  }

  // Triplets may arrive in any order; duplicates are rejected rather than summed.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    std::vector<std::size_t> offsets(rows + 1, 0);
    std::vector<std::size_t> cols_out;
    std::vector<double> vals;
    cols_out.reserve(triplets.size());
    vals.reserve(triplets.size());
    for (std::size_t k = 0; k < triplets.size(); ++k) {
      const auto& t = triplets[k];
      if (t.row >= rows || t.col >= cols) {
        throw InvalidArgument("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                              ") outside " + detail::dims(rows, cols));
      }
      if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
        throw InvalidArgument("duplicate triplet at (" + std::to_string(t.row) + ", " +
                              std::to_string(t.col) + ")");
      }
      ++offsets[t.row + 1];
      cols_out.push_back(t.col);
      vals.push_back(t.value);
    }
    for (std::size_t r = 0; r < rows; ++r) offsets[r + 1] += offsets[r];
    return {rows, cols, std::move(offsets), std::move(cols_out), std::move(vals)};
  }

  // Drops exact zeros.
  static SparseMatrix from_dense(const DenseMatrix& a) {
    std::vector<std::size_t> offsets{0};
    std::vector<std::size_t> cols_out;
    std::vector<double> vals;
    for (std::size_t r = 0; r < a.rows(); ++r) {
      for (std::size_t c = 0; c < a.cols(); ++c) {
        if (a(r, c) != 0.0) {
          cols_out.push_back(c);
          vals.push_back(a(r, c));
        }
      }
      offsets.push_back(cols_out.size());
    }
    return {a.rows(), a.cols(), std::move(offsets), std::move(cols_out), std::move(vals)};
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
  std::span<const double> values() const noexcept { return values_; }

  template <typename F>
  void for_each_in_row(std::size_t r, F&& f) const {
    for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) f(col_indices_[k], values_[k]);
  }

  // Stored value or zero.
  double at(std::size_t r, std::size_t c) const {
    auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[r]);
    auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[r + 1]);
    auto it = std::lower_bound(first, last, c);
    return (it != last && *it == c) ? values_[static_cast<std::size_t>(it - col_indices_.begin())] : 0.0;
  }

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  void validate() const {
    if (row_offsets_.size() != rows_ + 1 || row_offsets_.front() != 0 ||
        row_offsets_.back() != col_indices_.size() || col_indices_.size() != values_.size()) {
      throw InvalidArgument("inconsistent CSR arrays for " + detail::dims(rows_, cols_));
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      if (row_offsets_[r] > row_offsets_[r + 1]) throw InvalidArgument("row offsets must be non-decreasing");
      for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
        if (col_indices_[k] >= cols_) {
          throw InvalidArgument("column index " + std::to_string(col_indices_[k]) + " out of range in row " +
                                std::to_string(r));
        }
        if (k > row_offsets_[r] && col_indices_[k] <= col_indices_[k - 1]) {
          throw InvalidArgument("column indices not strictly increasing in row " + std::to_string(r));
        }
      }
    }
    detail::require_finite(values_, "sparse matrix");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_offsets_;
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

template <typename M>
concept RowMatrix = requires(const M& m, std::size_t i) {
  { m.rows() } -> std::convertible_to<std::size_t>;
  { m.cols() } -> std::convertible_to<std::size_t>;
  m.for_each_in_row(i, [](std::size_t, double) {});
};

inline DenseMatrix to_dense(const DenseMatrix& a) { return a; }

inline DenseMatrix to_dense(const SparseMatrix& a) {
  std::vector<double> e(a.rows() * a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    a.for_each_in_row(r, [&](std::size_t c, double v) { e[r * a.cols() + c] = v; });
  }
  return {a.rows(), a.cols(), std::move(e)};
}

inline DenseMatrix transpose(const DenseMatrix& a) {
  std::vector<double> e(a.rows() * a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) e[c * a.rows() + r] = a(r, c);
  return {a.cols(), a.rows(), std::move(e)};
}

template <RowMatrix M>
Vector matvec(const M& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw InvalidArgument("matvec dimension mismatch: matrix is " + detail::dims(a.rows(), a.cols()) +
                          ", vector has length " + std::to_string(x.size()));
  }
  Vector y(a.rows(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double s = 0.0;
    a.for_each_in_row(r, [&](std::size_t c, double v) { s += v * x[c]; });
    y[r] = s;
  }
  return y;
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

inline double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

/// Maximum absolute row sum.
template <RowMatrix M>
double inf_norm(const M& a) {
  double best = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double s = 0.0;
    a.for_each_in_row(r, [&](std::size_t, double v) { s += std::abs(v); });
    best = std::max(best, s);
  }
  return best;
}

/// A = D - L - U. `strict_lower` holds L (the negated strict lower part of A),
/// `strict_upper` holds U. Negation is exact, so recomposition is bit-identical.
struct TriangularSplit {
  Vector diag;
  SparseMatrix strict_lower;
  SparseMatrix strict_upper;

  std::size_t size() const noexcept { return diag.size(); }
};

template <RowMatrix M>
TriangularSplit split_dlu(const M& a) {
  if (a.rows() != a.cols()) {
    throw InvalidArgument("D-L-U split needs a square matrix, got " + detail::dims(a.rows(), a.cols()));
  }
  const std::size_t n = a.rows();
  Vector diag(n, 0.0);
  std::vector<std::size_t> lo_off{0}, up_off{0}, lo_col, up_col;
  std::vector<double> lo_val, up_val;
  for (std::size_t r = 0; r < n; ++r) {
    a.for_each_in_row(r, [&](std::size_t c, double v) {
      if (c == r) {
        diag[r] = v;
      } else if (v == 0.0) {
        return;
      } else if (c < r) {
        lo_col.push_back(c);
        lo_val.push_back(-v);
      } else {
        up_col.push_back(c);
        up_val.push_back(-v);
      }
    });
    lo_off.push_back(lo_col.size());
    up_off.push_back(up_col.size());
  }
  return {std::move(diag), SparseMatrix(n, n, std::move(lo_off), std::move(lo_col), std::move(lo_val)),
          SparseMatrix(n, n, std::move(up_off), std::move(up_col), std::move(up_val))};
}

/// D - L - U as a dense matrix.
inline DenseMatrix recompose(const TriangularSplit& s) {
  const std::size_t n = s.size();
  std::vector<double> e(n * n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    e[r * n + r] = s.diag[r];
    s.strict_lower.for_each_in_row(r, [&](std::size_t c, double v) { e[r * n + c] = -v; });
    s.strict_upper.for_each_in_row(r, [&](std::size_t c, double v) { e[r * n + c] = -v; });
  }
  return {n, n, std::move(e)};
}

/// A^T A. Accumulates over rows of A in index order into the upper triangle, then mirrors,
/// so the result is exactly symmetric.
template <RowMatrix M>
DenseMatrix gram(const M& a) {
  const std::size_t n = a.cols();
  std::vector<double> g(n * n, 0.0);
  std::vector<std::pair<std::size_t, double>> row;
  for (std::size_t k = 0; k < a.rows(); ++k) {
    row.clear();
    a.for_each_in_row(k, [&](std::size_t c, double v) {
      if (v != 0.0) row.emplace_back(c, v);
    });
    for (std::size_t p = 0; p < row.size(); ++p)
      for (std::size_t q = p; q < row.size(); ++q) g[row[p].first * n + row[q].first] += row[p].second * row[q].second;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) g[i * n + j] = g[j * n + i];
  return {n, n, std::move(g)};
}

/// A^T b, accumulated in row order.
template <RowMatrix M>
Vector gram_rhs(const M& a, std::span<const double> b) {
  if (a.rows() != b.size()) {
    throw InvalidArgument("A^T b dimension mismatch: matrix is " + detail::dims(a.rows(), a.cols()) +
                          ", vector has length " + std::to_string(b.size()));
  }
  Vector out(a.cols(), 0.0);
  for (std::size_t k = 0; k < a.rows(); ++k) {
    a.for_each_in_row(k, [&](std::size_t c, double v) { out[c] += v * b[k]; });
  }
  return out;
}

}  // namespace itersolve
