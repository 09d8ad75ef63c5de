#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "itersolve/errors.hpp"
#include "itersolve/matrix.hpp"

namespace itersolve {

/// Upper-triangular system produced by forward elimination.
struct EliminationResult {
  DenseMatrix upper;
  Vector rhs;
};

namespace detail {

inline void check_system(const DenseMatrix& a, std::span<const double> b) {
  if (!a.is_square()) throw InvalidArgument("direct solve needs a square matrix, got " + dims(a.rows(), a.cols()));
  if (b.size() != a.rows()) {
    throw InvalidArgument("right-hand side has length " + std::to_string(b.size()) + ", matrix is " +
                          dims(a.rows(), a.cols()));
  }
}

// Largest |a_ik| over the original column; the reference scale for the singularity test.
inline std::vector<double> column_scales(const DenseMatrix& a) {
  std::vector<double> s(a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) s[c] = std::max(s[c], std::abs(a(r, c)));
  return s;
}

inline void eliminate(std::vector<double>& m, Vector& rhs, std::size_t n, bool pivot,
                      const std::vector<double>& scales) {
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    if (pivot) {
      for (std::size_t r = k + 1; r < n; ++r)
        if (std::abs(m[r * n + k]) > std::abs(m[p * n + k])) p = r;
      if (p != k) {
        for (std::size_t c = 0; c < n; ++c) std::swap(m[k * n + c], m[p * n + c]);
        std::swap(rhs[k], rhs[p]);
      }
    }
    const double piv = m[k * n + k];
    if (std::abs(piv) <= 1e-12 * scales[k]) {
      throw SingularMatrixError(k, "numerically singular: pivot " + std::to_string(piv) +
                                       " at elimination step " + std::to_string(k));
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = m[r * n + k] / piv;
      if (f == 0.0) continue;
      m[r * n + k] = 0.0;
      for (std::size_t c = k + 1; c < n; ++c) m[r * n + c] -= f * m[k * n + c];
      rhs[r] -= f * rhs[k];
    }
  }
}

inline Vector back_substitute(const std::vector<double>& m, const Vector& rhs, std::size_t n) {
  Vector x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m[i * n + j] * x[j];
    x[i] = s / m[i * n + i];
  }
  return x;
}

}  // namespace detail

/// Forward elimination without row exchanges. Only useful for reproducing hand-worked
/// examples; prefer solve_direct.
inline EliminationResult eliminate_without_pivoting(const DenseMatrix& a, std::span<const double> b) {
  detail::check_system(a, b);
  const std::size_t n = a.rows();
  std::vector<double> m(a.entries().begin(), a.entries().end());
  Vector rhs(b.begin(), b.end());
  detail::eliminate(m, rhs, n, false, detail::column_scales(a));
  return {DenseMatrix(n, n, std::move(m)), std::move(rhs)};
}

/// Gaussian elimination with partial pivoting and back substitution.
/// Throws SingularMatrixError when a pivot falls below 1e-12 of its column's original scale.
inline Vector solve_direct(const DenseMatrix& a, std::span<const double> b) {
  detail::check_system(a, b);
  const std::size_t n = a.rows();
  std::vector<double> m(a.entries().begin(), a.entries().end());
  Vector rhs(b.begin(), b.end());
  detail::eliminate(m, rhs, n, true, detail::column_scales(a));
  return detail::back_substitute(m, rhs, n);
}

}  // namespace itersolve
