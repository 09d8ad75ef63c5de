#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "itersolve/errors.hpp"
#include "itersolve/matrix.hpp"

namespace itersolve {

enum class MethodKind { Jacobi, GaussSeidel, SOR };

/// Stationary method plus its relaxation weight. `omega` is only meaningful for SOR.
struct Method {
  MethodKind kind = MethodKind::GaussSeidel;
  double omega = 1.0;

  static constexpr Method jacobi() { return {MethodKind::Jacobi, 1.0}; }
  static constexpr Method gauss_seidel() { return {MethodKind::GaussSeidel, 1.0}; }
  static constexpr Method sor(double w) { return {MethodKind::SOR, w}; }

  friend bool operator==(const Method&, const Method&) = default;
};

inline std::string_view name(MethodKind k) {
  switch (k) {
    case MethodKind::Jacobi: return "jacobi";
    case MethodKind::GaussSeidel: return "gauss-seidel";
    case MethodKind::SOR: return "sor";
  }
  return "?";
}

inline std::optional<MethodKind> parse_method_kind(std::string_view s) {
  if (s == "jacobi") return MethodKind::Jacobi;
  if (s == "gauss-seidel" || s == "gs") return MethodKind::GaussSeidel;
  if (s == "sor") return MethodKind::SOR;
  return std::nullopt;
}

// 0 < omega < 2 is necessary for SOR to converge.
inline void require_valid_omega(const Method& m) {
  if (m.kind == MethodKind::SOR && !(m.omega > 0.0 && m.omega < 2.0)) {
    throw InvalidArgument("SOR weight omega=" + std::to_string(m.omega) +
                          " violates the necessary condition 0 < omega < 2");
  }
}

inline void require_nonzero_diagonal(const TriangularSplit& s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.diag[i] == 0.0) throw ZeroDiagonalError(i);
}

namespace detail {

inline void check_sweep_dims(const TriangularSplit& s, std::size_t x, std::size_t b) {
  if (x != s.size() || b != s.size()) {
    throw InvalidArgument("sweep dimension mismatch: system has " + std::to_string(s.size()) +
                          " unknowns, iterate has " + std::to_string(x) + ", rhs has " + std::to_string(b));
  }
}

// b_i - sum_{j != i} a_ij x_j, with the lower part read from `lo` and the upper part from `up`.
inline double off_diagonal_update(const TriangularSplit& s, std::size_t i, std::span<const double> lo,
                                  std::span<const double> up, double bi) {
  double acc = bi;
  s.strict_lower.for_each_in_row(i, [&](std::size_t j, double v) { acc += v * lo[j]; });
  s.strict_upper.for_each_in_row(i, [&](std::size_t j, double v) { acc += v * up[j]; });
  return acc;
}

}  // namespace detail

/// One Jacobi sweep into `out`; reads only `x_prev`.
inline void jacobi_sweep_into(const TriangularSplit& s, std::span<const double> x_prev, std::span<const double> b,
                              std::span<double> out) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.diag[i] == 0.0) throw ZeroDiagonalError(i);
    out[i] = detail::off_diagonal_update(s, i, x_prev, x_prev, b[i]) / s.diag[i];
  }
}

/// One SOR sweep in place. Computed as (1-w)*x_old + w*gs so that w = 1 gives the
/// Gauss-Seidel value bit for bit and w = 0 leaves x untouched.
inline void sor_sweep_inplace(const TriangularSplit& s, std::span<double> x, std::span<const double> b,
                              double omega) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.diag[i] == 0.0) throw ZeroDiagonalError(i);
    const double gs = detail::off_diagonal_update(s, i, x, x, b[i]) / s.diag[i];
    x[i] = (1.0 - omega) * x[i] + omega * gs;
  }
}

inline void gauss_seidel_sweep_inplace(const TriangularSplit& s, std::span<double> x, std::span<const double> b) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.diag[i] == 0.0) throw ZeroDiagonalError(i);
    x[i] = detail::off_diagonal_update(s, i, x, x, b[i]) / s.diag[i];
  }
}

inline Vector jacobi_sweep(const TriangularSplit& s, std::span<const double> x_prev, std::span<const double> b) {
  detail::check_sweep_dims(s, x_prev.size(), b.size());
  Vector out(s.size());
  jacobi_sweep_into(s, x_prev, b, out);
  return out;
}

inline Vector gauss_seidel_sweep(const TriangularSplit& s, std::span<const double> x_prev,
                                 std::span<const double> b) {
  detail::check_sweep_dims(s, x_prev.size(), b.size());
  Vector x(x_prev.begin(), x_prev.end());
  gauss_seidel_sweep_inplace(s, x, b);
  return x;
}

// Accepts any omega; range checks belong to callers.
inline Vector sor_sweep(const TriangularSplit& s, std::span<const double> x_prev, std::span<const double> b,
                        double omega) {
  detail::check_sweep_dims(s, x_prev.size(), b.size());
  Vector x(x_prev.begin(), x_prev.end());
  sor_sweep_inplace(s, x, b, omega);
  return x;
}

inline Vector sweep(const TriangularSplit& s, const Method& m, std::span<const double> x_prev,
                    std::span<const double> b) {
  switch (m.kind) {
    case MethodKind::Jacobi: return jacobi_sweep(s, x_prev, b);
    case MethodKind::GaussSeidel: return gauss_seidel_sweep(s, x_prev, b);
    case MethodKind::SOR: return sor_sweep(s, x_prev, b, m.omega);
  }
  return {};
}

/// x_next = T x + c.
struct IterationMatrix {
  DenseMatrix T;
  Vector c;
  Method method;
};

/// T for the given method. The triangular inverses (D - L)^-1 and (D - wL)^-1 are applied
/// by forward substitution; no general inverse is formed.
inline DenseMatrix iteration_matrix(const TriangularSplit& s, const Method& m) {
  require_nonzero_diagonal(s);
  const std::size_t n = s.size();
  std::vector<double> t(n * n, 0.0);
  if (m.kind == MethodKind::Jacobi) {
    for (std::size_t i = 0; i < n; ++i) {
      s.strict_lower.for_each_in_row(i, [&](std::size_t j, double v) { t[i * n + j] = v / s.diag[i]; });
      s.strict_upper.for_each_in_row(i, [&](std::size_t j, double v) { t[i * n + j] = v / s.diag[i]; });
    }
    return {n, n, std::move(t)};
  }
  // Solve (D - wL) T = (1-w) D + w U row by row: row i depends on rows j < i through L.
  const double w = m.kind == MethodKind::SOR ? m.omega : 1.0;
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    row[i] = (1.0 - w) * s.diag[i];
    s.strict_upper.for_each_in_row(i, [&](std::size_t j, double v) { row[j] = w * v; });
    s.strict_lower.for_each_in_row(i, [&](std::size_t j, double v) {
      const double f = w * v;
      for (std::size_t c = 0; c < n; ++c) row[c] += f * t[j * n + c];
    });
    for (std::size_t c = 0; c < n; ++c) t[i * n + c] = row[c] / s.diag[i];
  }
  return {n, n, std::move(t)};
}

template <RowMatrix M>
DenseMatrix iteration_matrix(const M& a, const Method& m) {
  return iteration_matrix(split_dlu(a), m);
}

/// The constant term c for right-hand side b: D^-1 b, (D-L)^-1 b, or w (D-wL)^-1 b.
inline Vector iteration_offset(const TriangularSplit& s, const Method& m, std::span<const double> b) {
  require_nonzero_diagonal(s);
  if (b.size() != s.size()) throw InvalidArgument("rhs length does not match the system size");
  const std::size_t n = s.size();
  Vector c(n, 0.0);
  if (m.kind == MethodKind::Jacobi) {
    for (std::size_t i = 0; i < n; ++i) c[i] = b[i] / s.diag[i];
    return c;
  }
  const double w = m.kind == MethodKind::SOR ? m.omega : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = b[i];
    s.strict_lower.for_each_in_row(i, [&](std::size_t j, double v) { acc += w * v * c[j]; });
    c[i] = acc / s.diag[i];
  }
  if (m.kind == MethodKind::SOR)
    for (double& e : c) e *= w;
  return c;
}

template <RowMatrix M>
IterationMatrix iteration_form(const M& a, const Method& m, std::span<const double> b) {
  const auto s = split_dlu(a);
  return {iteration_matrix(s, m), iteration_offset(s, m, b), m};
}

/// b - A x, recomputed from scratch.
template <RowMatrix M>
Vector residual(const M& a, std::span<const double> x, std::span<const double> b) {
  if (b.size() != a.rows()) {
    throw InvalidArgument("residual dimension mismatch: matrix is " + detail::dims(a.rows(), a.cols()) +
                          ", rhs has length " + std::to_string(b.size()));
  }
  Vector r = matvec(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

}  // namespace itersolve
