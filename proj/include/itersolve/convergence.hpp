#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "itersolve/errors.hpp"
#include "itersolve/matrix.hpp"
#include "itersolve/stationary.hpp"

namespace itersolve {

struct SpectralEstimate {
  double rho = 0.0;
  std::size_t iterations_used = 0;
  bool converged = false;
  double tolerance = 0.0;
};

inline constexpr double kDefaultSpectralTol = 1e-6;
inline constexpr std::size_t kDefaultSpectralSteps = 50000;
inline constexpr std::size_t kSpectralWindow = 32;
// SOR is profiled at this weight when the optimal-weight formula does not apply.
inline constexpr double kFallbackSorOmega = 1.5;

/// Power iteration on T from a fixed seed, renormalizing every step. The estimate is
/// the geometric mean of the last 32 growth factors, which settles on rho(T) even when
/// the dominant eigenvalues are a +/- pair or a complex-conjugate pair. Stops once
/// estimates one window apart have agreed within `tol` for a full window of consecutive
/// steps; a single agreement can be a crossing of an oscillating estimate.
inline SpectralEstimate spectral_radius(const DenseMatrix& t, double tol = kDefaultSpectralTol,
                                        std::size_t max_steps = kDefaultSpectralSteps) {
  if (!t.is_square()) throw InvalidArgument("spectral radius needs a square matrix");
  if (!(tol > 0.0)) throw InvalidArgument("spectral radius tolerance must be positive");
  const std::size_t n = t.rows();
  bool all_zero = true;
  for (double e : t.entries()) all_zero = all_zero && e == 0.0;
  if (n == 0 || all_zero) return {0.0, 0, true, tol};

  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + (i % 2 == 0 ? 1e-3 : -1e-3) * static_cast<double>(i);
  const double v0 = norm2(v);
  for (double& e : v) e /= v0;

  std::array<double, kSpectralWindow> log_growth{};
  std::array<double, kSpectralWindow> past_estimate{};
  double estimate = 0.0;
  std::size_t agreeing = 0;
  for (std::size_t step = 1; step <= max_steps; ++step) {
    Vector w = matvec(t, v);
    const double g = norm2(w);
    if (g == 0.0) return {0.0, step, true, tol};
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / g;
    log_growth[step % kSpectralWindow] = std::log(g);
    if (step < kSpectralWindow) continue;

    double sum = 0.0;
    for (double l : log_growth) sum += l;
    estimate = std::exp(sum / static_cast<double>(kSpectralWindow));
    const std::size_t slot = step % kSpectralWindow;
    if (step >= 2 * kSpectralWindow && std::abs(estimate - past_estimate[slot]) <= tol) {
      if (++agreeing >= kSpectralWindow) return {estimate, step, true, tol};
    } else {
      agreeing = 0;
    }
    past_estimate[slot] = estimate;
  }
  return {estimate, max_steps, false, tol};
}

/// 2 / (1 + sqrt(1 - rho_j^2)). Valid when A is positive definite and tridiagonal; the
/// resulting SOR spectral radius is omega* - 1.
inline double optimal_omega(double rho_jacobi) {
  if (!(rho_jacobi >= 0.0 && rho_jacobi < 1.0)) {
    throw InvalidArgument("optimal omega needs a Jacobi spectral radius in [0, 1), got " +
                          std::to_string(rho_jacobi));
  }
  return 2.0 / (1.0 + std::sqrt(1.0 - rho_jacobi * rho_jacobi));
}

/// A-priori iteration count: ceil(log(eta (1 - rho) / (|A| * first_step)) / log(rho)),
/// at least 1. `first_step` is |x1 - x0|.
inline std::size_t estimate_iterations(double eta, double rho, double norm_a, double first_step) {
  if (!(rho < 1.0)) throw NumericalError("no a-priori estimate: spectral radius " + std::to_string(rho) + " >= 1");
  if (!(eta > 0.0) || !(rho >= 0.0) || !(norm_a > 0.0) || !(first_step >= 0.0)) {
    throw InvalidArgument("iteration estimate needs eta > 0, 0 <= rho < 1, |A| > 0, first step >= 0");
  }
  if (rho == 0.0 || first_step == 0.0) return 1;
  const double arg = eta * (1.0 - rho) / (norm_a * first_step);
  if (arg >= 1.0) return 1;
  const double k = std::ceil(std::log(arg) / std::log(rho));
  if (!(k < 1e18)) return std::numeric_limits<std::size_t>::max();
  return k < 1.0 ? 1 : static_cast<std::size_t>(k);
}

enum class RowDominance { Strict, Weak, None };

/// Why a method is expected to converge (or not) for a profiled matrix.
enum class ConvergenceBasis { SufficientCondition, SpectralEstimate, NotConvergent, Unavailable };

inline std::string_view name(ConvergenceBasis b) {
  switch (b) {
    case ConvergenceBasis::SufficientCondition: return "sufficient condition";
    case ConvergenceBasis::SpectralEstimate: return "convergent by spectral estimate";
    case ConvergenceBasis::NotConvergent: return "not convergent";
    case ConvergenceBasis::Unavailable: return "unavailable";
  }
  return "?";
}

struct MatrixProfile {
  std::size_t size = 0;
  bool is_symmetric = false;
  bool is_strictly_diag_dominant = false;
  bool is_weakly_diag_dominant = false;
  bool is_tridiagonal = false;
  bool is_positive_definite = false;
  bool has_zero_diagonal = false;
  std::optional<std::size_t> first_zero_diagonal_row;
  std::vector<RowDominance> row_dominance;

  // Absent when the diagonal has a zero.
  std::optional<SpectralEstimate> jacobi;
  std::optional<SpectralEstimate> gauss_seidel;
  std::optional<SpectralEstimate> sor;
  double sor_omega = kFallbackSorOmega;
  bool sor_omega_optimal = false;
  std::optional<double> omega_star;

  std::optional<Method> recommendation;

  // Filled only when a right-hand side was supplied; zero initial guess.
  std::optional<std::size_t> predicted_jacobi;
  std::optional<std::size_t> predicted_gauss_seidel;
  std::optional<std::size_t> predicted_sor;

  const std::optional<SpectralEstimate>& estimate(MethodKind k) const {
    switch (k) {
      case MethodKind::Jacobi: return jacobi;
      case MethodKind::GaussSeidel: return gauss_seidel;
      case MethodKind::SOR: return sor;
    }
    return jacobi;
  }

  std::optional<std::size_t> predicted(MethodKind k) const {
    switch (k) {
      case MethodKind::Jacobi: return predicted_jacobi;
      case MethodKind::GaussSeidel: return predicted_gauss_seidel;
      case MethodKind::SOR: return predicted_sor;
    }
    return std::nullopt;
  }

  Method method_for(MethodKind k) const { return k == MethodKind::SOR ? Method::sor(sor_omega) : Method{k, 1.0}; }

  /// Spectral radius usable as a schedule hint for `m`, if the profile covers that exact method.
  std::optional<double> rho_for(const Method& m) const {
    const auto& e = estimate(m.kind);
    if (!e) return std::nullopt;
    if (m.kind == MethodKind::SOR && m.omega != sor_omega) return std::nullopt;
    return e->rho;
  }
};

namespace detail {

// Symmetric square-root factorization; succeeds iff every pivot is positive.
inline bool cholesky_succeeds(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<double> l(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / ljj;
    }
  }
  return true;
}

}  // namespace detail

struct Selection {
  Method method;
  std::string rationale;
};

/// Smallest spectral radius wins. Ties within 1e-9 go to Gauss-Seidel, then SOR, then Jacobi.
inline Selection select_method(const MatrixProfile& p) {
  constexpr std::array order{MethodKind::GaussSeidel, MethodKind::SOR, MethodKind::Jacobi};
  std::optional<MethodKind> best;
  double best_rho = 0.0;
  for (MethodKind k : order) {
    const auto& e = p.estimate(k);
    if (!e || !(e->rho < 1.0)) continue;
    if (!best || e->rho < best_rho - 1e-9) {
      best = k;
      best_rho = e->rho;
    }
  }
  if (!best) throw NoConvergentMethodError();
  Method m = p.method_for(*best);
  std::string why = std::string(name(*best)) + " has the smallest spectral radius (" + std::to_string(best_rho) + ")";
  if (*best == MethodKind::SOR) {
    why += p.sor_omega_optimal ? " at the optimal weight omega*=" : " at the fixed non-optimal weight omega=";
    why += std::to_string(p.sor_omega);
  }
  return {m, std::move(why)};
}

inline ConvergenceBasis convergence_basis(const MatrixProfile& p, MethodKind k) {
  const auto& e = p.estimate(k);
  bool sufficient = false;
  switch (k) {
    case MethodKind::Jacobi: sufficient = p.is_strictly_diag_dominant; break;
    case MethodKind::GaussSeidel: sufficient = p.is_positive_definite; break;
    case MethodKind::SOR: sufficient = p.is_positive_definite && p.is_tridiagonal; break;
  }
  if (sufficient && !p.has_zero_diagonal) return ConvergenceBasis::SufficientCondition;
  if (!e) return ConvergenceBasis::Unavailable;
  return e->rho < 1.0 ? ConvergenceBasis::SpectralEstimate : ConvergenceBasis::NotConvergent;
}

/// Structural flags plus spectral radii of all three iteration matrices.
template <RowMatrix M>
MatrixProfile classify(const M& input, double spectral_tol = kDefaultSpectralTol,
                       std::size_t spectral_steps = kDefaultSpectralSteps) {
  if (input.rows() != input.cols()) {
    throw InvalidArgument("classify needs a square matrix, got " + detail::dims(input.rows(), input.cols()));
  }
  const DenseMatrix a = to_dense(input);
  const std::size_t n = a.rows();
  MatrixProfile p;
  p.size = n;

  p.is_symmetric = true;
  p.is_tridiagonal = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j > i && a(i, j) != a(j, i)) p.is_symmetric = false;
      if ((i > j + 1 || j > i + 1) && a(i, j) != 0.0) p.is_tridiagonal = false;
    }
  }

  p.is_strictly_diag_dominant = true;
  p.is_weakly_diag_dominant = true;
  p.row_dominance.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) off += std::abs(a(i, j));
    const double d = std::abs(a(i, i));
    const auto rd = d > off ? RowDominance::Strict : (d == off ? RowDominance::Weak : RowDominance::None);
    p.row_dominance.push_back(rd);
    if (rd != RowDominance::Strict) p.is_strictly_diag_dominant = false;
    if (rd == RowDominance::None) p.is_weakly_diag_dominant = false;
    if (a(i, i) == 0.0 && !p.has_zero_diagonal) {
      p.has_zero_diagonal = true;
      p.first_zero_diagonal_row = i;
    }
  }

  p.is_positive_definite = p.is_symmetric && detail::cholesky_succeeds(a);
  if (p.has_zero_diagonal) return p;

  const auto split = split_dlu(a);
  p.jacobi = spectral_radius(iteration_matrix(split, Method::jacobi()), spectral_tol, spectral_steps);
  p.gauss_seidel = spectral_radius(iteration_matrix(split, Method::gauss_seidel()), spectral_tol, spectral_steps);
  if (p.is_positive_definite && p.is_tridiagonal && p.jacobi->rho < 1.0) {
    p.omega_star = optimal_omega(p.jacobi->rho);
    p.sor_omega = *p.omega_star;
    p.sor_omega_optimal = true;
  }
  p.sor = spectral_radius(iteration_matrix(split, Method::sor(p.sor_omega)), spectral_tol, spectral_steps);

  try {
    p.recommendation = select_method(p).method;
  } catch (const NoConvergentMethodError&) {
    p.recommendation.reset();
  }
  return p;
}

/// classify() plus a-priori iteration counts for `b` from a zero initial guess.
template <RowMatrix M>
MatrixProfile classify(const M& a, std::span<const double> b, double eta,
                       double spectral_tol = kDefaultSpectralTol,
                       std::size_t spectral_steps = kDefaultSpectralSteps) {
  MatrixProfile p = classify(a, spectral_tol, spectral_steps);
  if (p.has_zero_diagonal) return p;
  if (b.size() != a.rows()) throw InvalidArgument("rhs length does not match the matrix");
  const auto split = split_dlu(a);
  const double norm_a = inf_norm(a);
  const Vector zero(a.rows(), 0.0);
  for (MethodKind k : {MethodKind::Jacobi, MethodKind::GaussSeidel, MethodKind::SOR}) {
    const auto& e = p.estimate(k);
    if (!e || !(e->rho < 1.0) || norm_a == 0.0) continue;
    const double step = norm2(sweep(split, p.method_for(k), zero, b));
    const std::size_t khat = estimate_iterations(eta, e->rho, norm_a, step);
    switch (k) {
      case MethodKind::Jacobi: p.predicted_jacobi = khat; break;
      case MethodKind::GaussSeidel: p.predicted_gauss_seidel = khat; break;
      case MethodKind::SOR: p.predicted_sor = khat; break;
    }
  }
  return p;
}

}  // namespace itersolve
