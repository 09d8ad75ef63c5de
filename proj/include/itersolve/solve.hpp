#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "itersolve/convergence.hpp"
#include "itersolve/errors.hpp"
#include "itersolve/matrix.hpp"
#include "itersolve/stationary.hpp"

namespace itersolve {

struct SolverConfig {
  Method method = Method::gauss_seidel();
  double eta = 1e-3;  // stop when |b - A x|_2 < eta
  std::size_t max_iterations = 100000;
  std::optional<Vector> initial_guess;  // zero vector when absent
  std::size_t history_stride = 1;
};

struct ResidualSample {
  std::size_t iteration;
  double norm;
};

struct SolveReport {
  Vector solution;
  Method method;
  std::size_t iterations_run = 0;
  std::optional<std::size_t> predicted_iterations;
  double final_residual_norm = 0.0;
  std::vector<ResidualSample> residual_history;
  bool converged = false;
  double wall_time = 0.0;  // seconds
};

inline constexpr double kDivergenceBound = 1e150;

/// Runs the configured sweep from the initial guess.
///
/// When `profile` carries a spectral radius below 1 for the configured method, the
/// a-priori count k^ (from that radius, |A|_inf and |x1 - x0|_2) is run before the
/// residual is first examined; after that the residual is checked every sweep. Without
/// such an estimate it is checked from the first sweep. The residual is always recomputed
/// as b - A x. Reaching max_iterations is reported through `converged`, not thrown.
template <RowMatrix M>
SolveReport solve(const M& a, std::span<const double> b, const SolverConfig& config,
                  const MatrixProfile* profile = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  if (a.rows() != a.cols()) throw InvalidArgument("solve needs a square matrix, got " + detail::dims(a.rows(), a.cols()));
  if (b.size() != a.rows()) {
    throw InvalidArgument("rhs has length " + std::to_string(b.size()) + ", matrix is " +
                          detail::dims(a.rows(), a.cols()));
  }
  if (!(config.eta > 0.0)) throw InvalidArgument("eta must be positive");
  if (config.max_iterations < 1) throw InvalidArgument("max_iterations must be at least 1");
  if (config.history_stride < 1) throw InvalidArgument("history_stride must be at least 1");
  require_valid_omega(config.method);

  const auto split = split_dlu(a);
  require_nonzero_diagonal(split);
  const std::size_t n = a.rows();

  SolveReport report;
  report.method = config.method;
  Vector x = config.initial_guess.value_or(Vector(n, 0.0));
  if (x.size() != n) throw InvalidArgument("initial guess has length " + std::to_string(x.size()));
  detail::require_finite(x, "initial guess");

  const double rho = profile ? profile->rho_for(config.method).value_or(1.0) : 1.0;
  const bool have_schedule = rho < 1.0;
  const double norm_a = inf_norm(a);

  Vector x0 = x;
  Vector scratch(n);
  std::size_t first_check = 1;
  double last_norm = norm2(residual(a, x, b));
  report.residual_history.push_back({0, last_norm});

  std::size_t k = 0;
  while (k < config.max_iterations) {
    switch (config.method.kind) {
      case MethodKind::Jacobi:
        jacobi_sweep_into(split, x, b, scratch);
        x.swap(scratch);
        break;
      case MethodKind::GaussSeidel: gauss_seidel_sweep_inplace(split, x, b); break;
      case MethodKind::SOR: sor_sweep_inplace(split, x, b, config.method.omega); break;
    }
    ++k;
    for (double e : x) {
      if (!std::isfinite(e) || std::abs(e) > kDivergenceBound) throw DivergedError(k);
    }

    if (k == 1 && have_schedule && norm_a > 0.0) {
      for (std::size_t i = 0; i < n; ++i) x0[i] = x[i] - x0[i];
      const std::size_t khat = estimate_iterations(config.eta, rho, norm_a, norm2(x0));
      report.predicted_iterations = khat;
      first_check = std::clamp<std::size_t>(khat, 1, config.max_iterations);
    }
    if (k < first_check) continue;

    last_norm = norm2(residual(a, x, b));
    const bool done = last_norm < config.eta;
    if (done || k % config.history_stride == 0 || k == config.max_iterations) {
      report.residual_history.push_back({k, last_norm});
    }
    if (done) {
      report.converged = true;
      break;
    }
  }

  report.solution = std::move(x);
  report.iterations_run = k;
  report.final_residual_norm = last_norm;
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace itersolve
