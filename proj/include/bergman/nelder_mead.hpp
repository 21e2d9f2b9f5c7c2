#pragma once

#include <functional>
#include <span>
#include <vector>

namespace bergman {

struct NelderMeadOptions {
  std::size_t max_evaluations = 4000;
  /// Converged when every vertex is within x_tol (max-norm) of the best one and
  /// the value spread is below f_tol_abs + f_tol_rel * |best|.
  double x_tol = 1e-13;
  double f_tol_abs = 1e-30;
  double f_tol_rel = 1e-14;
  /// After convergence, rebuild the simplex around the best point with the
  /// initial steps scaled by restart_scale^k, k = 1..restarts.
  int restarts = 2;
  double restart_scale = 0.1;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Derivative-free simplex minimization (standard reflection / expansion /
/// contraction / shrink coefficients 1, 2, 1/2, 1/2).
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, std::vector<double> steps,
                             const NelderMeadOptions& options = {});

} // namespace bergman
