#pragma once

#include <string>
#include <vector>

#include "pcx/model.hpp"

namespace pcx {

/// Dual variables of the primal-dual scheme, reusable across outer iterations.
struct DualState {
  std::vector<Vector> blocks;
};

struct SubproblemOptions {
  /// Absolute tolerance on the fixed-point residual, scaled by
  /// (1 + |x_k| sigma_max).
  double tol = 1e-8;
  /// When positive, the primal-dual path also stops once the certified
  /// suboptimality falls to this level.
  double gap_tol = 0.0;
  int max_iter = 50000;
  int power_iterations = 30;
  double power_tol = 1e-6;
  /// In/out warm start for the dual blocks; ignored when shapes differ.
  DualState* warm_start = nullptr;
};

struct SubproblemCertificate {
  Vector solution;
  /// F_Q(solution; x_k) = F(solution; x_k) + |solution - x_k|_Q^2 / 2.
  double value = 0.0;
  /// F(solution; x_k).
  double model_value = 0.0;
  double kkt_residual = 0.0;
  /// kkt_residual^2 / (2 sigma_min(Q)).
  double suboptimality = 0.0;
  int iterations = 0;
  bool converged = true;
  /// Some piece was handled by diminishing-step subgradients.
  bool slow_path = false;
  /// "closed-form", "linear-solve" or "primal-dual".
  std::string method;
};

/// F_Q(x; x_k).
double prox_model_value(const ModelState& state, const ProximalMetric& metric, const Vector& x);

/// argmin_x F(x; x_k) + |x - x_k|_Q^2 / 2. Throws NumericalError when the
/// returned point has g = +inf, ConfigError when a required oracle is missing.
SubproblemCertificate solve_subproblem(const ModelState& state, const ProximalMetric& metric,
                                       const SubproblemOptions& options = {});

/// Zoom grid search for m <= 3. Box defaults to x_k +- radius per coordinate.
struct GridSpec {
  Vector lo;
  Vector hi;
  double radius = 4.0;
  int points_per_dim = 41;
  int levels = 12;
  double shrink = 0.25;
};

/// Reference solve by ADMM with exact proxes (Newton-based for smooth
/// channels without a prox oracle).
struct HighAccuracySpec {
  double tol = 1e-12;
  int max_iter = 400000;
};

/// Test oracle. Throws ConfigError for grid mode with m > 3.
Vector oracle_solve(const ModelState& state, const ProximalMetric& metric, const GridSpec& spec);
Vector oracle_solve(const ModelState& state, const ProximalMetric& metric,
                    const HighAccuracySpec& spec = {});

}  // namespace pcx
