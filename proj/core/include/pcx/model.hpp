#pragma once

#include <string>
#include <vector>

#include "pcx/problem.hpp"

namespace pcx {

/// Linearization data frozen at x_k. Holds a non-owning pointer to the
/// problem, which must outlive the state.
struct ModelState {
  const CompositeProblem* problem = nullptr;
  Vector x;                 // x_k
  double objective = 0.0;   // F(x_k)
  double g_value = 0.0;     // g(x_k)
  Vector inner_value;       // C(x_k)
  Matrix inner_jacobian;    // grad C(x_k), d x m
  Vector channel_value;     // R(x_k)
  double outer_value = 0.0; // s(R(x_k))
  Vector outer_gradient;    // grad s(R(x_k))
  /// Channels whose outer partial is negative (I_k^-), ascending.
  std::vector<int> linearized;
  std::vector<bool> is_linearized;
  /// grad r_i(x_k); populated for linearized channels and for every channel
  /// exposing a gradient oracle.
  std::vector<Vector> channel_gradient;
  /// One deterministic element of the subdifferential of r_i at x_k.
  std::vector<Vector> channel_subgradient;

  int dim() const { return static_cast<int>(x.size()); }
};

/// Freezes values and derivatives at `x`. A channel is linearized iff its
/// outer partial is < -sign_tolerance. Throws ConfigError if such a channel
/// has no gradient oracle or g(x) is not finite.
ModelState build_model(const CompositeProblem& problem, const Vector& x,
                       double sign_tolerance = 0.0);

/// F(x; x_k) = g(x) + h(C_k + J_C (x - x_k)) + s(R_k) + sum_i w_i Phi_i(x; x_k).
double eval_model(const ModelState& state, const Vector& x);

/// The s-part of the model minus s(R_k): sum_i w_i Phi_i(x; x_k).
double channel_model_increment(const ModelState& state, const Vector& x);

/// Sum_i w_i (r_i(x) - r_i(x_k) - Phi_i(x; x_k)); never positive.
double model_design_error(const ModelState& state, const Vector& x);

struct ModelErrorReport {
  int samples = 0;
  int upper_violations = 0;
  int lower_violations = 0;
  /// max over samples of (violation amount) / (1 + |F(x)|).
  double max_normalized_violation = 0.0;
  /// max (F - F_model) / ((L_U/2) d^2) and max (F_model - F) / ((L_L/2) d^2).
  double upper_tightness = 0.0;
  double lower_tightness = 0.0;

  bool passed() const { return upper_violations == 0 && lower_violations == 0; }
};

/// Checks -(L_L/2)|d|^2 - slack <= F(x) - F(x;x_k) <= (L_U/2)|d|^2 + slack with
/// slack = 1e-8 (1 + |F(x)|) at each sample. Samples with F(x) = +inf are skipped.
ModelErrorReport model_error_bounds_check(const ModelState& state,
                                          const ConstantRegistry& constants,
                                          const std::vector<Vector>& samples,
                                          double slack_scale = 1e-8);

struct PsdProjection {
  Matrix projected;  // nearest PSD matrix in Frobenius norm
  Matrix gap;        // projected - input, PSD
};

/// Clips negative eigenvalues of a symmetric matrix. Throws NumericalError
/// when the eigensolver fails.
PsdProjection psd_project(const Matrix& symmetric);

struct CurvatureBlocks {
  Matrix inner;     // H_C = sum_j y_j hess C_j(x_k)
  Matrix outer;     // H_s = G_R^T hess s G_R + sum_{I^-} w_i hess r_i
  Matrix combined;  // symmetrized H_C + H_s
  Matrix projected; // H^+
  Matrix gap;       // H^- = H^+ - combined
  bool has_inner = false;
  bool has_outer_pullback = false;
  bool has_compensation = false;
};

/// Builds H_C, H_s and H^+. Blocks whose second-order data is unavailable are
/// zero.
CurvatureBlocks assemble_curvature(const ModelState& state);

/// Q = mu I + H^+ with cached extremal eigenvalues.
struct ProximalMetric {
  double mu = 1.0;
  Matrix curvature;  // H^+
  Matrix q;
  double sigma_min = 1.0;
  double sigma_max = 1.0;
  /// H^+ is exactly zero, so Q = mu I.
  bool scalar = true;

  double norm_sq(const Vector& v) const { return v.dot(q * v); }
};

/// Throws ConfigError for mu <= 0 or non-square curvature.
ProximalMetric make_metric(double mu, const Matrix& curvature);

/// Metric with H^+ = 0 in dimension m.
ProximalMetric make_metric(double mu, int m);

}  // namespace pcx
