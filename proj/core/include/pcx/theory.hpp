#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcx/driver.hpp"

namespace pcx::theory {

enum class Verdict { Passed, Tight, Failed, Inconclusive, Indicative };

std::string to_string(Verdict verdict);

/// Additive slack 1e-8 (1 + |rhs|).
double slack(double rhs);

struct CheckReport {
  std::string check;
  std::string instance;
  int samples = 0;
  /// max over samples of (required - observed); negative means margin.
  double max_violation = -kInf;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;

  bool failed() const { return verdict == Verdict::Failed; }
  /// {"check", "instance", "samples", "max_violation", "verdict"} plus "note"
  /// when non-empty.
  std::string to_json() const;
};

/// Accumulates violations `required - observed` against their slack.
class ViolationTally {
 public:
  void add(double violation, double slack_amount);
  CheckReport report(const std::string& check, const std::string& instance) const;

 private:
  int samples_ = 0;
  int failures_ = 0;
  int within_slack_ = 0;
  double max_violation_ = -kInf;
};

/// Spectral envelope of the metrics: q_lo = min(mu0, mu_min) and
/// q_hi = max(mu0, nu_inc L_U / (2 - alpha1)) + h-bar.
struct SpectralEnvelope {
  double q_lo = 0.0;
  double q_hi = 0.0;
  double psi = 0.0;  // L_U / (2 - alpha1)
};

SpectralEnvelope spectral_envelope(const SolverConfig& config, const ConstantRegistry& constants);

/// Largest rejection count allowed from mu_k: ceil(log(psi/mu_k)/log nu_inc)_+.
int rejection_bound(double psi, double mu_k, double nu_inc);

/// Two-sided model error bound on (x_k, x) pairs drawn uniformly from the box.
CheckReport check_model_error(const CompositeProblem& problem, const ConstantRegistry& constants,
                              const Vector& lo, const Vector& hi, int pairs, std::uint64_t seed,
                              const std::string& instance = "");

/// Every accepted step: Act >= alpha1 (1/2 (|d|_Q - sqrt(2 eps))_+^2 - 2 eps),
/// which is alpha1/2 |d|_Q^2 for exact solves, and Act >= alpha1 q_lo/2 |d|^2
/// when eps = 0.
CheckReport check_sufficient_decrease(const Trace& trace);

/// Rejection count per outer iteration against rejection_bound.
CheckReport check_finite_rejections(const Trace& trace, const ConstantRegistry& constants);

/// Spectral envelope on the final trial of every outer iteration.
CheckReport check_spectral(const Trace& trace, const ConstantRegistry& constants);

/// Average and min prox-gradient bounds on every prefix of accepted
/// steps with Delta_F = F(x0) - f_lower.
CheckReport check_complexity(const Trace& trace, const ConstantRegistry& constants, double f_lower);

struct GradientInequalityReport {
  CheckReport model;     // model-level inequality
  CheckReport function;  // function-level inequality
};

/// Prox-gradient inequality, model and function forms, at every accepted step
/// for y in {x_k, x_{k+1}} and the given samples (points with F(y) = +inf are
/// skipped). Inexact steps widen the tolerance by the eps-ball around the
/// exact minimizer.
GradientInequalityReport check_gradient_inequality(const CompositeProblem& problem,
                                                   const Trace& trace,
                                                   const ConstantRegistry& constants,
                                                   const std::vector<Vector>& samples);

struct RateFit {
  int tail_start = 0;
  /// (F(x_{k+1}) - F*) / (F(x_k) - F*) over the tail.
  std::vector<double> ratios;
  double q_hat = kNaN;
  double q_star = kNaN;
  double kappa = kNaN;
  double kappa_bar = kNaN;
  double f_star = kNaN;
  bool analytic_f_star = false;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

/// q* = 1 - min{1, (2 - L_U/q_lo) / (q_hi (2 + L_L) kappa_bar^2)}.
double contraction_factor(double l_upper, double l_lower, double q_lo, double q_hi,
                          double kappa_bar);

/// Geometric fit over the last quarter of accepted steps. Without an analytic
/// F* the best observed value minus 10 eps_term is used and the verdict is at
/// best Indicative. x* defaults to the final iterate.
RateFit fit_qlinear_rate(const Trace& trace, std::optional<double> f_star,
                         const ConstantRegistry& constants,
                         std::optional<Vector> x_star = std::nullopt);

/// Log-log least-squares slope of errors against scales (zero errors are
/// dropped).
double loglog_slope(const std::vector<double>& scales, const std::vector<double>& errors);

struct LinearizationSample {
  double d_norm = 0.0;
  double e_all = 0.0;
  double e_in = 0.0;
  double e_out = 0.0;
};

struct LinearizationComparison {
  std::vector<LinearizationSample> samples;
  /// Bound coefficients multiplying |d|^2.
  double c_all = 0.0;
  double c_in = 0.0;
  double c_out = 0.0;
  double beta_s = 0.0;
  double l_s = 0.0;
  double l_r = 0.0;
  double beta_r = 0.0;
  CheckReport all;
  CheckReport in;
  CheckReport out;
  /// Largest |E|, by type.
  double max_abs_all = 0.0;
  double max_abs_in = 0.0;
  double max_abs_out = 0.0;
};

/// Full, inner-only and outer-only linearizations of s(R(x)) around x_k.
/// Throws ConfigError when a channel lacks a gradient oracle or a finite
/// gradient Lipschitz constant.
LinearizationComparison compare_linearizations(const CompositeProblem& problem, const Vector& x_k,
                                               const std::vector<Vector>& samples,
                                               const std::string& instance = "");

struct HessianScaleRow {
  double scale = 0.0;
  /// max over directions of |F - F_{H+}|.
  double max_abs_error = 0.0;
  /// max over directions of the envelope M3 |d|^3 + M4 |d|^4.
  double envelope = 0.0;
};

struct HessianModelReport {
  double m3 = kNaN;
  double m4 = kNaN;
  double gap_norm = 0.0;  // |H^-|
  std::vector<HessianScaleRow> rows;
  /// Slope over the two smallest scales.
  double tail_slope = kNaN;
  CheckReport upper;
  CheckReport lower;
};

/// F(x) - F_{H+}(x; x_k) with F_{H+} = g + h(C_k + J d) + s(R_k)
/// + grad s(R_k)^T (R(x) - R_k) + d^T H^+ d / 2, H = H_C + J_R^T hess s J_R.
double hessian_model_error(const CompositeProblem& problem, const Vector& x_k, const Vector& x);

struct HessianSplit {
  Matrix combined;
  Matrix projected;
  Matrix gap;
};

/// H_C + J_R^T hess s J_R at x_k and its PSD split.
HessianSplit hessian_split(const CompositeProblem& problem, const Vector& x_k);

/// Third- and fourth-order envelope of the Hessian-augmented model at unit directions scaled by each entry of `scales`.
HessianModelReport check_hessian_model_bounds(const CompositeProblem& problem, const Vector& x_k,
                                              const std::vector<Vector>& directions,
                                              const std::vector<double>& scales,
                                              const std::string& instance = "");

}  // namespace pcx::theory
