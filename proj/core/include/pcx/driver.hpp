#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pcx/model.hpp"
#include "pcx/subsolver.hpp"

namespace pcx {

struct SolverConfig {
  static constexpr int kVersion = 1;

  double mu0 = 1.0;
  double mu_min = 1e-6;
  double alpha1 = 0.1;
  double alpha2 = 0.75;
  double nu_inc = 2.0;
  double nu_dec = 0.5;
  double eps_term = 1e-8;
  /// Pred counts as zero when Pred <= pred_zero_tol * (1 + |F(x_k)|).
  double pred_zero_tol = 1e-14;
  int max_outer = 500;
  int max_rejections = 60;
  double subproblem_tol = 1e-8;
  int subproblem_max_iter = 50000;
  /// Include H^+ in Q_k.
  bool curvature = true;
  /// Decrease mu after very successful steps; false freezes mu unless a step
  /// is rejected.
  bool adaptive_mu = true;
  double sign_tolerance = 0.0;
  /// Stop once Delta_k falls below this value.
  std::optional<double> model_decrease_threshold;
  /// Inexact mode: eps_k = inexact_scale / k^inexact_power (k = 1, 2, ...).
  bool inexact = false;
  double inexact_scale = 1e-4;
  double inexact_power = 2.0;
  std::uint64_t seed = 0;

  /// Throws ConfigError when parameter ranges are violated.
  void validate() const;
  double inexact_budget(int outer_index) const;
};

/// Parses a JSON config. Missing keys keep defaults; unknown keys, a wrong
/// version or wrong types raise ConfigError.
SolverConfig config_from_json(const std::string& text);
std::string config_to_json(const SolverConfig& config);

struct StepReport {
  int outer_index = 0;
  /// mu of the trial that ended the iteration.
  double mu = 0.0;
  double mu_next = 0.0;
  int rejections = 0;
  std::vector<double> rejected_mus;
  double pred = 0.0;       // F(x_k) - F_Q(x+; x_k)
  double pred_used = 0.0;  // pred - eps
  double act = 0.0;
  double rho = 0.0;
  double eps = 0.0;
  bool accepted = false;
  double step_norm = 0.0;
  double metric_step_norm = 0.0;
  double prox_grad_norm = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double curvature_norm = 0.0;
  int linearized_count = 0;
  int sub_iterations = 0;
  double sub_residual = 0.0;
  bool sub_converged = true;
  std::string sub_method;
  double f_before = 0.0;
  double f_after = 0.0;
  /// Delta_k upper estimate F(x_k) - F_Q(x+; x_k) + eps.
  double model_decrease = 0.0;
  /// sqrt(12 (L_L + sigma_max) Delta_k); NaN without constants.
  double slope_bound = 0.0;
  Vector x_before;
  Vector x_after;
};

struct Trace {
  std::string instance;
  SolverConfig config;
  std::optional<ConstantRegistry> constants;
  /// Known optimal value, NaN when unknown.
  double f_star = std::numeric_limits<double>::quiet_NaN();
  Vector x0;
  std::vector<StepReport> steps;
  /// pred-zero, prox-grad-small, model-decrease-small, max-outer,
  /// max-rejections or diverged.
  std::string termination;
  Vector final_x;
  double final_f = 0.0;
  double max_iterate_norm = 0.0;
  double wall_time = 0.0;

  int accepted_steps() const;
  int total_rejections() const;
};

/// Receives the trace as it is produced.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void begin(const Trace& trace) = 0;
  virtual void step(const StepReport& report) = 0;
  virtual void end(const Trace& trace) = 0;
};

struct RunOptions {
  std::string instance;
  std::optional<ConstantRegistry> constants;
  double f_star = std::numeric_limits<double>::quiet_NaN();
  TraceSink* sink = nullptr;
};

/// Adaptive proximal linearized method. Throws ConfigError when g(x0) is not finite or the config is
/// invalid.
Trace run(const CompositeProblem& problem, const Vector& x0, const SolverConfig& config,
          const RunOptions& options = {});

/// Loop state threaded through `step`.
struct LoopState {
  const CompositeProblem* problem = nullptr;
  const SolverConfig* config = nullptr;
  const ConstantRegistry* constants = nullptr;
  Vector x;
  double f = 0.0;
  double mu = 1.0;
  int outer_index = 0;
  DualState dual;
  std::uint64_t perturbation_stream = 0;
};

struct StepOutcome {
  StepReport report;
  /// Empty while the loop continues.
  std::string termination;
};

/// One outer iteration: builds the model and H^+, then retries
/// with growing mu until a trial is accepted or a stop rule fires. Updates the
/// loop state on acceptance.
StepOutcome step(LoopState& state);

/// Q (x_k - x+).
Vector prox_gradient(const ProximalMetric& metric, const Vector& x_k, const Vector& x_plus);

struct ModelDecreaseDecision {
  bool stop = false;
  double delta = 0.0;
  double slope_bound = 0.0;
};

/// Delta_k-based stop decision from the latest report.
ModelDecreaseDecision model_decrease_stop(const StepReport& last, double threshold,
                                          const ConstantRegistry* constants = nullptr);

}  // namespace pcx
