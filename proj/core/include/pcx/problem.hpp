#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pcx/types.hpp"

namespace pcx {

/// A closed convex function, used for g, h and each channel r_i.
///
/// `value` may return kInf only for g (indicator-type pieces). `subgradient`
/// must return one deterministic element of the convex subdifferential; for
/// piecewise functions the element is the limit taken from the +direction of
/// the last coordinate. `prox(v, t)` returns argmin_y piece(y) + |y-v|^2/(2t).
///
/// The smooth-channel fields (`gradient`, `hessian`, `gradient_lipschitz`,
/// `linearizable`) only matter when the piece is used as a channel r_i or,
/// for `gradient`/`gradient_lipschitz`, when h is smooth.
struct ConvexPiece {
  std::string name;
  int dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> subgradient;
  std::function<Vector(const Vector&, double)> prox;
  /// Lipschitz constant of the value; kInf means unbounded.
  double lipschitz = kInf;
  /// The piece is identically zero; solvers may skip it.
  bool zero = false;

  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
  /// Lipschitz constant of the gradient (beta_{r_i}, or beta_h for h).
  double gradient_lipschitz = kInf;
  /// Lipschitz constant of the Hessian, when C^2 data is declared.
  double hessian_lipschitz = kInf;
  /// Channel may be linearized (negative outer partial is possible on the
  /// level set). Such channels need `gradient` and a finite
  /// `gradient_lipschitz`.
  bool linearizable = false;
  /// Points where the piece is not differentiable are expected (finite
  /// difference checks are skipped for it).
  bool nonsmooth = false;

  bool has_prox() const { return static_cast<bool>(prox); }
  bool has_gradient() const { return static_cast<bool>(gradient); }
  bool has_hessian() const { return static_cast<bool>(hessian); }
};

/// A C^1 map R^in -> R^out (C, or s with out = 1).
struct SmoothMap {
  std::string name;
  int input_dim = 0;
  int output_dim = 0;
  std::function<Vector(const Vector&)> value;
  std::function<Matrix(const Vector&)> jacobian;
  /// Hessian of output component `j` at a point.
  std::function<Matrix(const Vector&, int)> component_hessian;
  /// Lipschitz constant of the Jacobian (beta_C / beta_s).
  double jacobian_lipschitz = 0.0;
  /// Lipschitz constant of the value (L_C), or for s the gradient bound L_s
  /// over the declared region. kInf means unbounded.
  double value_lipschitz = kInf;
  /// Lipschitz constant of the component Hessians (gamma_C / gamma_s).
  double hessian_lipschitz = kInf;
  /// Map is identically zero.
  bool zero = false;

  bool has_hessian() const { return static_cast<bool>(component_hessian); }
};

/// F(x) = g(x) + h(C(x)) + s(R(x)).
struct CompositeProblem {
  std::string name;
  ConvexPiece g;
  ConvexPiece h;
  SmoothMap inner;   // C : R^m -> R^d
  SmoothMap outer;   // s : R^n -> R
  std::vector<ConvexPiece> channels;  // r_1..r_n
  /// Optional Lipschitz constant of R as a whole map. When finite it is used
  /// instead of |(L_{r_1},...,L_{r_n})|_2 if it is tighter.
  double channel_map_lipschitz = kInf;

  int dim() const { return g.dim; }
  int num_channels() const { return static_cast<int>(channels.size()); }

  /// Checks the dimension chain and the linearizable-channel requirements.
  /// Throws ConfigError.
  void validate() const;

  Vector channel_values(const Vector& x) const;
  double outer_value(const Vector& y) const;
  Vector outer_gradient(const Vector& y) const;
};

/// Constants feeding every bound; derived values are pure functions of the
/// primitives.
struct ConstantRegistry {
  double h_lipschitz = 0.0;                // L_h
  double inner_jacobian_lipschitz = 0.0;   // beta_C
  double outer_jacobian_lipschitz = 0.0;   // beta_s
  double outer_gradient_bound = 0.0;       // L_s
  std::vector<double> channel_lipschitz;           // L_{r_i}
  std::vector<double> channel_gradient_lipschitz;  // beta_{r_i}
  std::vector<int> linearizable;                   // I^-

  // derived
  double channel_map_lipschitz = 0.0;  // L_R
  double linearized_curvature = 0.0;   // beta_R
  double upper_model_constant = 0.0;   // L_U
  double lower_model_constant = 0.0;   // L_L
  double curvature_cap = 0.0;          // h-bar

  /// Constants came from sampling rather than analytic declaration.
  bool estimated = false;
};

/// L_U, L_L, h-bar and friends from primitive constants. `declared_map_lipschitz`
/// optionally tightens L_R.
ConstantRegistry derive_constants(double h_lipschitz, double inner_jacobian_lipschitz,
                                  double outer_jacobian_lipschitz,
                                  double outer_gradient_bound,
                                  const std::vector<double>& channel_lipschitz,
                                  const std::vector<double>& channel_gradient_lipschitz,
                                  const std::vector<int>& linearizable,
                                  double declared_map_lipschitz = kInf);

/// Registry from the problem's declared constants. `linearizable` defaults to
/// the channels flagged as linearizable.
ConstantRegistry derive_constants(const CompositeProblem& problem,
                                  std::optional<std::vector<int>> linearizable = {});

/// g(x) + h(C(x)) + s(R(x)); kInf exactly when g(x) is +inf.
double evaluate_objective(const CompositeProblem& problem, const Vector& x);

struct ValidationOptions {
  int probe_count = 200;
  std::uint64_t seed = 0;
  /// Finite-difference step is fd_step * (1 + |x|).
  double fd_step = 1e-5;
  double fd_tolerance = 1e-4;
  double convexity_tolerance = 1e-9;
  double prox_tolerance = 1e-7;
  /// Probe box for x. Empty means the unit ball around the origin.
  Vector box_lo;
  Vector box_hi;
};

struct OracleCheck {
  std::string oracle;   // e.g. "C.jacobian", "r[2].convexity"
  std::string kind;     // "finite-difference", "convexity", "lipschitz", ...
  double observed = 0.0;   // max discrepancy / max ratio observed
  double tolerance = 0.0;
  int violations = 0;
  int samples = 0;
  bool skipped = false;
  bool passed = true;
};

struct ValidationReport {
  std::vector<OracleCheck> checks;
  bool passed = true;

  const OracleCheck* find(const std::string& oracle, const std::string& kind) const;
};

/// Samples the oracles: finite-difference agreement of Jacobians, gradients
/// and Hessians, convexity and subgradient inequalities, prox optimality and
/// declared-vs-observed Lipschitz ratios. Failures are reported, not thrown.
ValidationReport validate_oracles(const CompositeProblem& problem,
                                  const ValidationOptions& options);

}  // namespace pcx
