#include "pcx/driver.hpp"

#include <chrono>
#include <cmath>

#include "json.hpp"
#include "json_line.hpp"

#include "pcx/errors.hpp"
#include "pcx/rng.hpp"

namespace pcx {

void SolverConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("solver config: ") + what);
  };
  require(mu0 > 0.0 && std::isfinite(mu0), "mu0 must be positive");
  require(mu_min > 0.0 && std::isfinite(mu_min), "mu_min must be positive");
  require(alpha1 > 0.0 && alpha1 < alpha2 && alpha2 < 1.0, "need 0 < alpha1 < alpha2 < 1");
  require(nu_inc > 1.0 && std::isfinite(nu_inc), "need nu_inc > 1");
  require(nu_dec > 0.0 && nu_dec < 1.0, "need 0 < nu_dec < 1");
  require(eps_term >= 0.0, "eps_term must be nonnegative");
  require(pred_zero_tol >= 0.0, "pred_zero_tol must be nonnegative");
  require(max_outer >= 0, "max_outer must be nonnegative");
  require(max_rejections >= 0, "max_rejections must be nonnegative");
  require(subproblem_tol > 0.0, "subproblem_tol must be positive");
  require(subproblem_max_iter > 0, "subproblem_max_iter must be positive");
  require(sign_tolerance >= 0.0, "sign_tolerance must be nonnegative");
  require(!model_decrease_threshold || *model_decrease_threshold >= 0.0,
          "model_decrease_threshold must be nonnegative");
  require(inexact_scale >= 0.0 && inexact_power >= 0.0, "inexact schedule must be nonnegative");
}

double SolverConfig::inexact_budget(int outer_index) const {
  if (!inexact) return 0.0;
  return inexact_scale / std::pow(static_cast<double>(outer_index + 1), inexact_power);
}

namespace {

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("solver config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

SolverConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("solver config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("solver config: expected a JSON object");
  SolverConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "version") {
      int v = 0;
      read_key(j, "version", v);
      if (v != SolverConfig::kVersion)
        throw ConfigError("solver config: unsupported version " + std::to_string(v));
    } else if (key == "mu0") read_key(j, "mu0", c.mu0);
    else if (key == "mu_min") read_key(j, "mu_min", c.mu_min);
    else if (key == "alpha1") read_key(j, "alpha1", c.alpha1);
    else if (key == "alpha2") read_key(j, "alpha2", c.alpha2);
    else if (key == "nu_inc") read_key(j, "nu_inc", c.nu_inc);
    else if (key == "nu_dec") read_key(j, "nu_dec", c.nu_dec);
    else if (key == "eps_term") read_key(j, "eps_term", c.eps_term);
    else if (key == "pred_zero_tol") read_key(j, "pred_zero_tol", c.pred_zero_tol);
    else if (key == "max_outer") read_key(j, "max_outer", c.max_outer);
    else if (key == "max_rejections") read_key(j, "max_rejections", c.max_rejections);
    else if (key == "subproblem_tol") read_key(j, "subproblem_tol", c.subproblem_tol);
    else if (key == "subproblem_max_iter") read_key(j, "subproblem_max_iter", c.subproblem_max_iter);
    else if (key == "curvature") read_key(j, "curvature", c.curvature);
    else if (key == "adaptive_mu") read_key(j, "adaptive_mu", c.adaptive_mu);
    else if (key == "sign_tolerance") read_key(j, "sign_tolerance", c.sign_tolerance);
    else if (key == "model_decrease_threshold") {
      if (it.value().is_null()) {
        c.model_decrease_threshold.reset();
      } else {
        double v = 0.0;
        read_key(j, "model_decrease_threshold", v);
        c.model_decrease_threshold = v;
      }
    } else if (key == "inexact") read_key(j, "inexact", c.inexact);
    else if (key == "inexact_scale") read_key(j, "inexact_scale", c.inexact_scale);
    else if (key == "inexact_power") read_key(j, "inexact_power", c.inexact_power);
    else if (key == "seed") read_key(j, "seed", c.seed);
    else throw ConfigError("solver config: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

std::string config_to_json(const SolverConfig& c) {
  detail::JsonLine j;
  j.add("version", SolverConfig::kVersion)
      .add("mu0", c.mu0)
      .add("mu_min", c.mu_min)
      .add("alpha1", c.alpha1)
      .add("alpha2", c.alpha2)
      .add("nu_inc", c.nu_inc)
      .add("nu_dec", c.nu_dec)
      .add("eps_term", c.eps_term)
      .add("pred_zero_tol", c.pred_zero_tol)
      .add("max_outer", c.max_outer)
      .add("max_rejections", c.max_rejections)
      .add("subproblem_tol", c.subproblem_tol)
      .add("subproblem_max_iter", c.subproblem_max_iter)
      .add("curvature", c.curvature)
      .add("adaptive_mu", c.adaptive_mu)
      .add("sign_tolerance", c.sign_tolerance);
  if (c.model_decrease_threshold) j.add("model_decrease_threshold", *c.model_decrease_threshold);
  else j.raw("model_decrease_threshold", "null");
  j.add("inexact", c.inexact)
      .add("inexact_scale", c.inexact_scale)
      .add("inexact_power", c.inexact_power)
      .add("seed", static_cast<std::uint64_t>(c.seed));
  return j.str();
}

int Trace::accepted_steps() const {
  int n = 0;
  for (const auto& s : steps) n += s.accepted ? 1 : 0;
  return n;
}

int Trace::total_rejections() const {
  int n = 0;
  for (const auto& s : steps) n += s.rejections;
  return n;
}

Vector prox_gradient(const ProximalMetric& metric, const Vector& x_k, const Vector& x_plus) {
  if (x_k.size() != x_plus.size() || x_k.size() != metric.q.rows())
    throw ConfigError("prox_gradient: dimension mismatch");
  return metric.q * (x_k - x_plus);
}

ModelDecreaseDecision model_decrease_stop(const StepReport& last, double threshold,
                                          const ConstantRegistry* constants) {
  ModelDecreaseDecision d;
  d.delta = std::max(0.0, last.model_decrease);
  d.stop = d.delta <= threshold;
  d.slope_bound = constants ? std::sqrt(12.0 * (constants->lower_model_constant + last.sigma_max) * d.delta)
                            : std::numeric_limits<double>::quiet_NaN();
  return d;
}

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Trial {
  Vector x_plus;
  double f_q = 0.0;
  double eps = 0.0;
  SubproblemCertificate cert;
};

// Solves the subproblem; in inexact mode the answer is moved away from the
// certified solution by a seeded perturbation whose value excess stays within
// the budget.
Trial solve_trial(LoopState& ls, const ModelState& model, const ProximalMetric& metric, int trial_index) {
  const SolverConfig& cfg = *ls.config;
  SubproblemOptions opts;
  opts.tol = cfg.subproblem_tol;
  opts.max_iter = cfg.subproblem_max_iter;
  opts.warm_start = &ls.dual;
  const double budget = cfg.inexact_budget(ls.outer_index);
  // Half of the budget goes to the inner solve, the rest to the perturbation.
  if (cfg.inexact && budget > 0.0) opts.gap_tol = 0.5 * budget;
  Trial t;
  t.cert = solve_subproblem(model, metric, opts);
  t.x_plus = t.cert.solution;
  t.f_q = t.cert.value;
  t.eps = t.cert.suboptimality;
  if (!cfg.inexact || budget <= 0.0) return t;

  Rng rng(mix(mix(cfg.seed, static_cast<std::uint64_t>(ls.outer_index)), static_cast<std::uint64_t>(trial_index)));
  const Vector dir = rng.unit_vector(model.dim());
  const double dir_q = std::sqrt(metric.norm_sq(dir));
  double scale = std::sqrt(0.5 * budget) / dir_q;
  for (int attempt = 0; attempt < 60; ++attempt, scale *= 0.5) {
    const Vector candidate = t.cert.solution + scale * dir;
    const double value = prox_model_value(model, metric, candidate);
    if (!std::isfinite(value)) continue;
    const double eps = t.cert.suboptimality + std::max(0.0, value - t.cert.value);
    if (eps <= budget) {
      t.x_plus = candidate;
      t.f_q = value;
      t.eps = eps;
      break;
    }
  }
  return t;
}

}  // namespace

StepOutcome step(LoopState& ls) {
  const SolverConfig& cfg = *ls.config;
  const CompositeProblem& problem = *ls.problem;
  StepOutcome out;
  StepReport& rep = out.report;
  rep.outer_index = ls.outer_index;
  rep.f_before = ls.f;
  rep.x_before = ls.x;

  const ModelState model = build_model(problem, ls.x, cfg.sign_tolerance);
  rep.linearized_count = static_cast<int>(model.linearized.size());
  Matrix curvature = Matrix::Zero(model.dim(), model.dim());
  if (cfg.curvature) curvature = assemble_curvature(model).projected;
  // H^+ stays fixed across the rejections of this outer iteration.

  for (int trial = 0;; ++trial) {
    const ProximalMetric metric = make_metric(ls.mu, curvature);
    const Trial t = solve_trial(ls, model, metric, trial);
    const Vector d = t.x_plus - ls.x;

    rep.mu = ls.mu;
    rep.eps = t.eps;
    rep.pred = ls.f - t.f_q;
    rep.pred_used = rep.pred - t.eps;
    rep.step_norm = d.norm();
    rep.metric_step_norm = std::sqrt(metric.norm_sq(d));
    rep.prox_grad_norm = prox_gradient(metric, ls.x, t.x_plus).norm();
    rep.sigma_min = metric.sigma_min;
    rep.sigma_max = metric.sigma_max;
    rep.curvature_norm = metric.sigma_max - metric.mu;
    rep.sub_iterations = t.cert.iterations;
    rep.sub_residual = t.cert.kkt_residual;
    rep.sub_converged = t.cert.converged;
    rep.sub_method = t.cert.method;
    rep.model_decrease = rep.pred + t.eps;
    rep.slope_bound = model_decrease_stop(rep, 0.0, ls.constants).slope_bound;
    rep.x_after = t.x_plus;
    rep.f_after = ls.f;
    rep.act = 0.0;
    rep.rho = std::numeric_limits<double>::quiet_NaN();
    rep.accepted = false;
    rep.mu_next = ls.mu;

    if (rep.pred_used <= cfg.pred_zero_tol * (1.0 + std::abs(ls.f))) {
      out.termination = "pred-zero";
      return out;
    }
    if (rep.prox_grad_norm <= cfg.eps_term) {
      out.termination = "prox-grad-small";
      return out;
    }
    if (cfg.model_decrease_threshold &&
        model_decrease_stop(rep, *cfg.model_decrease_threshold, ls.constants).stop) {
      out.termination = "model-decrease-small";
      return out;
    }

    double f_plus = kInf;
    try {
      f_plus = evaluate_objective(problem, t.x_plus);
    } catch (const OracleContractError&) {
      f_plus = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(f_plus)) {
      rep.f_after = f_plus;
      out.termination = "diverged";
      return out;
    }
    rep.act = ls.f - f_plus;
    rep.rho = rep.act / rep.pred_used;

    if (t.cert.converged && rep.rho >= cfg.alpha1) {
      rep.accepted = true;
      rep.f_after = f_plus;
      if (cfg.adaptive_mu && rep.rho > cfg.alpha2) ls.mu = std::max(cfg.mu_min, cfg.nu_dec * ls.mu);
      rep.mu_next = ls.mu;
      ls.x = t.x_plus;
      ls.f = f_plus;
      return out;
    }

    rep.rejected_mus.push_back(ls.mu);
    ++rep.rejections;
    ls.mu *= cfg.nu_inc;
    rep.mu_next = ls.mu;
    if (rep.rejections > cfg.max_rejections) {
      rep.x_after = ls.x;
      rep.act = 0.0;
      out.termination = "max-rejections";
      return out;
    }
  }
}

Trace run(const CompositeProblem& problem, const Vector& x0, const SolverConfig& config,
          const RunOptions& options) {
  config.validate();
  problem.validate();
  const auto start = std::chrono::steady_clock::now();

  Trace trace;
  trace.instance = options.instance.empty() ? problem.name : options.instance;
  trace.config = config;
  trace.constants = options.constants;
  trace.f_star = options.f_star;
  trace.x0 = x0;

  LoopState ls;
  ls.problem = &problem;
  ls.config = &config;
  ls.constants = trace.constants ? &*trace.constants : nullptr;
  ls.x = x0;
  ls.f = evaluate_objective(problem, x0);
  if (!std::isfinite(ls.f)) throw ConfigError("run: F(x0) is not finite (x0 outside dom g)");
  ls.mu = config.mu0;
  trace.max_iterate_norm = x0.norm();

  if (options.sink) options.sink->begin(trace);
  for (ls.outer_index = 0; ls.outer_index < config.max_outer; ++ls.outer_index) {
    StepOutcome outcome = step(ls);
    trace.max_iterate_norm = std::max(trace.max_iterate_norm, ls.x.norm());
    trace.steps.push_back(std::move(outcome.report));
    if (options.sink) options.sink->step(trace.steps.back());
    if (!outcome.termination.empty()) {
      trace.termination = outcome.termination;
      break;
    }
  }
  if (trace.termination.empty()) trace.termination = "max-outer";
  trace.final_x = ls.x;
  trace.final_f = ls.f;
  trace.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (options.sink) options.sink->end(trace);
  return trace;
}

}  // namespace pcx
