#include "pcx/theory.hpp"

#include <algorithm>
#include <cmath>

#include "json_line.hpp"
#include "pcx/errors.hpp"
#include "pcx/rng.hpp"

namespace pcx::theory {
namespace {

// Product that treats 0 * inf as 0.
double safe_product(std::initializer_list<double> factors) {
  for (double f : factors)
    if (f == 0.0) return 0.0;
  double out = 1.0;
  for (double f : factors) out *= f;
  return out;
}

double squared_sum_root(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<const StepReport*> accepted(const Trace& trace) {
  std::vector<const StepReport*> out;
  for (const auto& s : trace.steps)
    if (s.accepted) out.push_back(&s);
  return out;
}

// L_R over all channels, tightened by the declared map constant.
double map_lipschitz(const CompositeProblem& problem) {
  std::vector<double> l;
  for (const auto& r : problem.channels) l.push_back(r.lipschitz);
  return std::min(squared_sum_root(l), problem.channel_map_lipschitz);
}

// beta_R over all channels.
double all_channel_curvature(const CompositeProblem& problem) {
  std::vector<double> b;
  for (const auto& r : problem.channels) b.push_back(r.gradient_lipschitz);
  return squared_sum_root(b);
}

Matrix channel_jacobian(const CompositeProblem& problem, const Vector& x) {
  Matrix j(problem.num_channels(), problem.dim());
  for (int i = 0; i < problem.num_channels(); ++i) {
    const ConvexPiece& r = problem.channels[static_cast<std::size_t>(i)];
    if (!r.has_gradient())
      throw ConfigError("channel " + std::to_string(i) + " has no gradient oracle");
    j.row(i) = r.gradient(x).transpose();
  }
  return j;
}

bool has_outer(const CompositeProblem& problem) {
  return !problem.outer.zero && problem.num_channels() > 0;
}

double h_value(const CompositeProblem& problem, const Vector& u) {
  return problem.h.zero ? 0.0 : problem.h.value(u);
}

// Gap between the exact and an eps-optimal prox point in the model-level
// inequality, as a function of |y - x+|_Q.
double inexact_tolerance(double dist_q, double eps) {
  if (eps <= 0.0) return 0.0;
  const double r = std::max(0.0, dist_q - std::sqrt(2.0 * eps));
  return 0.5 * dist_q * dist_q - 0.5 * r * r + eps;
}

}  // namespace

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Passed: return "passed";
    case Verdict::Tight: return "tight";
    case Verdict::Failed: return "failed";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::Indicative: return "indicative";
  }
  return "inconclusive";
}

double slack(double rhs) { return 1e-8 * (1.0 + std::abs(rhs)); }

std::string CheckReport::to_json() const {
  detail::JsonLine j;
  j.add("check", check)
      .add("instance", instance)
      .add("samples", samples)
      .add("max_violation", max_violation)
      .add("verdict", to_string(verdict));
  if (!note.empty()) j.add("note", note);
  return j.str();
}

void ViolationTally::add(double violation, double slack_amount) {
  ++samples_;
  if (std::isnan(violation)) {
    ++failures_;
    max_violation_ = kInf;
    return;
  }
  max_violation_ = std::max(max_violation_, violation);
  if (violation > slack_amount) ++failures_;
  else if (violation > 0.0) ++within_slack_;
}

CheckReport ViolationTally::report(const std::string& check, const std::string& instance) const {
  CheckReport r;
  r.check = check;
  r.instance = instance;
  r.samples = samples_;
  r.max_violation = max_violation_;
  if (samples_ == 0) r.verdict = Verdict::Inconclusive;
  else if (failures_ > 0) r.verdict = Verdict::Failed;
  else if (within_slack_ > 0) r.verdict = Verdict::Tight;
  else r.verdict = Verdict::Passed;
  if (failures_ > 0) r.note = std::to_string(failures_) + " violation(s)";
  return r;
}

SpectralEnvelope spectral_envelope(const SolverConfig& config, const ConstantRegistry& constants) {
  SpectralEnvelope e;
  e.psi = constants.upper_model_constant / (2.0 - config.alpha1);
  e.q_lo = std::min(config.mu0, config.mu_min);
  e.q_hi = std::max(config.mu0, config.nu_inc * e.psi) + constants.curvature_cap;
  return e;
}

int rejection_bound(double psi, double mu_k, double nu_inc) {
  if (psi <= mu_k) return 0;
  const double raw = std::log(psi / mu_k) / std::log(nu_inc);
  // Guard against log rounding when psi / mu_k is an exact power of nu_inc.
  const double nearest = std::round(raw);
  const double c = std::abs(raw - nearest) <= 1e-12 * std::max(1.0, std::abs(raw)) ? nearest : std::ceil(raw);
  return std::max(0, static_cast<int>(c));
}

CheckReport check_model_error(const CompositeProblem& problem, const ConstantRegistry& constants,
                              const Vector& lo, const Vector& hi, int pairs, std::uint64_t seed,
                              const std::string& instance) {
  Rng rng(seed);
  ViolationTally tally;
  int skipped = 0;
  for (int p = 0; p < pairs; ++p) {
    const Vector xk = rng.uniform_box(lo, hi);
    const Vector x = rng.uniform_box(lo, hi);
    const double f = evaluate_objective(problem, x);
    if (!std::isfinite(f) || !std::isfinite(evaluate_objective(problem, xk))) {
      ++skipped;
      continue;
    }
    const ModelState st = build_model(problem, xk);
    const double diff = f - eval_model(st, x);
    const double d2 = (x - xk).squaredNorm();
    const double upper = diff - 0.5 * constants.upper_model_constant * d2;
    const double lower = -0.5 * constants.lower_model_constant * d2 - diff;
    tally.add(std::max(upper, lower), 1e-8 * (1.0 + std::abs(f)));
  }
  CheckReport r = tally.report("model-error", instance);
  if (skipped > 0) r.note += (r.note.empty() ? "" : "; ") + std::to_string(skipped) + " pair(s) outside dom g";
  return r;
}

CheckReport check_sufficient_decrease(const Trace& trace) {
  const SolverConfig& cfg = trace.config;
  const double q_lo = std::min(cfg.mu0, cfg.mu_min);
  ViolationTally tally;
  for (const StepReport* s : accepted(trace)) {
    const double root = std::sqrt(2.0 * std::max(0.0, s->eps));
    const double a = std::max(0.0, s->metric_step_norm - root);
    const double b = std::max(0.0, std::sqrt(q_lo) * s->step_norm - root);
    const double required = cfg.alpha1 * (0.5 * std::max(a * a, b * b) - 2.0 * std::max(0.0, s->eps));
    tally.add(required - s->act, slack(required));
  }
  return tally.report("sufficient-decrease", trace.instance);
}

CheckReport check_finite_rejections(const Trace& trace, const ConstantRegistry& constants) {
  const SolverConfig& cfg = trace.config;
  const double psi = spectral_envelope(cfg, constants).psi;
  ViolationTally tally;
  for (const auto& s : trace.steps) {
    const double mu_k = s.rejected_mus.empty() ? s.mu : s.rejected_mus.front();
    const int bound = rejection_bound(psi, mu_k, cfg.nu_inc);
    tally.add(static_cast<double>(s.rejections - bound), 0.0);
  }
  return tally.report("finite-rejections", trace.instance);
}

CheckReport check_spectral(const Trace& trace, const ConstantRegistry& constants) {
  const SpectralEnvelope env = spectral_envelope(trace.config, constants);
  ViolationTally tally;
  for (const auto& s : trace.steps) {
    const double low = env.q_lo - s.sigma_min;
    const double high = s.sigma_max - env.q_hi;
    tally.add(std::max(low, high), slack(std::max(env.q_lo, env.q_hi)));
  }
  return tally.report("spectral", trace.instance);
}

CheckReport check_complexity(const Trace& trace, const ConstantRegistry& constants, double f_lower) {
  const SolverConfig& cfg = trace.config;
  const double q_hi = spectral_envelope(cfg, constants).q_hi;
  const auto acc = accepted(trace);
  ViolationTally tally;
  if (trace.steps.empty() || !std::isfinite(f_lower)) {
    CheckReport r = tally.report("complexity", trace.instance);
    r.note = trace.steps.empty() ? "empty trace" : "no lower bound on F";
    return r;
  }
  const double delta_f = trace.steps.front().f_before - f_lower;
  // Inexact steps relax |d|_Q^2 <= 2 Act / alpha1 to the bound b_k below; the
  // excess is carried as an additive term on Delta_F.
  double extra = 0.0;
  double sum_g2 = 0.0;
  double min_g = kInf;
  int n = 0;
  for (const StepReport* s : acc) {
    ++n;
    const double eps = std::max(0.0, s->eps);
    if (eps > 0.0) {
      const double root = std::sqrt(2.0 * (s->act / cfg.alpha1 + 2.0 * eps)) + std::sqrt(2.0 * eps);
      extra += 0.5 * cfg.alpha1 * (root * root - 2.0 * s->act / cfg.alpha1);
    }
    const double g = s->prox_grad_norm;
    sum_g2 += g * g;
    min_g = std::min(min_g, g);
    const double rhs_avg = 2.0 * q_hi * (delta_f + extra) / (cfg.alpha1 * n);
    const double avg = sum_g2 / n;
    const double rhs_min = std::sqrt(rhs_avg);
    tally.add(std::max(avg - rhs_avg, min_g - rhs_min), slack(std::max(rhs_avg, rhs_min)));
  }
  CheckReport r = tally.report("complexity", trace.instance);
  if (acc.empty()) r.note = "no accepted steps";
  return r;
}

GradientInequalityReport check_gradient_inequality(const CompositeProblem& problem,
                                                   const Trace& trace,
                                                   const ConstantRegistry& constants,
                                                   const std::vector<Vector>& samples) {
  const SolverConfig& cfg = trace.config;
  ViolationTally model_tally;
  ViolationTally function_tally;
  for (const StepReport* s : accepted(trace)) {
    const ModelState st = build_model(problem, s->x_before, cfg.sign_tolerance);
    Matrix curvature = Matrix::Zero(st.dim(), st.dim());
    if (cfg.curvature) curvature = assemble_curvature(st).projected;
    const ProximalMetric metric = make_metric(s->mu, curvature);
    const Vector& xk = s->x_before;
    const Vector& xp = s->x_after;
    const Vector g = metric.q * (xk - xp);
    const double half_gq = 0.5 * metric.norm_sq(xk - xp);  // <Q^-1 G, G> / 2
    const double fq = prox_model_value(st, metric, xp);
    const double f_plus = evaluate_objective(problem, xp);
    const double coeff = 1.0 - constants.upper_model_constant / (2.0 * metric.sigma_min);

    auto probe = [&](const Vector& y) {
      const double fy = evaluate_objective(problem, y);
      if (!std::isfinite(fy)) return;
      const Vector dy = y - xk;
      const double tol = inexact_tolerance(std::sqrt(metric.norm_sq(y - xp)), s->eps);
      const double rhs_model = fq + g.dot(dy) + half_gq;
      model_tally.add(rhs_model - eval_model(st, y) - tol, slack(rhs_model));
      const double rhs_fn = f_plus + g.dot(dy) + coeff * 2.0 * half_gq -
                            0.5 * constants.lower_model_constant * dy.squaredNorm();
      function_tally.add(rhs_fn - fy - tol, slack(rhs_fn));
    };
    probe(xk);
    probe(xp);
    for (const Vector& y : samples) probe(y);
  }
  return {model_tally.report("gradient-inequality-model", trace.instance),
          function_tally.report("gradient-inequality-function", trace.instance)};
}

double contraction_factor(double l_upper, double l_lower, double q_lo, double q_hi,
                          double kappa_bar) {
  const double num = 2.0 - l_upper / q_lo;
  const double den = q_hi * (2.0 + l_lower) * kappa_bar * kappa_bar;
  return 1.0 - std::min(1.0, num / den);
}

double loglog_slope(const std::vector<double>& scales, const std::vector<double>& errors) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < scales.size() && i < errors.size(); ++i) {
    if (scales[i] > 0.0 && errors[i] > 0.0) {
      lx.push_back(std::log(scales[i]));
      ly.push_back(std::log(errors[i]));
    }
  }
  if (lx.size() < 2) return kNaN;
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : kNaN;
}

RateFit fit_qlinear_rate(const Trace& trace, std::optional<double> f_star,
                         const ConstantRegistry& constants, std::optional<Vector> x_star) {
  RateFit fit;
  const auto acc = accepted(trace);
  if (f_star && std::isfinite(*f_star)) {
    fit.f_star = *f_star;
    fit.analytic_f_star = true;
  } else {
    double best = trace.final_f;
    for (const StepReport* s : acc) best = std::min(best, s->f_after);
    fit.f_star = best - 10.0 * trace.config.eps_term;
  }
  const Vector xs = x_star ? *x_star : trace.final_x;

  // Steps whose gaps sit above the rounding floor.
  const double floor = 1e-12 * (1.0 + std::abs(fit.f_star));
  std::vector<const StepReport*> usable;
  for (const StepReport* s : acc) {
    if (s->f_before - fit.f_star > floor && s->f_after - fit.f_star > floor) usable.push_back(s);
    else break;
  }
  const std::size_t tail = (usable.size() + 3) / 4;
  if (tail < 10) {
    fit.note = "tail has " + std::to_string(tail) + " step(s); need 10";
    return fit;
  }
  const std::size_t start = usable.size() - tail;
  fit.tail_start = usable[start]->outer_index;

  std::vector<double> idx;
  std::vector<double> log_gap;
  double q_lo = kInf;
  double q_hi = 0.0;
  double kappa_first = 0.0;
  double kappa_second = 0.0;
  for (std::size_t i = start; i < usable.size(); ++i) {
    const StepReport* s = usable[i];
    const double before = s->f_before - fit.f_star;
    const double after = s->f_after - fit.f_star;
    fit.ratios.push_back(after / before);
    idx.push_back(static_cast<double>(i - start));
    log_gap.push_back(std::log(before));
    q_lo = std::min(q_lo, s->sigma_min);
    q_hi = std::max(q_hi, s->sigma_max);
    const double k = (s->x_before - xs).norm() / s->prox_grad_norm;
    if (i - start < tail / 2) kappa_first = std::max(kappa_first, k);
    else kappa_second = std::max(kappa_second, k);
  }
  idx.push_back(static_cast<double>(tail));
  log_gap.push_back(std::log(usable.back()->f_after - fit.f_star));

  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    mx += idx[i];
    my += log_gap[i];
  }
  mx /= static_cast<double>(idx.size());
  my /= static_cast<double>(idx.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    sxy += (idx[i] - mx) * (log_gap[i] - my);
    sxx += (idx[i] - mx) * (idx[i] - mx);
  }
  fit.q_hat = std::exp(sxy / sxx);
  fit.kappa = std::max(kappa_first, kappa_second);
  fit.kappa_bar = std::max(1.0, fit.kappa);
  fit.q_star = contraction_factor(constants.upper_model_constant, constants.lower_model_constant,
                                  q_lo, q_hi, fit.kappa_bar);

  if (!std::isfinite(fit.kappa) || kappa_second > 2.0 * kappa_first) {
    fit.note = "step-size error bound not observed over the tail";
    return fit;
  }
  if (2.0 - constants.upper_model_constant / q_lo <= 0.0) {
    fit.note = "lower spectral bound below L_U/2; contraction factor is vacuous";
    return fit;
  }
  const bool ok = fit.q_hat <= fit.q_star + slack(fit.q_star);
  if (!fit.analytic_f_star) {
    fit.verdict = Verdict::Indicative;
    fit.note = "F* taken as best observed value minus 10 eps_term";
  } else {
    fit.verdict = ok ? Verdict::Passed : Verdict::Failed;
    if (ok && fit.q_hat > fit.q_star) fit.verdict = Verdict::Tight;
  }
  return fit;
}

LinearizationComparison compare_linearizations(const CompositeProblem& problem, const Vector& x_k,
                                               const std::vector<Vector>& samples,
                                               const std::string& instance) {
  LinearizationComparison cmp;
  for (std::size_t i = 0; i < problem.channels.size(); ++i) {
    const ConvexPiece& r = problem.channels[i];
    if (!r.has_gradient())
      throw ConfigError("compare_linearizations: channel " + std::to_string(i) + " has no gradient oracle");
    if (!std::isfinite(r.gradient_lipschitz))
      throw ConfigError("compare_linearizations: channel " + std::to_string(i) +
                        " has no finite gradient Lipschitz constant");
  }
  const bool outer = has_outer(problem);
  cmp.beta_s = outer ? problem.outer.jacobian_lipschitz : 0.0;
  cmp.l_s = outer ? problem.outer.value_lipschitz : 0.0;
  cmp.l_r = map_lipschitz(problem);
  cmp.beta_r = all_channel_curvature(problem);
  cmp.c_in = 0.5 * safe_product({cmp.l_s, cmp.beta_r});
  cmp.c_out = 0.5 * safe_product({cmp.beta_s, cmp.l_r, cmp.l_r});
  cmp.c_all = cmp.c_in + cmp.c_out;

  ViolationTally t_all;
  ViolationTally t_in;
  ViolationTally t_out;
  if (outer) {
    const Vector rk = problem.channel_values(x_k);
    const double sk = problem.outer_value(rk);
    const Vector gk = problem.outer_gradient(rk);
    const Matrix jk = channel_jacobian(problem, x_k);
    for (const Vector& x : samples) {
      const Vector d = x - x_k;
      const Vector jd = jk * d;
      const Vector rx = problem.channel_values(x);
      const double sx = problem.outer_value(rx);
      LinearizationSample smp;
      smp.d_norm = d.norm();
      smp.e_all = sx - sk - gk.dot(jd);
      smp.e_in = sx - problem.outer_value(rk + jd);
      smp.e_out = sx - sk - gk.dot(rx - rk);
      const double d2 = smp.d_norm * smp.d_norm;
      t_all.add(std::abs(smp.e_all) - cmp.c_all * d2, slack(cmp.c_all * d2));
      t_in.add(std::abs(smp.e_in) - cmp.c_in * d2, slack(cmp.c_in * d2));
      t_out.add(std::abs(smp.e_out) - cmp.c_out * d2, slack(cmp.c_out * d2));
      cmp.max_abs_all = std::max(cmp.max_abs_all, std::abs(smp.e_all));
      cmp.max_abs_in = std::max(cmp.max_abs_in, std::abs(smp.e_in));
      cmp.max_abs_out = std::max(cmp.max_abs_out, std::abs(smp.e_out));
      cmp.samples.push_back(smp);
    }
  } else {
    // s(R(x)) is absent: every error is zero.
    for (const Vector& x : samples) {
      LinearizationSample smp;
      smp.d_norm = (x - x_k).norm();
      cmp.samples.push_back(smp);
      t_all.add(0.0, 0.0);
      t_in.add(0.0, 0.0);
      t_out.add(0.0, 0.0);
    }
  }
  cmp.all = t_all.report("linearization-all", instance);
  cmp.in = t_in.report("linearization-in", instance);
  cmp.out = t_out.report("linearization-out", instance);
  return cmp;
}

HessianSplit hessian_split(const CompositeProblem& problem, const Vector& x_k) {
  const int m = problem.dim();
  Matrix h = Matrix::Zero(m, m);
  if (!problem.h.zero && !problem.inner.zero) {
    if (!problem.inner.has_hessian()) throw ConfigError("hessian_split: C has no Hessian oracle");
    const Vector ck = problem.inner.value(x_k);
    const Vector y = problem.h.has_gradient() ? problem.h.gradient(ck) : problem.h.subgradient(ck);
    for (int j = 0; j < problem.inner.output_dim; ++j)
      if (y[j] != 0.0) h += y[j] * problem.inner.component_hessian(x_k, j);
  }
  if (has_outer(problem)) {
    if (!problem.outer.has_hessian()) throw ConfigError("hessian_split: s has no Hessian oracle");
    const Matrix jr = channel_jacobian(problem, x_k);
    const Vector rk = problem.channel_values(x_k);
    h += jr.transpose() * problem.outer.component_hessian(rk, 0) * jr;
  }
  HessianSplit split;
  split.combined = 0.5 * (h + h.transpose());
  const PsdProjection proj = psd_project(split.combined);
  split.projected = proj.projected;
  split.gap = proj.gap;
  return split;
}

namespace {

double hessian_error_with(const CompositeProblem& problem, const Vector& x_k, const Matrix& h_plus,
                          const Vector& x) {
  const Vector d = x - x_k;
  double err = -0.5 * d.dot(h_plus * d);
  if (!problem.h.zero && !problem.inner.zero) {
    const Vector ck = problem.inner.value(x_k);
    const Matrix jk = problem.inner.jacobian(x_k);
    err += h_value(problem, problem.inner.value(x)) - h_value(problem, ck + jk * d);
  }
  if (has_outer(problem)) {
    const Vector rk = problem.channel_values(x_k);
    const Vector rx = problem.channel_values(x);
    err += problem.outer_value(rx) - problem.outer_value(rk) -
           problem.outer_gradient(rk).dot(rx - rk);
  }
  return err;
}

}  // namespace

double hessian_model_error(const CompositeProblem& problem, const Vector& x_k, const Vector& x) {
  return hessian_error_with(problem, x_k, hessian_split(problem, x_k).projected, x);
}

HessianModelReport check_hessian_model_bounds(const CompositeProblem& problem, const Vector& x_k,
                                              const std::vector<Vector>& directions,
                                              const std::vector<double>& scales,
                                              const std::string& instance) {
  HessianModelReport rep;
  const HessianSplit split = hessian_split(problem, x_k);
  rep.gap_norm = split.gap.operatorNorm();

  double m3c = 0.0;
  double m4c = 0.0;
  if (!problem.h.zero && !problem.inner.zero) {
    const double l_h = problem.h.lipschitz;
    const double beta_h = problem.h.gradient_lipschitz;
    const double gamma_c = problem.inner.hessian_lipschitz;
    const double beta_c = problem.inner.jacobian_lipschitz;
    const double l_c = problem.inner.value_lipschitz;
    m3c = safe_product({l_h, gamma_c}) / 6.0 + safe_product({beta_h, l_c, beta_c}) / 2.0;
    m4c = safe_product({beta_h, beta_c, beta_c}) / 8.0 + safe_product({beta_h, l_c, gamma_c}) / 6.0;
  }
  double m3s = 0.0;
  double m4s = 0.0;
  if (has_outer(problem)) {
    const double beta_s = problem.outer.jacobian_lipschitz;
    const double gamma_s = problem.outer.hessian_lipschitz;
    const double l_r = map_lipschitz(problem);
    const double beta_r = all_channel_curvature(problem);
    m3s = safe_product({beta_s, l_r, beta_r}) / 2.0 + safe_product({gamma_s, l_r, l_r, l_r}) / 6.0;
    m4s = safe_product({beta_s, beta_r, beta_r}) / 8.0;
  }
  rep.m3 = m3c + m3s;
  rep.m4 = m4c + m4s;
  const bool finite = std::isfinite(rep.m3) && std::isfinite(rep.m4);

  ViolationTally upper;
  ViolationTally lower;
  for (double scale : scales) {
    HessianScaleRow row;
    row.scale = scale;
    for (const Vector& dir : directions) {
      const Vector d = scale * dir.normalized();
      const double err = hessian_error_with(problem, x_k, split.projected, x_k + d);
      const double dn = d.norm();
      const double env = finite ? rep.m3 * dn * dn * dn + rep.m4 * dn * dn * dn * dn : kInf;
      const double gap = 0.5 * d.dot(split.gap * d);
      row.max_abs_error = std::max(row.max_abs_error, std::abs(err));
      row.envelope = std::max(row.envelope, env);
      if (finite) {
        upper.add(err - env, slack(env));
        lower.add(-gap - env - err, slack(gap + env));
      }
    }
    rep.rows.push_back(row);
  }
  if (rep.rows.size() >= 2) {
    std::vector<HessianScaleRow> sorted = rep.rows;
    std::sort(sorted.begin(), sorted.end(),
              [](const HessianScaleRow& a, const HessianScaleRow& b) { return a.scale < b.scale; });
    rep.tail_slope = loglog_slope({sorted[0].scale, sorted[1].scale},
                                  {sorted[0].max_abs_error, sorted[1].max_abs_error});
  }
  rep.upper = upper.report("hessian-model-upper", instance);
  rep.lower = lower.report("hessian-model-lower", instance);
  if (!finite) {
    rep.upper.note = "remainder constants are not declared";
    rep.lower.note = rep.upper.note;
  }
  return rep;
}

}  // namespace pcx::theory
