// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "pcx/driver.hpp"
#include "pcx/pieces.hpp"
#include "pcx/rng.hpp"
#include "pcx/subsolver.hpp"
#include "pcx/theory.hpp"
#include "pcx/trace_io.hpp"
#include "pcx/zoo.hpp"

using namespace pcx;
using theory::CheckReport;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void require(Outcome& o, bool ok, const std::string& why) {
  if (!ok) {
    if (o.pass) o.detail = why;
    o.pass = false;
  }
}

bool report_ok(const CheckReport& r) { return r.verdict != theory::Verdict::Failed; }

const std::vector<std::string> kCore = {"P1", "P2", "P3", "P4", "P5"};
const std::vector<std::string> kAll = {"P1", "P1-smooth", "P2", "P3", "P4", "P5",
                                       "quadratic-family", "C2-cubic", "C2-indefinite"};

RunOptions options_for(const zoo::BenchmarkInstance& inst) {
  RunOptions o;
  o.instance = inst.name;
  o.constants = inst.constants;
  if (inst.f_star) o.f_star = *inst.f_star;
  return o;
}

bool validated(const zoo::BenchmarkInstance& inst) {
  ValidationOptions v;
  v.box_lo = inst.sample_lo;
  v.box_hi = inst.sample_hi;
  v.seed = 17;
  return validate_oracles(inst.problem, v).passed;
}

struct RunSet {
  std::vector<std::pair<zoo::BenchmarkInstance, Trace>> runs;
};

// Benchmark runs shared by criteria 3-5: every instance, five seeds, the
// default config and a small starting mu that forces rejections.
const RunSet& benchmark_runs() {
  static const RunSet set = [] {
    RunSet s;
    for (const auto& name : kAll) {
      for (std::uint64_t seed : {0u, 1u, 2u, 3u, 4u}) {
        for (int variant = 0; variant < 3; ++variant) {
          zoo::BenchmarkInstance inst = zoo::instantiate(name, "{}", seed);
          SolverConfig cfg;
          cfg.seed = seed;
          if (variant == 1) cfg.mu0 = 1e-3;
          if (variant == 2) {
            cfg.mu0 = 1e-2;
            cfg.curvature = false;
          }
          Trace t = run(inst.problem, inst.x0, cfg, options_for(inst));
          s.runs.emplace_back(std::move(inst), std::move(t));
        }
      }
    }
    return s;
  }();
  return set;
}

Outcome criterion1() {
  Outcome o;
  int pairs = 0;
  int failed = 0;
  double worst = -kInf;
  for (const auto& name : kCore) {
    const auto inst = zoo::instantiate(name, "{}", 0);
    require(o, validated(inst), name + " fails oracle validation");
    const CheckReport r = theory::check_model_error(inst.problem, inst.constants, inst.sample_lo,
                                                    inst.sample_hi, 1000, 101, name);
    pairs += r.samples;
    worst = std::max(worst, r.max_violation);
    if (r.verdict == theory::Verdict::Failed) ++failed;
    require(o, r.samples == 1000, name + ": fewer than 1000 pairs evaluated");
    require(o, !r.failed(), name + ": " + r.note);
  }
  if (o.pass) o.detail = fmt::format("{} pairs, {} failing instance(s), max excess {:.3g}", pairs, failed, worst);
  return o;
}

Outcome criterion2() {
  Outcome o;
  Rng rng(2024);
  double worst_threshold = 0.0;
  int accepted = 0;
  for (int i = 0; i < 100; ++i) {
    const int m = 1 + static_cast<int>(rng.uniform() * 6.0);
    const double l = rng.uniform(0.25, 8.0);
    const auto inst = zoo::instantiate("quadratic-family", fmt::format(R"({{"m":{},"curvature":{:.17g}}})", m, l), 0);
    const double lu = inst.constants.upper_model_constant;
    require(o, std::abs(lu - l) <= 1e-12 * l, "L_U differs from the curvature");
    const Vector x = rng.uniform_box(inst.sample_lo, inst.sample_hi);

    auto one_step = [&](double sigma) {
      SolverConfig cfg;
      cfg.mu0 = sigma;
      cfg.curvature = false;
      cfg.max_rejections = 0;
      LoopState ls;
      ls.problem = &inst.problem;
      ls.config = &cfg;
      ls.x = x;
      ls.f = evaluate_objective(inst.problem, x);
      ls.mu = sigma;
      return step(ls).report;
    };
    const double threshold = lu / (2.0 - SolverConfig{}.alpha1);
    const StepReport at = one_step(threshold);
    const double gap = std::abs(at.rho - SolverConfig{}.alpha1);
    worst_threshold = std::max(worst_threshold, gap);
    require(o, gap <= 1e-10, fmt::format("instance {}: |rho - alpha1| = {:.3g}", i, gap));

    const double above = threshold * (1.0 + rng.uniform(1e-3, 3.0));
    const StepReport r = one_step(above);
    if (r.accepted && r.rejections == 0) ++accepted;
    require(o, r.accepted && r.rejections == 0, fmt::format("instance {}: sigma above threshold rejected", i));
  }
  if (o.pass) o.detail = fmt::format("max |rho - alpha1| = {:.3g}; {} / 100 accepted above threshold", worst_threshold, accepted);
  return o;
}

Outcome trace_criterion(const std::function<CheckReport(const zoo::BenchmarkInstance&, const Trace&)>& check) {
  Outcome o;
  int samples = 0;
  double worst = -kInf;
  for (const auto& [inst, trace] : benchmark_runs().runs) {
    const CheckReport r = check(inst, trace);
    samples += r.samples;
    worst = std::max(worst, r.max_violation);
    require(o, report_ok(r), fmt::format("{} ({}): {} {}", inst.name, r.check, r.note, r.max_violation));
  }
  if (o.pass) o.detail = fmt::format("{} samples over {} runs, max excess {:.3g}", samples,
                                     benchmark_runs().runs.size(), worst);
  return o;
}

Outcome criterion3() {
  return trace_criterion([](const zoo::BenchmarkInstance& inst, const Trace& t) {
    return theory::check_finite_rejections(t, inst.constants);
  });
}

Outcome criterion4() {
  return trace_criterion([](const zoo::BenchmarkInstance& inst, const Trace& t) {
    return theory::check_spectral(t, inst.constants);
  });
}

// Prefix-min complexity on P5 runs with the analytic Delta_F.
Outcome complexity_on_p5(bool inexact) {
  Outcome o;
  int prefixes = 0;
  for (std::uint64_t seed : {0u, 1u, 2u, 3u}) {
    for (bool curvature : {true, false}) {
      const auto inst = zoo::instantiate("P5", "{}", seed);
      SolverConfig cfg;
      cfg.seed = seed;
      cfg.curvature = curvature;
      cfg.inexact = inexact;
      const Trace t = run(inst.problem, inst.x0, cfg, options_for(inst));
      const CheckReport r = theory::check_complexity(t, inst.constants, *inst.f_star);
      prefixes += r.samples;
      require(o, r.samples > 0 && report_ok(r), fmt::format("P5 seed {}: complexity {}", seed, r.note));
    }
  }
  if (o.pass) o.detail = fmt::format("{} prefixes", prefixes);
  return o;
}

Outcome criterion5() {
  Outcome sd = trace_criterion([](const zoo::BenchmarkInstance&, const Trace& t) {
    return theory::check_sufficient_decrease(t);
  });
  Outcome cx = complexity_on_p5(false);
  Outcome o;
  require(o, sd.pass, "sufficient decrease: " + sd.detail);
  require(o, cx.pass, "complexity: " + cx.detail);
  if (o.pass) o.detail = "decrease " + sd.detail + "; complexity " + cx.detail;
  return o;
}

Outcome criterion6() {
  Outcome o;
  double worst_margin = -kInf;
  for (std::uint64_t seed : {0u, 1u, 2u, 3u, 4u}) {
    const auto inst = zoo::instantiate("P5", "{}", seed);
    const double l = inst.constants.upper_model_constant;
    SolverConfig cfg;
    cfg.mu0 = l;  // Q_k = t^-1 I with t = 1/L
    cfg.curvature = false;
    cfg.adaptive_mu = false;
    cfg.max_outer = 5000;
    const Trace t = run(inst.problem, inst.x0, cfg, options_for(inst));
    const theory::RateFit fit = theory::fit_qlinear_rate(t, inst.f_star, inst.constants, inst.x_star);
    require(o, fit.verdict != theory::Verdict::Inconclusive, fmt::format("seed {}: {}", seed, fit.note));
    const double bound = 1.0 - 1.0 / (l * (2.0 + l) * fit.kappa_bar * fit.kappa_bar);
    worst_margin = std::max(worst_margin, fit.q_hat - bound);
    require(o, fit.q_hat <= bound + 0.05, fmt::format("seed {}: q_hat {:.6f} > {:.6f} + 0.05", seed, fit.q_hat, bound));
  }

  // F(x) = x^2 / 2 with Q = mu I: x_{k+1} = (1 - 1/mu) x_k.
  double worst_ratio = 0.0;
  for (double mu : {1.5, 2.0, 3.0, 5.0, 10.0}) {
    const auto inst = zoo::instantiate("quadratic-family", R"({"m":1,"curvature":1,"x0":2})", 0);
    SolverConfig cfg;
    cfg.mu0 = mu;
    cfg.curvature = false;
    cfg.adaptive_mu = false;
    const Trace t = run(inst.problem, inst.x0, cfg, options_for(inst));
    const double expected = (1.0 - 1.0 / mu) * (1.0 - 1.0 / mu);
    int used = 0;
    for (const auto& s : t.steps) {
      if (!s.accepted) continue;
      const double ratio = s.f_after / s.f_before;
      worst_ratio = std::max(worst_ratio, std::abs(ratio - expected));
      ++used;
    }
    require(o, used >= 5, fmt::format("mu {}: only {} accepted steps", mu, used));
  }
  require(o, worst_ratio <= 1e-12, fmt::format("scalar recursion ratio off by {:.3g}", worst_ratio));
  if (o.pass) o.detail = fmt::format("max q_hat - bound = {:.4f}; scalar ratio error {:.3g}", worst_margin, worst_ratio);
  return o;
}

Outcome criterion7() {
  Outcome o;
  struct Case {
    std::string name;
    std::string params;
  };
  const std::vector<Case> cases = {
      {"P1", "{}"}, {"P1-smooth", "{}"}, {"P2", "{}"}, {"P3", "{}"}, {"P4", "{}"},
      {"P4", R"({"variant":"matrix"})"}, {"P5", "{}"}, {"quadratic-family", R"({"m":3,"curvature":2})"},
      {"C2-cubic", "{}"}, {"C2-indefinite", "{}"}};
  Rng rng(77);
  int count = 0;
  int active = 0;
  double worst_value = 0.0;
  double worst_point = 0.0;
  for (int i = 0; count < 50; ++i) {
    const Case& c = cases[static_cast<std::size_t>(i) % cases.size()];
    const auto inst = zoo::instantiate(c.name, c.params, static_cast<std::uint64_t>(i));
    const Vector xk = rng.uniform_box(inst.sample_lo, inst.sample_hi);
    const ModelState st = build_model(inst.problem, xk);
    const double mu = std::pow(10.0, rng.uniform(-2.0, 1.0));
    const bool curvature = (i / static_cast<int>(cases.size())) % 2 == 1;
    const ProximalMetric metric = curvature ? make_metric(mu, assemble_curvature(st).projected)
                                            : make_metric(mu, st.dim());
    const SubproblemCertificate cert = solve_subproblem(st, metric);
    const Vector ref = oracle_solve(st, metric, HighAccuracySpec{});
    const double ref_value = prox_model_value(st, metric, ref);
    const double dv = std::abs(cert.value - ref_value) / (1.0 + std::abs(ref_value));
    const double dx = metric.sigma_min * (cert.solution - ref).norm() / (1.0 + ref.norm());
    worst_value = std::max(worst_value, dv);
    worst_point = std::max(worst_point, dx);
    if (!st.linearized.empty()) ++active;
    require(o, cert.converged, fmt::format("{} #{}: subsolver did not converge", c.name, i));
    require(o, dv <= 1e-6, fmt::format("{} #{}: value gap {:.3g}", c.name, i, dv));
    require(o, dx <= 1e-4, fmt::format("{} #{}: point gap {:.3g}", c.name, i, dx));
    ++count;
  }
  require(o, active >= 5, fmt::format("only {} instances with active linearized channels", active));
  if (o.pass)
    o.detail = fmt::format("{} instances ({} with active I-), value gap {:.3g}, point gap {:.3g}", count, active,
                           worst_value, worst_point);
  return o;
}

Outcome criterion8() {
  Outcome o;
  struct Case {
    std::string name;
    std::string params;
  };
  int samples = 0;
  for (const Case& c : {Case{"P1-smooth", "{}"}, Case{"P4", "{}"}, Case{"P4", R"({"variant":"matrix"})"},
                        Case{"P5", "{}"}}) {
    const auto inst = zoo::instantiate(c.name, c.params, 3);
    Rng rng(808);
    std::vector<Vector> pts;
    for (int i = 0; i < 1000; ++i) pts.push_back(rng.uniform_box(inst.sample_lo, inst.sample_hi));
    for (int k = 0; k < 3; ++k) {
      const Vector xk = rng.uniform_box(inst.sample_lo, inst.sample_hi);
      const auto cmp = theory::compare_linearizations(inst.problem, xk, pts, c.name);
      samples += static_cast<int>(cmp.samples.size());
      for (const auto* r : {&cmp.all, &cmp.in, &cmp.out})
        require(o, report_ok(*r), fmt::format("{}: {} {}", c.name, r->check, r->note));
      if (cmp.beta_r == 0.0)
        require(o, cmp.max_abs_in <= 1e-10, fmt::format("{}: beta_R = 0 but |E_in| = {:.3g}", c.name, cmp.max_abs_in));
    }
  }

  // beta_s = 0: the P1-smooth channels under a linear outer map.
  zoo::BenchmarkInstance lin = zoo::instantiate("P1-smooth", "{}", 3);
  Rng wr(9);
  lin.problem.outer = pieces::linear_outer(wr.normal_vector(lin.problem.num_channels()));
  Rng rng(809);
  std::vector<Vector> pts;
  for (int i = 0; i < 1000; ++i) pts.push_back(rng.uniform_box(lin.sample_lo, lin.sample_hi));
  const auto cmp = theory::compare_linearizations(lin.problem, lin.x0, pts, "P1-smooth-linear");
  require(o, cmp.beta_s == 0.0, "linear outer map has nonzero beta_s");
  require(o, cmp.max_abs_out <= 1e-10, fmt::format("beta_s = 0 but |E_out| = {:.3g}", cmp.max_abs_out));
  for (const auto* r : {&cmp.all, &cmp.in, &cmp.out})
    require(o, report_ok(*r), fmt::format("linear outer: {} {}", r->check, r->note));

  // beta_R = 0: affine channels.
  const auto p5 = zoo::instantiate("P5", "{}", 4);
  std::vector<Vector> p5pts;
  for (int i = 0; i < 1000; ++i) p5pts.push_back(rng.uniform_box(p5.sample_lo, p5.sample_hi));
  const auto cmp5 = theory::compare_linearizations(p5.problem, p5.x0, p5pts, "P5");
  require(o, cmp5.beta_r == 0.0 && cmp5.max_abs_in <= 1e-10,
          fmt::format("beta_R = 0 but |E_in| = {:.3g}", cmp5.max_abs_in));

  if (o.pass)
    o.detail = fmt::format("{} samples; degenerate |E_out| = {:.3g}, |E_in| = {:.3g}", samples, cmp.max_abs_out,
                           cmp5.max_abs_in);
  return o;
}

Outcome criterion9() {
  Outcome o;
  const auto cubic = zoo::instantiate("C2-cubic", "{}", 0);
  const Vector xk = cubic.x0;
  const theory::HessianSplit split = theory::hessian_split(cubic.problem, xk);
  require(o, split.gap.norm() == 0.0, "H^- is nonzero on the cubic instance");
  const std::vector<double> scales = {1e-2, 1e-3, 1e-4};
  const auto rep = theory::check_hessian_model_bounds(cubic.problem, xk, {Vector::Ones(1), -Vector::Ones(1)},
                                                      scales, cubic.name);
  std::vector<double> errs;
  for (const auto& row : rep.rows) errs.push_back(row.max_abs_error);
  const double slope = theory::loglog_slope(scales, errs);
  require(o, slope >= 2.8, fmt::format("slope {:.4f} < 2.8", slope));
  require(o, report_ok(rep.upper) && report_ok(rep.lower), "Hessian-model envelope violated on the cubic instance");

  const auto indef = zoo::instantiate("C2-indefinite", "{}", 0);
  const Vector xi = indef.x0;
  const theory::HessianSplit si = theory::hessian_split(indef.problem, xi);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(si.gap);
  const Vector v = eig.eigenvectors().col(eig.eigenvalues().size() - 1);
  require(o, eig.eigenvalues().maxCoeff() > 0.0, "engineered H has no negative curvature");
  const double d = 1e-3;
  const double err = theory::hessian_model_error(indef.problem, xi, xi + d * v);
  const double predicted = -0.5 * d * d * v.dot(si.gap * v);
  const double rel = std::abs(err - predicted) / std::abs(predicted);
  require(o, rel <= 0.05, fmt::format("indefinite error {:.6g} vs {:.6g} ({:.2f}%)", err, predicted, 100.0 * rel));
  if (o.pass) o.detail = fmt::format("slope {:.4f}; indefinite deficit matches within {:.3f}%", slope, 100.0 * rel);
  return o;
}

Outcome criterion10() {
  Outcome o;
  int compared = 0;
  for (const auto& name : kAll) {
    for (std::uint64_t seed : {0u, 5u}) {
      for (bool inexact : {false, true}) {
        const auto a = zoo::instantiate(name, "{}", seed);
        const auto b = zoo::instantiate(name, "{}", seed);
        SolverConfig cfg;
        cfg.seed = seed;
        cfg.inexact = inexact;
        const std::string ta = serialize_trace(run(a.problem, a.x0, cfg, options_for(a)), false);
        const std::string tb = serialize_trace(run(b.problem, b.x0, cfg, options_for(b)), false);
        require(o, ta == tb, fmt::format("{} seed {}: traces differ", name, seed));
        ++compared;
      }
    }
  }

  // Inexact runs with eps_k = 1e-4 / k^2 against criteria 1, 4 and 5.
  int steps = 0;
  for (const auto& name : kAll) {
    for (std::uint64_t seed : {0u, 1u, 2u}) {
      const auto inst = zoo::instantiate(name, "{}", seed);
      SolverConfig cfg;
      cfg.seed = seed;
      cfg.inexact = true;
      cfg.inexact_scale = 1e-4;
      cfg.inexact_power = 2.0;
      const Trace t = run(inst.problem, inst.x0, cfg, options_for(inst));
      steps += static_cast<int>(t.steps.size());
      for (const auto& s : t.steps) {
        const double budget = cfg.inexact_budget(s.outer_index);
        require(o, s.eps <= budget * (1.0 + 1e-12) + 1e-15, fmt::format("{}: eps above budget", name));
        if (!s.accepted) continue;
        const ModelState st = build_model(inst.problem, s.x_before);
        const ModelErrorReport me = model_error_bounds_check(st, inst.constants, {s.x_after});
        require(o, me.passed(), fmt::format("{}: model error bound fails along the inexact trace", name));
      }
      for (const CheckReport& r : {theory::check_spectral(t, inst.constants),
                                   theory::check_sufficient_decrease(t),
                                   theory::check_finite_rejections(t, inst.constants)})
        require(o, report_ok(r), fmt::format("{} inexact: {} {}", name, r.check, r.note));
    }
    const auto inst = zoo::instantiate(name, "{}", 0);
    if (name == "P1" || name == "P2" || name == "P3" || name == "P4" || name == "P5") {
      const CheckReport me = theory::check_model_error(inst.problem, inst.constants, inst.sample_lo,
                                                       inst.sample_hi, 1000, 202, name);
      require(o, report_ok(me), name + ": sampled model error fails");
    }
  }
  const Outcome cx = complexity_on_p5(true);
  require(o, cx.pass, "inexact complexity: " + cx.detail);
  if (o.pass) o.detail = fmt::format("{} trace pairs identical; {} inexact steps checked", compared, steps);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {1, "two-sided model error", criterion1},
      {2, "acceptance threshold tightness", criterion2},
      {3, "finite rejections", criterion3},
      {4, "spectral bounds", criterion4},
      {5, "sufficient decrease and complexity", criterion5},
      {6, "Q-linear rate", criterion6},
      {7, "subproblem correctness", criterion7},
      {8, "linearization error bounds", criterion8},
      {9, "Hessian-augmented model", criterion9},
      {10, "determinism and inexact robustness", criterion10},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    if (!out.pass) ++failures;
    std::printf("criterion %2d %-38s %s  %s\n", c.id, c.title, out.pass ? "PASS" : "FAIL", out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
