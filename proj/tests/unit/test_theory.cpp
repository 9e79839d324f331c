#include "doctest.h"

#include <cmath>

#include "pcx/rng.hpp"
#include "pcx/theory.hpp"
#include "pcx/zoo.hpp"

using namespace pcx;
using namespace pcx::theory;

namespace {

Trace run_instance(const zoo::BenchmarkInstance& inst, const SolverConfig& cfg) {
  RunOptions o;
  o.instance = inst.name;
  o.constants = inst.constants;
  if (inst.f_star) o.f_star = *inst.f_star;
  return run(inst.problem, inst.x0, cfg, o);
}

// Smallest j >= 0 with mu_k nu^j >= psi, by direct iteration.
int rejections_by_iteration(double psi, double mu, double nu) {
  int j = 0;
  while (mu < psi) {
    mu *= nu;
    ++j;
  }
  return j;
}

}  // namespace

TEST_CASE("slack scales with the right-hand side") {
  CHECK(slack(0.0) == 1e-8);
  CHECK(slack(-3.0) == doctest::Approx(4e-8));
}

TEST_CASE("rejection bound matches direct iteration") {
  for (double psi : {0.01, 0.5, 1.0, 7.3, 100.0}) {
    for (double mu : {1e-6, 1e-3, 0.4, 1.0, 250.0}) {
      for (double nu : {1.5, 2.0, 10.0}) {
        CAPTURE(psi);
        CAPTURE(mu);
        CAPTURE(nu);
        CHECK(rejection_bound(psi, mu, nu) == rejections_by_iteration(psi, mu, nu));
      }
    }
  }
  // Exact powers are not rounded up.
  CHECK(rejection_bound(8.0, 1.0, 2.0) == 3);
}

TEST_CASE("spectral envelope formulas") {
  ConstantRegistry reg;
  reg.upper_model_constant = 3.8;
  reg.curvature_cap = 5.0;
  SolverConfig cfg;
  const auto env = spectral_envelope(cfg, reg);
  CHECK(env.psi == doctest::Approx(3.8 / 1.9));
  CHECK(env.q_lo == doctest::Approx(1e-6));
  CHECK(env.q_hi == doctest::Approx(2.0 * 2.0 + 5.0));
  cfg.mu0 = 10.0;
  CHECK(spectral_envelope(cfg, reg).q_hi == doctest::Approx(15.0));
}

TEST_CASE("contraction factor reduces to the constant-metric form") {
  for (double l : {0.5, 1.0, 3.0, 9.0}) {
    for (double kappa : {1.0, 2.0}) {
      const double q = contraction_factor(l, l, l, l, kappa);
      CHECK(q == doctest::Approx(1.0 - 1.0 / (l * (2.0 + l) * kappa * kappa)));
    }
  }
  // min{1, .} saturates.
  CHECK(contraction_factor(0.0, 0.0, 1.0, 0.1, 0.1) == 0.0);
}

TEST_CASE("log-log slope of a power law") {
  const std::vector<double> s = {1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> e;
  for (double x : s) e.push_back(5.0 * x * x * x);
  CHECK(loglog_slope(s, e) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("violation tally verdicts") {
  ViolationTally ok;
  ok.add(-1.0, 1e-8);
  CHECK(ok.report("c", "i").verdict == Verdict::Passed);
  ViolationTally tight;
  tight.add(-1.0, 1e-8);
  tight.add(5e-9, 1e-8);
  CHECK(tight.report("c", "i").verdict == Verdict::Tight);
  ViolationTally bad;
  bad.add(1e-3, 1e-8);
  CHECK(bad.report("c", "i").failed());
  ViolationTally nan;
  nan.add(kNaN, 1.0);
  CHECK(nan.report("c", "i").failed());
  CHECK(ViolationTally{}.report("c", "i").verdict == Verdict::Inconclusive);
  const std::string js = bad.report("model-error", "P1").to_json();
  CHECK(js.find("\"verdict\":\"failed\"") != std::string::npos);
}

TEST_CASE("trace checks pass on a real run and catch a fabricated violation") {
  const auto inst = zoo::instantiate("P5", "{}", 2);
  const Trace t = run_instance(inst, SolverConfig{});
  CHECK_FALSE(check_sufficient_decrease(t).failed());
  CHECK_FALSE(check_spectral(t, inst.constants).failed());
  CHECK_FALSE(check_finite_rejections(t, inst.constants).failed());
  CHECK(check_complexity(t, inst.constants, *inst.f_star).verdict != Verdict::Failed);
  CHECK(check_complexity(t, inst.constants, kNaN).verdict == Verdict::Inconclusive);

  Trace forged = t;
  forged.steps.front().act = 0.0;
  CHECK(check_sufficient_decrease(forged).failed());
  Trace spread = t;
  spread.steps.front().sigma_max = 1e9;
  CHECK(check_spectral(spread, inst.constants).failed());
  Trace many = t;
  many.steps.front().rejections = 500;
  many.steps.front().rejected_mus.assign(500, 1.0);
  CHECK(check_finite_rejections(many, inst.constants).failed());
}

TEST_CASE("gradient inequality holds along a run") {
  for (const auto& name : {"P3", "P4", "P5"}) {
    const auto inst = zoo::instantiate(name, "{}", 1);
    const Trace t = run_instance(inst, SolverConfig{});
    Rng rng(4);
    std::vector<Vector> ys;
    for (int i = 0; i < 20; ++i) ys.push_back(rng.uniform_box(inst.sample_lo, inst.sample_hi));
    const auto rep = check_gradient_inequality(inst.problem, t, inst.constants, ys);
    CHECK_FALSE(rep.model.failed());
    CHECK_FALSE(rep.function.failed());
  }
}

TEST_CASE("rate fit on a constant-metric run of the strongly convex instance") {
  const auto inst = zoo::instantiate("P5", "{}", 0);
  SolverConfig cfg;
  cfg.mu0 = inst.constants.upper_model_constant;
  cfg.curvature = false;
  cfg.adaptive_mu = false;
  cfg.max_outer = 5000;
  const Trace t = run_instance(inst, cfg);
  const RateFit fit = fit_qlinear_rate(t, inst.f_star, inst.constants, inst.x_star);
  REQUIRE(fit.verdict != Verdict::Inconclusive);
  CHECK(fit.q_hat > 0.0);
  CHECK(fit.q_hat < 1.0);
  CHECK(fit.q_hat <= fit.q_star);
  CHECK(fit.kappa_bar >= fit.kappa);

  const RateFit none = fit_qlinear_rate(Trace{}, 0.0, inst.constants, std::nullopt);
  CHECK(none.verdict == Verdict::Inconclusive);
}

TEST_CASE("linearization errors satisfy their bounds") {
  const auto inst = zoo::instantiate("P4", "{}", 0);
  Rng rng(1);
  std::vector<Vector> pts;
  for (int i = 0; i < 200; ++i) pts.push_back(rng.uniform_box(inst.sample_lo, inst.sample_hi));
  const auto cmp = compare_linearizations(inst.problem, inst.x0, pts, inst.name);
  CHECK(cmp.samples.size() == 200);
  CHECK_FALSE(cmp.all.failed());
  CHECK_FALSE(cmp.in.failed());
  CHECK_FALSE(cmp.out.failed());
  for (const auto& s : cmp.samples) {
    CHECK(std::abs(s.e_all) <= cmp.c_all * s.d_norm * s.d_norm * (1 + 1e-9) + 1e-12);
  }
}

TEST_CASE("Hessian-augmented model is third-order accurate on the cubic") {
  const auto inst = zoo::instantiate("C2-cubic", "{}", 0);
  const auto split = hessian_split(inst.problem, inst.x0);
  CHECK(split.gap.norm() == 0.0);
  const std::vector<double> scales = {1e-1, 1e-2, 1e-3};
  const auto rep = check_hessian_model_bounds(inst.problem, inst.x0, {Vector::Ones(1)}, scales, inst.name);
  REQUIRE(rep.rows.size() == 3);
  std::vector<double> errs;
  for (const auto& r : rep.rows) errs.push_back(r.max_abs_error);
  CHECK(loglog_slope(scales, errs) == doctest::Approx(3.0).epsilon(0.02));
  CHECK_FALSE(rep.upper.failed());
  CHECK_FALSE(rep.lower.failed());
}
