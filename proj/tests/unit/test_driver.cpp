#include "doctest.h"

#include <cmath>

#include "pcx/driver.hpp"
#include "pcx/errors.hpp"
#include "pcx/zoo.hpp"

using namespace pcx;

namespace {

Trace run_instance(const zoo::BenchmarkInstance& inst, const SolverConfig& cfg) {
  RunOptions o;
  o.instance = inst.name;
  o.constants = inst.constants;
  if (inst.f_star) o.f_star = *inst.f_star;
  return run(inst.problem, inst.x0, cfg, o);
}

}  // namespace

TEST_CASE("config defaults") {
  const SolverConfig c;
  CHECK(c.mu0 == 1.0);
  CHECK(c.mu_min == 1e-6);
  CHECK(c.alpha1 == 0.1);
  CHECK(c.alpha2 == 0.75);
  CHECK(c.nu_inc == 2.0);
  CHECK(c.nu_dec == 0.5);
  CHECK(c.eps_term == 1e-8);
}

TEST_CASE("config JSON round trip and validation") {
  SolverConfig c;
  c.mu0 = 3.5;
  c.curvature = false;
  c.seed = 99;
  c.inexact = true;
  const SolverConfig back = config_from_json(config_to_json(c));
  CHECK(back.mu0 == 3.5);
  CHECK_FALSE(back.curvature);
  CHECK(back.seed == 99);
  CHECK(back.inexact);
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK_THROWS_AS(config_from_json(R"({"no_such_key":1})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"mu0":"big"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"alpha1":0.9,"alpha2":0.5})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"nu_inc":0.5})"), ConfigError);
  CHECK_THROWS_AS(config_from_json("not json"), ConfigError);
}

TEST_CASE("inexact budget decays as k^-p") {
  SolverConfig c;
  c.inexact = true;
  c.inexact_scale = 1e-4;
  c.inexact_power = 2.0;
  // outer_index is zero-based: eps_k = scale / k^p with k = outer_index + 1.
  CHECK(c.inexact_budget(0) == doctest::Approx(1e-4));
  CHECK(c.inexact_budget(9) == doctest::Approx(1e-6));
  c.inexact = false;
  CHECK(c.inexact_budget(0) == 0.0);
}

TEST_CASE("scalar quadratic follows the closed-form recursion") {
  // F = (L/2) x^2 with Q = mu I: x+ = (1 - L/mu) x, rho = 2 - L/mu.
  const double l = 2.0, mu = 3.0;
  const auto inst = zoo::instantiate("quadratic-family", R"({"m":1,"curvature":2,"x0":1.5})");
  SolverConfig cfg;
  cfg.mu0 = mu;
  cfg.curvature = false;
  cfg.adaptive_mu = false;
  cfg.max_outer = 20;
  const Trace t = run_instance(inst, cfg);
  double x = 1.5;
  REQUIRE(t.steps.size() >= 5);
  for (const auto& s : t.steps) {
    // The last report may be a stop without a move.
    if (!s.accepted) {
      CHECK(&s == &t.steps.back());
      continue;
    }
    CHECK(s.x_before[0] == doctest::Approx(x).epsilon(1e-14));
    CHECK(s.rho == doctest::Approx(2.0 - l / mu).epsilon(1e-10));
    x *= 1.0 - l / mu;
    CHECK(s.x_after[0] == doctest::Approx(x).epsilon(1e-14));
    CHECK(s.mu == mu);
  }
}

TEST_CASE("mu update rules") {
  SUBCASE("very successful steps shrink mu down to mu_min") {
    const auto inst = zoo::instantiate("quadratic-family", R"({"m":2,"curvature":1})");
    SolverConfig cfg;
    cfg.mu0 = 8.0;
    cfg.curvature = false;
    const Trace t = run_instance(inst, cfg);
    for (const auto& s : t.steps) {
      if (s.accepted && s.rho > cfg.alpha2) CHECK(s.mu_next == doctest::Approx(std::max(cfg.mu_min, cfg.nu_dec * s.mu)));
      else if (s.accepted) CHECK(s.mu_next == s.mu);
    }
  }
  SUBCASE("rejections grow mu geometrically") {
    const auto inst = zoo::instantiate("quadratic-family", R"({"m":2,"curvature":4})");
    SolverConfig cfg;
    cfg.mu0 = 1e-3;
    cfg.curvature = false;
    const Trace t = run_instance(inst, cfg);
    REQUIRE_FALSE(t.steps.empty());
    const auto& first = t.steps.front();
    CHECK(first.rejections > 0);
    CHECK(first.rejected_mus.size() == static_cast<std::size_t>(first.rejections));
    for (std::size_t i = 1; i < first.rejected_mus.size(); ++i)
      CHECK(first.rejected_mus[i] == doctest::Approx(cfg.nu_inc * first.rejected_mus[i - 1]));
    CHECK(first.mu == doctest::Approx(cfg.nu_inc * first.rejected_mus.back()));
    CHECK(first.rho >= cfg.alpha1);
  }
}

TEST_CASE("objective is monotone along accepted steps") {
  for (const auto& name : {"P1", "P2", "P3", "P4", "P5"}) {
    const auto inst = zoo::instantiate(name, "{}", 1);
    const Trace t = run_instance(inst, SolverConfig{});
    double f = t.steps.empty() ? t.final_f : t.steps.front().f_before;
    for (const auto& s : t.steps) {
      CHECK(s.f_before == doctest::Approx(f));
      if (s.accepted) {
        CHECK(s.f_after <= s.f_before);
        f = s.f_after;
      }
    }
    CHECK_FALSE(t.termination.empty());
  }
}

TEST_CASE("prox_gradient is Q (x_k - x+)") {
  const auto met = make_metric(2.0, 2);
  Vector a(2), b(2);
  a << 1.0, 1.0;
  b << 0.5, 2.0;
  CHECK((prox_gradient(met, a, b) - 2.0 * (a - b)).norm() < 1e-15);
}

TEST_CASE("run rejects an infeasible start") {
  const auto inst = zoo::instantiate("P2", "{}");
  Vector far = Vector::Constant(inst.x0.size(), 1e6);
  CHECK_THROWS_AS(run(inst.problem, far, SolverConfig{}), ConfigError);
}

TEST_CASE("single step on the quadratic family reports consistent quantities") {
  const auto inst = zoo::instantiate("quadratic-family", R"({"m":3,"curvature":1.5})");
  SolverConfig cfg;
  cfg.curvature = false;
  LoopState ls;
  ls.problem = &inst.problem;
  ls.config = &cfg;
  ls.constants = &inst.constants;
  ls.x = inst.x0;
  ls.f = evaluate_objective(inst.problem, inst.x0);
  ls.mu = 1.0;
  const StepOutcome out = step(ls);
  const StepReport& r = out.report;
  REQUIRE(r.accepted);
  CHECK(r.act == doctest::Approx(r.f_before - r.f_after));
  CHECK(r.rho == doctest::Approx(r.act / r.pred_used));
  CHECK(r.pred >= 0.5 * r.metric_step_norm * r.metric_step_norm - 1e-12);
  CHECK((ls.x - r.x_after).norm() == 0.0);
}
