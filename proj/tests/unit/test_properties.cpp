// Invariants checked over many seeded runs.
#include "doctest.h"

#include <cmath>

#include "pcx/driver.hpp"
#include "pcx/theory.hpp"
#include "pcx/zoo.hpp"

using namespace pcx;

namespace {

const char* const kNames[] = {"P1", "P1-smooth", "P2", "P3", "P4", "P5", "quadratic-family", "C2-cubic", "C2-indefinite"};

Trace run_instance(const zoo::BenchmarkInstance& inst, const SolverConfig& cfg) {
  RunOptions o;
  o.instance = inst.name;
  o.constants = inst.constants;
  return run(inst.problem, inst.x0, cfg, o);
}

}  // namespace

TEST_CASE("per-step invariants hold across instances, seeds and configs") {
  for (const std::string name : kNames) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      for (bool curvature : {true, false}) {
        CAPTURE(name);
        CAPTURE(seed);
        CAPTURE(curvature);
        const auto inst = zoo::instantiate(name, "{}", seed);
        SolverConfig cfg;
        cfg.seed = seed;
        cfg.curvature = curvature;
        cfg.mu0 = seed % 2 == 0 ? 1.0 : 1e-2;
        const Trace t = run_instance(inst, cfg);
        for (const auto& s : t.steps) {
          CHECK(s.mu >= cfg.mu_min);
          CHECK(s.sigma_min >= s.mu * (1.0 - 1e-12));
          CHECK(s.sigma_max >= s.sigma_min);
          CHECK(s.rejected_mus.size() == static_cast<std::size_t>(s.rejections));
          if (!s.accepted) continue;
          CHECK(s.rho >= cfg.alpha1);
          CHECK(s.f_after <= s.f_before);
          // An eps-suboptimal solve moves x+ by at most sqrt(2 eps) in the Q-norm.
          const double r = std::max(s.metric_step_norm - std::sqrt(2.0 * s.eps), 0.0);
          CHECK(s.pred >= 0.5 * r * r - s.eps - 1e-15 * (1.0 + std::abs(s.f_before)));
          CHECK(s.act >= cfg.alpha1 * s.pred_used);
        }
      }
    }
  }
}

TEST_CASE("model error bounds hold at random pairs on every instance") {
  for (const std::string name : kNames) {
    CAPTURE(name);
    const auto inst = zoo::instantiate(name, "{}", 6);
    const auto rep = theory::check_model_error(inst.problem, inst.constants, inst.sample_lo, inst.sample_hi, 300, 6, name);
    CHECK_FALSE(rep.failed());
  }
}

TEST_CASE("inexact runs respect the error budget and still decrease") {
  for (const std::string name : kNames) {
    CAPTURE(name);
    const auto inst = zoo::instantiate(name, "{}", 2);
    SolverConfig cfg;
    cfg.inexact = true;
    cfg.seed = 2;
    const Trace t = run_instance(inst, cfg);
    for (const auto& s : t.steps) {
      CHECK(s.eps >= 0.0);
      CHECK(s.eps <= cfg.inexact_budget(s.outer_index) * (1.0 + 1e-12));
      CHECK(s.pred_used == doctest::Approx(s.pred - s.eps));
      if (s.accepted) CHECK(s.f_after <= s.f_before + 1e-12);
    }
    CHECK_FALSE(theory::check_sufficient_decrease(t).failed());
  }
}

TEST_CASE("runs are deterministic in the seed") {
  for (const std::string name : kNames) {
    const auto inst = zoo::instantiate(name, "{}", 9);
    SolverConfig cfg;
    cfg.seed = 9;
    cfg.inexact = true;
    const Trace a = run_instance(inst, cfg);
    const Trace b = run_instance(inst, cfg);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      CHECK(a.steps[i].eps == b.steps[i].eps);
      CHECK((a.steps[i].x_after - b.steps[i].x_after).norm() == 0.0);
    }
  }
}
