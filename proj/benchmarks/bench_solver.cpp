#include <benchmark/benchmark.h>

#include <string>

#include "pcx/driver.hpp"
#include "pcx/subsolver.hpp"
#include "pcx/theory.hpp"
#include "pcx/zoo.hpp"

namespace {

const char* const kNames[] = {"P1", "P1-smooth", "P2", "P3", "P4", "P5", "quadratic-family", "C2-cubic", "C2-indefinite"};

void BM_Subproblem(benchmark::State& state) {
  const std::string name = kNames[state.range(0)];
  const auto inst = pcx::zoo::instantiate(name, "{}", 0);
  const pcx::ModelState st = pcx::build_model(inst.problem, inst.x0);
  const auto metric = pcx::make_metric(1.0, pcx::assemble_curvature(st).projected);
  for (auto _ : state) {
    auto cert = pcx::solve_subproblem(st, metric);
    benchmark::DoNotOptimize(cert.value);
  }
  state.SetLabel(name);
}
BENCHMARK(BM_Subproblem)->DenseRange(0, 8);

void BM_Run(benchmark::State& state) {
  const std::string name = kNames[state.range(0)];
  const auto inst = pcx::zoo::instantiate(name, "{}", 0);
  pcx::SolverConfig cfg;
  int steps = 0;
  for (auto _ : state) {
    const pcx::Trace t = pcx::run(inst.problem, inst.x0, cfg);
    steps = static_cast<int>(t.steps.size());
    benchmark::DoNotOptimize(t.final_f);
  }
  state.counters["steps"] = steps;
  state.SetLabel(name);
}
BENCHMARK(BM_Run)->DenseRange(0, 8)->Unit(benchmark::kMillisecond);

void BM_ModelErrorCheck(benchmark::State& state) {
  const auto inst = pcx::zoo::instantiate("P4", "{}", 0);
  for (auto _ : state) {
    auto rep = pcx::theory::check_model_error(inst.problem, inst.constants, inst.sample_lo, inst.sample_hi,
                                              static_cast<int>(state.range(0)), 1, inst.name);
    benchmark::DoNotOptimize(rep.max_violation);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ModelErrorCheck)->Arg(100)->Arg(1000);

void BM_Scaling(benchmark::State& state) {
  const auto m = state.range(0);
  const auto inst = pcx::zoo::instantiate("P1", "{\"m\":" + std::to_string(m) + ",\"d\":" + std::to_string(2 * m) + "}", 0);
  pcx::SolverConfig cfg;
  for (auto _ : state) {
    const pcx::Trace t = pcx::run(inst.problem, inst.x0, cfg);
    benchmark::DoNotOptimize(t.final_f);
  }
}
BENCHMARK(BM_Scaling)->RangeMultiplier(4)->Range(4, 64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
