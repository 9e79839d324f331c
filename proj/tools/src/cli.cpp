#include "pcx/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "pcx/driver.hpp"
#include "pcx/errors.hpp"
#include "pcx/rng.hpp"
#include "pcx/theory.hpp"
#include "pcx/trace_io.hpp"
#include "pcx/zoo.hpp"

namespace pcx::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::string problem;
  std::string params = "{}";
  std::string config;
  std::vector<std::uint64_t> seeds{0};
  std::string out;
  std::string format = "jsonl";
  int jobs = 1;
};

// Inline JSON when the text starts with '{', otherwise a file path.
std::string json_text(const std::string& value, const std::string& flag) {
  const auto first = value.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "{}";
  if (value[first] == '{') return value;
  std::ifstream in(value);
  if (!in) throw UsageError(fmt::format("{}: cannot open '{}'", flag, value));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SolverConfig load_config(const CommonArgs& a, std::uint64_t seed) {
  SolverConfig cfg = a.config.empty() ? SolverConfig{} : config_from_json(json_text(a.config, "--config"));
  cfg.seed = seed;
  return cfg;
}

struct Solved {
  zoo::BenchmarkInstance instance;
  Trace trace;
};

Solved solve_one(const CommonArgs& a, std::uint64_t seed) {
  Solved s{zoo::instantiate(a.problem, json_text(a.params, "--params"), seed), {}};
  RunOptions opts;
  opts.instance = s.instance.name;
  opts.constants = s.instance.constants;
  if (s.instance.f_star) opts.f_star = *s.instance.f_star;
  s.trace = run(s.instance.problem, s.instance.x0, load_config(a, seed), opts);
  return s;
}

// Runs every seed, fanning out over `jobs` workers; results keep seed order.
std::vector<Solved> solve_all(const CommonArgs& a) {
  std::vector<Solved> results(a.seeds.size());
  const std::size_t jobs = static_cast<std::size_t>(std::max(1, a.jobs));
  for (std::size_t begin = 0; begin < a.seeds.size(); begin += jobs) {
    const std::size_t end = std::min(a.seeds.size(), begin + jobs);
    std::vector<std::future<Solved>> pending;
    for (std::size_t i = begin; i < end; ++i)
      pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                   [&a, seed = a.seeds[i]] { return solve_one(a, seed); }));
    for (std::size_t i = begin; i < end; ++i) results[i] = pending[i - begin].get();
  }
  return results;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError(fmt::format("--out: cannot write '{}'", path));
  f << text;
}

int do_solve(const CommonArgs& a, std::ostream& out) {
  const std::vector<Solved> runs = solve_all(a);
  if (a.format == "csv") {
    std::vector<Trace> traces;
    for (const auto& r : runs) traces.push_back(r.trace);
    write_text(a.out, export_summary(traces), out);
    return kExitOk;
  }
  if (runs.size() == 1) {
    write_text(a.out, serialize_trace(runs.front().trace), out);
    return kExitOk;
  }
  if (a.out.empty() || a.out == "-") {
    for (const auto& r : runs) out << serialize_trace(r.trace);
    return kExitOk;
  }
  std::filesystem::create_directories(a.out);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto path = std::filesystem::path(a.out) / fmt::format("{}-seed{}.jsonl", a.problem, a.seeds[i]);
    write_text(path.string(), serialize_trace(runs[i].trace), out);
  }
  return kExitOk;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

theory::CheckReport inconclusive(const std::string& check, const std::string& instance,
                                 const std::string& note) {
  theory::CheckReport r;
  r.check = check;
  r.instance = instance;
  r.verdict = theory::Verdict::Inconclusive;
  r.note = note;
  return r;
}

std::vector<Vector> sample_points(const zoo::BenchmarkInstance& inst, int count, Rng& rng) {
  std::vector<Vector> pts;
  for (int i = 0; i < count; ++i) pts.push_back(rng.uniform_box(inst.sample_lo, inst.sample_hi));
  return pts;
}

std::vector<theory::CheckReport> run_checks(const zoo::BenchmarkInstance& inst, const Trace& trace,
                                            const std::vector<std::string>& checks, int samples,
                                            std::uint64_t seed) {
  using namespace theory;
  std::vector<CheckReport> reports;
  const ConstantRegistry& k = inst.constants;
  Rng rng(seed);
  const std::string& name = inst.name;
  for (const std::string& c : checks) {
    Rng local = rng.fork();
    if (c == "model-error") {
      reports.push_back(check_model_error(inst.problem, k, inst.sample_lo, inst.sample_hi, samples,
                                          local.next(), name));
    } else if (c == "sufficient-decrease") {
      reports.push_back(check_sufficient_decrease(trace));
    } else if (c == "finite-rejections") {
      reports.push_back(check_finite_rejections(trace, k));
    } else if (c == "spectral") {
      reports.push_back(check_spectral(trace, k));
    } else if (c == "complexity") {
      reports.push_back(check_complexity(trace, k, inst.f_star ? *inst.f_star : kNaN));
    } else if (c == "gradient-inequality") {
      const auto gi = check_gradient_inequality(inst.problem, trace, k,
                                                sample_points(inst, std::min(samples, 50), local));
      reports.push_back(gi.model);
      reports.push_back(gi.function);
    } else if (c == "rate") {
      const RateFit fit = fit_qlinear_rate(trace, inst.f_star, k, inst.x_star);
      CheckReport r;
      r.check = "rate";
      r.instance = name;
      r.samples = static_cast<int>(fit.ratios.size());
      r.max_violation = fit.q_hat - fit.q_star;
      r.verdict = fit.verdict;
      r.note = fit.note.empty() ? fmt::format("q_hat={:.6g} q_star={:.6g} kappa={:.6g}", fit.q_hat,
                                              fit.q_star, fit.kappa)
                                : fit.note;
      reports.push_back(r);
    } else if (c == "linearization") {
      try {
        const auto cmp = compare_linearizations(inst.problem, trace.x0,
                                                sample_points(inst, samples, local), name);
        reports.push_back(cmp.all);
        reports.push_back(cmp.in);
        reports.push_back(cmp.out);
      } catch (const ConfigError& e) {
        reports.push_back(inconclusive("linearization", name, e.what()));
      }
    } else if (c == "hessian") {
      try {
        std::vector<Vector> dirs;
        for (int i = 0; i < 8; ++i) dirs.push_back(local.unit_vector(inst.problem.dim()));
        const auto rep = check_hessian_model_bounds(inst.problem, trace.x0, dirs,
                                                    {1e-1, 1e-2, 1e-3, 1e-4}, name);
        reports.push_back(rep.upper);
        reports.push_back(rep.lower);
      } catch (const ConfigError& e) {
        reports.push_back(inconclusive("hessian", name, e.what()));
      }
    }
  }
  return reports;
}

int do_verify(const CommonArgs& a, const std::string& trace_path, const std::string& check_list,
              int samples, std::ostream& out) {
  std::vector<std::string> checks = check_list.empty() ? known_checks() : split_list(check_list);
  for (const auto& c : checks)
    if (std::find(known_checks().begin(), known_checks().end(), c) == known_checks().end())
      throw UsageError(fmt::format("--check: unknown check '{}'", c));

  std::string text;
  bool failed = false;
  for (std::uint64_t seed : a.seeds) {
    zoo::BenchmarkInstance inst = zoo::instantiate(a.problem, json_text(a.params, "--params"), seed);
    Trace trace;
    if (!trace_path.empty()) {
      std::ifstream in(trace_path);
      if (!in) throw UsageError(fmt::format("--trace: cannot open '{}'", trace_path));
      trace = read_trace(in);
    } else {
      RunOptions opts;
      opts.instance = inst.name;
      opts.constants = inst.constants;
      if (inst.f_star) opts.f_star = *inst.f_star;
      trace = run(inst.problem, inst.x0, load_config(a, seed), opts);
    }
    for (const auto& r : run_checks(inst, trace, checks, samples, seed)) {
      failed = failed || r.failed();
      text += r.to_json() + "\n";
    }
  }
  write_text(a.out, text, out);
  return failed ? kExitCheckFailed : kExitOk;
}

int do_compare(const CommonArgs& a, int samples, std::ostream& out) {
  std::string text;
  bool failed = false;
  for (std::uint64_t seed : a.seeds) {
    const zoo::BenchmarkInstance inst = zoo::instantiate(a.problem, json_text(a.params, "--params"), seed);
    Rng rng(seed);
    const auto pts = sample_points(inst, samples, rng);
    const theory::LinearizationComparison cmp = theory::compare_linearizations(inst.problem, inst.x0, pts, inst.name);
    failed = failed || cmp.all.failed() || cmp.in.failed() || cmp.out.failed();
    if (a.format == "csv") {
      text += "instance,seed,d_norm,e_all,e_in,e_out,bound_all,bound_in,bound_out\n";
      for (const auto& s : cmp.samples) {
        const double d2 = s.d_norm * s.d_norm;
        text += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", inst.name,
                            seed, s.d_norm, s.e_all, s.e_in, s.e_out, cmp.c_all * d2, cmp.c_in * d2,
                            cmp.c_out * d2);
      }
    } else {
      for (const auto* r : {&cmp.all, &cmp.in, &cmp.out}) text += r->to_json() + "\n";
    }
  }
  write_text(a.out, text, out);
  return failed ? kExitCheckFailed : kExitOk;
}

int do_zoo(const CommonArgs& a, std::ostream& out) {
  std::string text;
  for (const auto& e : zoo::catalog()) {
    std::string tags;
    for (const auto& t : e.tags) tags += (tags.empty() ? "" : ",") + t;
    if (a.format == "csv") {
      text += fmt::format("{},\"{}\",\"{}\"\n", e.name, tags, e.description);
    } else {
      nlohmann::json j{{"name", e.name}, {"tags", e.tags}, {"description", e.description}};
      text += j.dump() + "\n";
    }
  }
  write_text(a.out, text, out);
  return kExitOk;
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> checks{
      "model-error", "sufficient-decrease", "finite-rejections", "spectral", "complexity",
      "gradient-inequality", "rate", "linearization", "hessian"};
  return checks;
}

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prox-convex solver, benchmark zoo and theory checks", "pcx"};
  app.require_subcommand(1);

  CommonArgs a;
  std::string trace_path;
  std::string check_list;
  int samples = 1000;

  auto add_common = [&](CLI::App* sub, bool needs_problem) {
    auto* p = sub->add_option("--problem", a.problem, "Zoo instance name");
    if (needs_problem) p->required();
    sub->add_option("--params", a.params, "Instance parameters: inline JSON or a file");
    sub->add_option("--seed", a.seeds, "Seed(s) for data and sampling")->delimiter(',');
    sub->add_option("--out", a.out, "Output path ('-' for stdout)");
    sub->add_option("--format", a.format, "Output format")->check(CLI::IsMember({"jsonl", "csv"}));
  };

  auto* solve = app.add_subcommand("solve", "Run the solver and write the trace");
  add_common(solve, true);
  solve->add_option("--config", a.config, "Solver config: inline JSON or a file");
  solve->add_option("--jobs", a.jobs, "Parallel workers across seeds")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Run theory checks on a trace");
  add_common(verify, true);
  verify->add_option("--config", a.config, "Solver config: inline JSON or a file");
  verify->add_option("--trace", trace_path, "Existing trace; solves afresh when omitted");
  verify->add_option("--check", check_list, "Comma list of checks (default: all)");
  verify->add_option("--samples", samples, "Samples for sampled checks")->check(CLI::PositiveNumber);

  auto* compare = app.add_subcommand("compare", "Full, inner-only and outer-only linearization errors");
  add_common(compare, true);
  int compare_samples = 500;
  compare->add_option("--samples", compare_samples, "Sample count")->check(CLI::PositiveNumber);

  auto* zoo_cmd = app.add_subcommand("zoo", "List benchmark instances");
  zoo_cmd->add_option("--format", a.format, "Output format")->check(CLI::IsMember({"jsonl", "csv"}));
  zoo_cmd->add_option("--out", a.out, "Output path ('-' for stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve) return do_solve(a, out);
    if (*verify) return do_verify(a, trace_path, check_list, samples, out);
    if (*compare) return do_compare(a, compare_samples, out);
    if (*zoo_cmd) return do_zoo(a, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}

}  // namespace pcx::cli
