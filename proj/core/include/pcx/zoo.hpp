#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcx/problem.hpp"

namespace pcx::zoo {

struct BenchmarkInstance {
  std::string name;
  CompositeProblem problem;
  /// Analytic constants, valid on the sample box.
  ConstantRegistry constants;
  std::optional<double> f_star;
  std::optional<Vector> x_star;
  Vector x0;
  std::vector<std::string> tags;
  /// Region on which the declared constants hold; pairs for model-error
  /// checks are drawn from it.
  Vector sample_lo;
  Vector sample_hi;
};

struct CatalogEntry {
  std::string name;
  std::string description;
  std::vector<std::string> tags;
};

/// P1, P1-smooth, P2, P3, P4, P5, quadratic-family, C2-cubic, C2-indefinite.
std::vector<CatalogEntry> catalog();

/// `params_json` is a JSON object (may be empty or "{}"); an optional
/// "version" key must equal 1 and unknown keys are rejected. Throws
/// ConfigError for an unknown name or bad parameters.
BenchmarkInstance instantiate(const std::string& name, const std::string& params_json = "{}",
                              std::uint64_t seed = 0);

bool has_tag(const BenchmarkInstance& instance, const std::string& tag);

}  // namespace pcx::zoo
