#pragma once

#include <cstdint>

#include "pcx/types.hpp"

namespace pcx {

/// xoshiro256** seeded through splitmix64. Every derived sample (uniform,
/// normal) is computed here rather than through <random> distributions so
/// that streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (cached second draw).
  double normal();

  Vector uniform_box(const Vector& lo, const Vector& hi);
  Vector normal_vector(Eigen::Index n);
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);
  /// Uniform direction on the unit sphere in R^n.
  Vector unit_vector(Eigen::Index n);

  /// Independent child stream; used to give each sub-task its own sequence.
  Rng fork();

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pcx
