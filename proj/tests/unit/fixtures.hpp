#pragma once

#include "pcx/pieces.hpp"
#include "pcx/problem.hpp"
#include "pcx/rng.hpp"

namespace pcx::testing {

// g = lambda |x|_1, h = |.|_1 over an affine inner map, two smooth channels
// (one pseudo-Huber, one affine) and s(y) = (rho/2)|y - shift|^2 so that
// the outer partials take both signs.
inline CompositeProblem mixed_problem(std::uint64_t seed, double shift = 1.0) {
  Rng rng(seed);
  const int m = 3;
  CompositeProblem p;
  p.name = "mixed";
  p.g = pieces::l1_norm(m, 0.2);
  p.h = pieces::l1_norm(2, 1.0);
  p.inner = pieces::affine_map(rng.normal_matrix(2, m), rng.normal_vector(2));
  p.channels.push_back(pieces::pseudo_huber(rng.normal_matrix(2, m), rng.normal_vector(2)));
  p.channels.push_back(pieces::affine(rng.normal_vector(m), 0.1));
  SmoothMap s;
  s.name = "shifted-square";
  s.input_dim = 2;
  s.output_dim = 1;
  const double rho = 0.8;
  s.value = [rho, shift](const Vector& y) {
    Vector out(1);
    out(0) = 0.5 * rho * (y.array() - shift).matrix().squaredNorm();
    return out;
  };
  s.jacobian = [rho, shift](const Vector& y) {
    return Matrix((rho * (y.array() - shift)).matrix().transpose());
  };
  s.component_hessian = [rho](const Vector&, int) { return Matrix(rho * Matrix::Identity(2, 2)); };
  s.jacobian_lipschitz = rho;
  s.value_lipschitz = 50.0;
  s.hessian_lipschitz = 0.0;
  p.outer = s;
  return p;
}

}  // namespace pcx::testing
