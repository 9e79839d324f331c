#pragma once

#include "pcx/problem.hpp"

// Building blocks with closed-form proxes. Subgradients at kinks follow the
// "+direction" tie-break: sign(0) = +1, and the gradient of |x - c| at c is
// the last unit vector.
namespace pcx::pieces {

ConvexPiece zero(int dim);

/// weight * |x|_1.
ConvexPiece l1_norm(int dim, double weight);

/// weight * |x|_1 + indicator of the box [lo, hi].
ConvexPiece l1_norm_in_box(const Vector& lo, const Vector& hi, double weight);

/// Indicator of the box [lo, hi].
ConvexPiece box_indicator(const Vector& lo, const Vector& hi);

/// (weight/2) |x - center|^2.
ConvexPiece squared_distance(const Vector& center, double weight);

/// a^T x + b. Smooth, linearizable, beta = 0.
ConvexPiece affine(const Vector& a, double b);

/// |x - center|_2 - radius. Nonsmooth at the center.
ConvexPiece distance_minus_radius(const Vector& center, double radius);

/// sqrt(1 + |B x - c|^2) - 1. Smooth, L = |B|, beta = |B|^2; no prox.
ConvexPiece pseudo_huber(const Matrix& b, const Vector& c);

/// (1/2)|B x - c|^2. Smooth, beta = |B|^2, prox by a linear solve.
ConvexPiece half_squared_residual(const Matrix& b, const Vector& c);

// Smooth maps

SmoothMap zero_map(int input_dim, int output_dim);

/// x -> A x + b with zero component Hessians.
SmoothMap affine_map(const Matrix& a, const Vector& b);

/// s(y) = w^T y.
SmoothMap linear_outer(const Vector& w);

/// s(y) = (rho/2)|y|^2. `gradient_bound` is the declared L_s for the region
/// of interest.
SmoothMap half_squared_norm_outer(int n, double rho, double gradient_bound);

/// Largest singular value.
double spectral_norm(const Matrix& a);

}  // namespace pcx::pieces
