#include "pcx/pieces.hpp"

#include <algorithm>
#include <cmath>

#include "pcx/errors.hpp"

namespace pcx::pieces {
namespace {

double plus_sign(double t) { return t >= 0.0 ? 1.0 : -1.0; }

Vector soft_threshold(const Vector& v, double threshold) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) - threshold;
    out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
  }
  return out;
}

}  // namespace

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

ConvexPiece zero(int dim) {
  ConvexPiece p;
  p.name = "zero";
  p.dim = dim;
  p.zero = true;
  p.value = [](const Vector&) { return 0.0; };
  p.subgradient = [dim](const Vector&) { return Vector::Zero(dim).eval(); };
  p.gradient = p.subgradient;
  p.hessian = [dim](const Vector&) { return Matrix::Zero(dim, dim).eval(); };
  p.prox = [](const Vector& v, double) { return v; };
  p.lipschitz = 0.0;
  p.gradient_lipschitz = 0.0;
  p.hessian_lipschitz = 0.0;
  return p;
}

ConvexPiece l1_norm(int dim, double weight) {
  if (weight < 0.0) throw ConfigError("l1_norm: negative weight");
  ConvexPiece p;
  p.name = "l1";
  p.dim = dim;
  p.nonsmooth = true;
  p.value = [weight](const Vector& x) { return weight * x.lpNorm<1>(); };
  p.subgradient = [weight](const Vector& x) {
    return x.unaryExpr([weight](double t) { return weight * plus_sign(t); }).eval();
  };
  p.prox = [weight](const Vector& v, double t) { return soft_threshold(v, weight * t); };
  p.lipschitz = weight * std::sqrt(static_cast<double>(dim));
  return p;
}

ConvexPiece box_indicator(const Vector& lo, const Vector& hi) {
  if (lo.size() != hi.size() || (lo.array() > hi.array()).any())
    throw ConfigError("box_indicator: invalid bounds");
  ConvexPiece p;
  p.name = "box";
  p.dim = static_cast<int>(lo.size());
  p.nonsmooth = true;
  p.value = [lo, hi](const Vector& x) {
    return ((x.array() >= lo.array()) && (x.array() <= hi.array())).all() ? 0.0 : kInf;
  };
  p.subgradient = [dim = lo.size()](const Vector&) { return Vector::Zero(dim).eval(); };
  p.prox = [lo, hi](const Vector& v, double) { return v.cwiseMax(lo).cwiseMin(hi).eval(); };
  return p;
}

ConvexPiece l1_norm_in_box(const Vector& lo, const Vector& hi, double weight) {
  ConvexPiece box = box_indicator(lo, hi);
  ConvexPiece l1 = l1_norm(static_cast<int>(lo.size()), weight);
  ConvexPiece p;
  p.name = "l1+box";
  p.dim = box.dim;
  p.nonsmooth = true;
  p.value = [bv = box.value, lv = l1.value](const Vector& x) {
    const double b = bv(x);
    return b == kInf ? kInf : lv(x);
  };
  p.subgradient = l1.subgradient;
  // Separable: the prox of a 1-D convex function plus an interval indicator
  // is the clipped prox of the function.
  p.prox = [lo, hi, weight](const Vector& v, double t) {
    return soft_threshold(v, weight * t).cwiseMax(lo).cwiseMin(hi).eval();
  };
  p.lipschitz = kInf;
  return p;
}

ConvexPiece squared_distance(const Vector& center, double weight) {
  if (weight < 0.0) throw ConfigError("squared_distance: negative weight");
  const int dim = static_cast<int>(center.size());
  ConvexPiece p;
  p.name = "squared-distance";
  p.dim = dim;
  p.value = [center, weight](const Vector& x) { return 0.5 * weight * (x - center).squaredNorm(); };
  p.subgradient = [center, weight](const Vector& x) { return (weight * (x - center)).eval(); };
  p.gradient = p.subgradient;
  p.hessian = [dim, weight](const Vector&) { return (weight * Matrix::Identity(dim, dim)).eval(); };
  p.prox = [center, weight](const Vector& v, double t) {
    return ((v + t * weight * center) / (1.0 + t * weight)).eval();
  };
  p.gradient_lipschitz = weight;
  p.hessian_lipschitz = 0.0;
  return p;
}

ConvexPiece affine(const Vector& a, double b) {
  const int dim = static_cast<int>(a.size());
  ConvexPiece p;
  p.name = "affine";
  p.dim = dim;
  p.value = [a, b](const Vector& x) { return a.dot(x) + b; };
  p.subgradient = [a](const Vector&) { return a; };
  p.gradient = p.subgradient;
  p.hessian = [dim](const Vector&) { return Matrix::Zero(dim, dim).eval(); };
  p.prox = [a](const Vector& v, double t) { return (v - t * a).eval(); };
  p.lipschitz = a.norm();
  p.gradient_lipschitz = 0.0;
  p.hessian_lipschitz = 0.0;
  p.linearizable = true;
  return p;
}

ConvexPiece distance_minus_radius(const Vector& center, double radius) {
  const int dim = static_cast<int>(center.size());
  ConvexPiece p;
  p.name = "distance";
  p.dim = dim;
  p.nonsmooth = true;
  p.value = [center, radius](const Vector& x) { return (x - center).norm() - radius; };
  p.subgradient = [center, dim](const Vector& x) {
    const Vector z = x - center;
    const double n = z.norm();
    if (n > 0.0) return (z / n).eval();
    Vector e = Vector::Zero(dim);
    e[dim - 1] = 1.0;
    return e;
  };
  p.prox = [center](const Vector& v, double t) {
    const Vector z = v - center;
    const double n = z.norm();
    if (n <= t) return center;
    return (center + (1.0 - t / n) * z).eval();
  };
  p.lipschitz = 1.0;
  return p;
}

ConvexPiece pseudo_huber(const Matrix& b, const Vector& c) {
  const int dim = static_cast<int>(b.cols());
  const double nb = spectral_norm(b);
  ConvexPiece p;
  p.name = "pseudo-huber";
  p.dim = dim;
  p.value = [b, c](const Vector& x) { return std::sqrt(1.0 + (b * x - c).squaredNorm()) - 1.0; };
  p.gradient = [b, c](const Vector& x) {
    const Vector z = b * x - c;
    return (b.transpose() * z / std::sqrt(1.0 + z.squaredNorm())).eval();
  };
  p.subgradient = p.gradient;
  p.hessian = [b, c](const Vector& x) {
    const Vector z = b * x - c;
    const double s = std::sqrt(1.0 + z.squaredNorm());
    const Matrix inner = Matrix::Identity(z.size(), z.size()) / s - z * z.transpose() / (s * s * s);
    return (b.transpose() * inner * b).eval();
  };
  p.lipschitz = nb;
  p.gradient_lipschitz = nb * nb;
  // |D^3 sqrt(1+|z|^2)| <= 3|z|/s^3 + 3|z|^3/s^5 < 3 with s = sqrt(1+|z|^2).
  p.hessian_lipschitz = 3.0 * nb * nb * nb;
  p.linearizable = true;
  return p;
}

ConvexPiece half_squared_residual(const Matrix& b, const Vector& c) {
  const int dim = static_cast<int>(b.cols());
  const double nb = spectral_norm(b);
  const Matrix gram = b.transpose() * b;
  const Vector btc = b.transpose() * c;
  ConvexPiece p;
  p.name = "half-squared-residual";
  p.dim = dim;
  p.value = [b, c](const Vector& x) { return 0.5 * (b * x - c).squaredNorm(); };
  p.gradient = [b, c](const Vector& x) { return (b.transpose() * (b * x - c)).eval(); };
  p.subgradient = p.gradient;
  p.hessian = [gram](const Vector&) { return gram; };
  p.prox = [gram, btc, dim](const Vector& v, double t) {
    const Matrix sys = Matrix::Identity(dim, dim) + t * gram;
    return sys.ldlt().solve(v + t * btc).eval();
  };
  p.gradient_lipschitz = nb * nb;
  p.hessian_lipschitz = 0.0;
  p.linearizable = true;
  return p;
}

SmoothMap zero_map(int input_dim, int output_dim) {
  SmoothMap map;
  map.name = "zero";
  map.input_dim = input_dim;
  map.output_dim = output_dim;
  map.zero = true;
  map.value = [output_dim](const Vector&) { return Vector::Zero(output_dim).eval(); };
  map.jacobian = [input_dim, output_dim](const Vector&) {
    return Matrix::Zero(output_dim, input_dim).eval();
  };
  map.component_hessian = [input_dim](const Vector&, int) {
    return Matrix::Zero(input_dim, input_dim).eval();
  };
  map.jacobian_lipschitz = 0.0;
  map.value_lipschitz = 0.0;
  map.hessian_lipschitz = 0.0;
  return map;
}

SmoothMap affine_map(const Matrix& a, const Vector& b) {
  SmoothMap map;
  map.name = "affine";
  map.input_dim = static_cast<int>(a.cols());
  map.output_dim = static_cast<int>(a.rows());
  map.value = [a, b](const Vector& x) { return (a * x + b).eval(); };
  map.jacobian = [a](const Vector&) { return a; };
  const int in = map.input_dim;
  map.component_hessian = [in](const Vector&, int) { return Matrix::Zero(in, in).eval(); };
  map.jacobian_lipschitz = 0.0;
  map.value_lipschitz = spectral_norm(a);
  map.hessian_lipschitz = 0.0;
  return map;
}

SmoothMap linear_outer(const Vector& w) {
  SmoothMap map;
  map.name = "linear";
  map.input_dim = static_cast<int>(w.size());
  map.output_dim = 1;
  map.value = [w](const Vector& y) { return Vector::Constant(1, w.dot(y)).eval(); };
  map.jacobian = [w](const Vector&) { return Matrix(w.transpose()); };
  const int n = map.input_dim;
  map.component_hessian = [n](const Vector&, int) { return Matrix::Zero(n, n).eval(); };
  map.jacobian_lipschitz = 0.0;
  map.value_lipschitz = w.norm();
  map.hessian_lipschitz = 0.0;
  return map;
}

SmoothMap half_squared_norm_outer(int n, double rho, double gradient_bound) {
  SmoothMap map;
  map.name = "half-squared-norm";
  map.input_dim = n;
  map.output_dim = 1;
  map.value = [rho](const Vector& y) { return Vector::Constant(1, 0.5 * rho * y.squaredNorm()).eval(); };
  map.jacobian = [rho](const Vector& y) { return Matrix((rho * y).transpose()); };
  map.component_hessian = [n, rho](const Vector&, int) {
    return (rho * Matrix::Identity(n, n)).eval();
  };
  map.jacobian_lipschitz = rho;
  map.value_lipschitz = gradient_bound;
  map.hessian_lipschitz = 0.0;
  return map;
}

}  // namespace pcx::pieces
