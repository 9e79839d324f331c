#include "doctest.h"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "pcx/pieces.hpp"
#include "pcx/rng.hpp"

using namespace pcx;

namespace {

// Minimizes a one-dimensional convex function by golden-section search.
template <class F>
double golden_min(F f, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int i = 0; i < 300; ++i) {
    if (f(c) < f(d)) b = d;
    else a = c;
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return 0.5 * (a + b);
}

// Coordinate-wise prox oracle for separable pieces, searching coordinate i
// over [lo_i, hi_i].
Vector separable_prox(const ConvexPiece& p, const Vector& v, double t, const Vector& lo, const Vector& hi) {
  Vector z = v.cwiseMax(lo).cwiseMin(hi);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    auto obj = [&](double s) {
      Vector y = z;
      y[i] = s;
      const double val = p.value(y);
      return (val == kInf ? 1e300 : t * val) + 0.5 * (s - v[i]) * (s - v[i]);
    };
    z[i] = golden_min(obj, lo[i], hi[i]);
  }
  return z;
}

Vector fd_gradient(const ConvexPiece& p, const Vector& x) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6;
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (p.value(a) - p.value(b)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("l1 prox is soft thresholding") {
  const auto p = pieces::l1_norm(4, 0.7);
  Vector v(4);
  v << 2.0, -0.3, 0.5, -1.5;
  const Vector z = p.prox(v, 1.0);
  Vector expect(4);
  expect << 1.3, 0.0, 0.0, -0.8;
  CHECK((z - expect).norm() < 1e-15);
  CHECK(p.value(v) == doctest::Approx(0.7 * 4.3));
  CHECK(p.lipschitz == doctest::Approx(0.7 * 2.0));
}

TEST_CASE("separable proxes match a golden-section oracle") {
  Rng rng(1);
  Vector lo(3), hi(3);
  lo << -1.0, 0.2, -3.0;
  hi << 0.5, 2.0, -0.5;
  const Vector wide = Vector::Constant(3, 20.0);
  const std::pair<ConvexPiece, bool> list[] = {{pieces::l1_norm(3, 0.4), false},
                                               {pieces::box_indicator(lo, hi), true},
                                               {pieces::l1_norm_in_box(lo, hi, 0.9), true},
                                               {pieces::squared_distance(Vector::Constant(3, 0.3), 2.5), false}};
  for (const auto& [p, boxed] : list) {
    for (int k = 0; k < 20; ++k) {
      const Vector v = 2.0 * rng.normal_vector(3);
      const double t = rng.uniform(0.05, 3.0);
      const Vector z = p.prox(v, t);
      const Vector ref = boxed ? separable_prox(p, v, t, lo, hi) : separable_prox(p, v, t, -wide, wide);
      CHECK((z - ref).norm() < 1e-6);
    }
  }
}

TEST_CASE("distance_minus_radius prox moves toward the center") {
  Vector c(2);
  c << 1.0, -1.0;
  const auto p = pieces::distance_minus_radius(c, 0.5);
  Vector v(2);
  v << 4.0, 3.0;
  const double t = 2.0;
  const Vector z = p.prox(v, t);
  const Vector u = (v - c).normalized();
  CHECK((z - (v - t * u)).norm() < 1e-14);
  CHECK((p.prox(c + 0.1 * u, 1.0) - c).norm() < 1e-14);
  CHECK(p.value(v) == doctest::Approx(5.0 - 0.5));
}

TEST_CASE("half_squared_residual prox solves the normal equations") {
  Rng rng(2);
  const Matrix b = rng.normal_matrix(4, 3);
  const Vector c = rng.normal_vector(4);
  const auto p = pieces::half_squared_residual(b, c);
  const Vector v = rng.normal_vector(3);
  const double t = 0.8;
  const Vector z = p.prox(v, t);
  // Stationarity: t B^T (B z - c) + z - v = 0.
  CHECK((t * b.transpose() * (b * z - c) + z - v).norm() < 1e-12);
  CHECK((p.gradient(v) - fd_gradient(p, v)).norm() < 1e-6);
}

TEST_CASE("pseudo_huber gradient, Hessian and constants") {
  Rng rng(3);
  const Matrix b = rng.normal_matrix(3, 2);
  const Vector c = rng.normal_vector(3);
  const auto p = pieces::pseudo_huber(b, c);
  CHECK_FALSE(p.has_prox());
  const double nb = Eigen::JacobiSVD<Matrix>(b).singularValues()(0);
  CHECK(p.lipschitz == doctest::Approx(nb));
  CHECK(p.gradient_lipschitz == doctest::Approx(nb * nb));
  for (int k = 0; k < 10; ++k) {
    const Vector x = rng.normal_vector(2);
    CHECK((p.gradient(x) - fd_gradient(p, x)).norm() < 1e-6);
    const Vector r = b * x - c;
    CHECK(p.value(x) == doctest::Approx(std::sqrt(1 + r.squaredNorm()) - 1).epsilon(1e-14));
    CHECK(p.gradient(x).norm() <= p.lipschitz + 1e-12);
  }
}

TEST_CASE("affine piece and maps") {
  Vector a(2);
  a << 1.5, -2.0;
  const auto p = pieces::affine(a, 0.25);
  Vector x(2);
  x << 2.0, 1.0;
  CHECK(p.value(x) == doctest::Approx(1.25));
  CHECK(p.linearizable);
  CHECK(p.gradient_lipschitz == 0.0);

  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  const auto map = pieces::affine_map(m, Vector::Ones(2));
  CHECK((map.value(x) - (m * x + Vector::Ones(2))).norm() == 0.0);
  CHECK((map.jacobian(x) - m).norm() == 0.0);

  const auto lin = pieces::linear_outer(a);
  CHECK(lin.value(x)(0) == doctest::Approx(a.dot(x)));
  CHECK(lin.jacobian_lipschitz == 0.0);

  const auto sq = pieces::half_squared_norm_outer(2, 3.0, 7.0);
  CHECK(sq.value(x)(0) == doctest::Approx(1.5 * 5.0));
  CHECK(sq.jacobian_lipschitz == doctest::Approx(3.0));
  CHECK(sq.value_lipschitz == doctest::Approx(7.0));
}

TEST_CASE("spectral_norm matches an SVD") {
  Rng rng(4);
  for (int k = 0; k < 10; ++k) {
    const Matrix a = rng.normal_matrix(5, 3);
    const double ref = Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
    CHECK(pieces::spectral_norm(a) == doctest::Approx(ref).epsilon(1e-10));
  }
}
