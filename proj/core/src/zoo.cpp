#include "pcx/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "pcx/errors.hpp"
#include "pcx/pieces.hpp"
#include "pcx/rng.hpp"

namespace pcx::zoo {
namespace {

using nlohmann::json;

class Params {
 public:
  Params(const std::string& instance, const std::string& text, std::set<std::string> allowed)
      : instance_(instance) {
    try {
      j_ = text.empty() ? json::object() : json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(instance + ": invalid params JSON: " + e.what());
    }
    if (!j_.is_object()) throw ConfigError(instance + ": params must be a JSON object");
    allowed.insert("version");
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!allowed.count(it.key()))
        throw ConfigError(instance + ": unknown parameter '" + it.key() + "'");
    if (j_.contains("version") && get<int>("version", 1) != 1)
      throw ConfigError(instance + ": unsupported params version");
  }

  template <typename T>
  T get(const std::string& key, T fallback) const {
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(instance_ + ": bad value for '" + key + "': " + e.what());
    }
  }

  int positive(const std::string& key, int fallback) const {
    const int v = get<int>(key, fallback);
    if (v <= 0) throw ConfigError(instance_ + ": '" + key + "' must be positive");
    return v;
  }

  double nonneg(const std::string& key, double fallback) const {
    const double v = get<double>(key, fallback);
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(instance_ + ": '" + key + "' must be nonnegative");
    return v;
  }

  double pos(const std::string& key, double fallback) const {
    const double v = get<double>(key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(instance_ + ": '" + key + "' must be positive");
    return v;
  }

 private:
  std::string instance_;
  json j_;
};

Vector filled(int m, double v) { return Vector::Constant(m, v); }

// Largest |x| over the box [lo, hi].
double box_radius(const Vector& lo, const Vector& hi) {
  return lo.cwiseAbs().cwiseMax(hi.cwiseAbs()).norm();
}

// Largest |x - c| over the box: attained at a corner.
double max_distance(const Vector& lo, const Vector& hi, const Vector& c) {
  return (c - lo).cwiseAbs().cwiseMax((hi - c).cwiseAbs()).norm();
}

Matrix random_orthogonal(Rng& rng, int n) {
  const Matrix g = rng.normal_matrix(n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  // Fix column signs so the factor is a deterministic function of g.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

void finalize(BenchmarkInstance& inst) {
  inst.problem.validate();
  inst.constants = derive_constants(inst.problem);
}

// ---------------------------------------------------------------------------
// P1: lambda |x|_1 + |C(x)|_1 with C_j = a_j^T x + (eps/2)(b_j^T x)^2 - y_j.

SmoothMap robust_inner(const Matrix& a, const Matrix& b, const Vector& y, double eps, double radius) {
  SmoothMap map;
  map.name = "quadratic-perturbed-linear";
  map.input_dim = static_cast<int>(a.cols());
  map.output_dim = static_cast<int>(a.rows());
  map.value = [a, b, y, eps](const Vector& x) {
    const Vector bx = b * x;
    return (a * x + 0.5 * eps * bx.cwiseProduct(bx) - y).eval();
  };
  map.jacobian = [a, b, eps](const Vector& x) {
    const Vector bx = b * x;
    return (a + eps * bx.asDiagonal() * b).eval();
  };
  map.component_hessian = [b, eps](const Vector&, int j) {
    return (eps * b.row(j).transpose() * b.row(j)).eval();
  };
  double max_row = 0.0;
  for (int j = 0; j < b.rows(); ++j) max_row = std::max(max_row, b.row(j).norm());
  const double nb = pieces::spectral_norm(b);
  map.jacobian_lipschitz = eps * max_row * nb;
  map.value_lipschitz = pieces::spectral_norm(a) + eps * max_row * nb * radius;
  map.hessian_lipschitz = 0.0;
  return map;
}

BenchmarkInstance make_p1(const std::string& params, std::uint64_t seed, bool smooth) {
  std::set<std::string> keys{"m", "d", "lambda", "epsilon", "outlier_fraction", "box"};
  if (smooth) keys.insert({"n", "rho", "channel_rows"});
  const std::string name = smooth ? "P1-smooth" : "P1";
  Params p(name, params, keys);
  const int m = p.positive("m", 5);
  const int d = p.positive("d", 8);
  const double lambda = p.nonneg("lambda", 0.1);
  const double eps = p.nonneg("epsilon", 0.1);
  const double outliers = p.nonneg("outlier_fraction", 0.2);
  const double box = p.pos("box", 2.0);

  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  const Matrix a = rng.normal_matrix(d, m) * scale;
  const Matrix b = rng.normal_matrix(d, m) * scale;
  const Vector x_true = rng.normal_vector(m);
  const Vector bx = b * x_true;
  Vector y = a * x_true + 0.5 * eps * bx.cwiseProduct(bx);
  for (int j = 0; j < d; ++j)
    if (rng.uniform() < outliers) y[j] += 5.0 * rng.normal();

  BenchmarkInstance inst;
  inst.name = name;
  inst.sample_lo = filled(m, -box);
  inst.sample_hi = filled(m, box);
  const double radius = box_radius(inst.sample_lo, inst.sample_hi);

  CompositeProblem& prob = inst.problem;
  prob.name = name;
  prob.g = pieces::l1_norm(m, lambda);
  prob.h = pieces::l1_norm(d, 1.0);
  prob.inner = robust_inner(a, b, y, eps, radius);
  inst.tags = {"nonsmooth", "nonconvex"};

  if (smooth) {
    const int n = p.positive("n", 3);
    const int rows = p.positive("channel_rows", 2);
    const double rho = p.pos("rho", 0.5);
    double bound_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const Matrix bi = rng.normal_matrix(rows, m) / std::sqrt(static_cast<double>(m));
      const Vector ci = rng.normal_vector(rows);
      prob.channels.push_back(pieces::pseudo_huber(bi, ci));
      // 0 <= r_i <= |B_i x - c_i| on the box; linearizations at box points
      // stay above -|B_i| diam, so the gradient bound covers both images.
      const double nb = pieces::spectral_norm(bi);
      const double ri = std::max(nb * radius + ci.norm(), 2.0 * nb * radius);
      bound_sq += ri * ri;
    }
    prob.outer = pieces::half_squared_norm_outer(n, rho, rho * std::sqrt(bound_sq));
    inst.tags.push_back("smooth-channels");
  } else {
    prob.outer = pieces::zero_map(0, 1);
  }
  inst.x0 = Vector::Zero(m);
  finalize(inst);
  return inst;
}

// ---------------------------------------------------------------------------
// P2: indicator of a box + prod_i (r_i)_+^2 with r_i = |x - c_i| - rho_i.

SmoothMap product_of_squares(int n, double beta, double grad_bound) {
  SmoothMap map;
  map.name = "product-of-positive-squares";
  map.input_dim = n;
  map.output_dim = 1;
  auto plus = [](const Vector& y) { return y.cwiseMax(0.0).eval(); };
  map.value = [plus](const Vector& y) {
    const Vector yp = plus(y);
    double v = 1.0;
    for (Eigen::Index i = 0; i < yp.size(); ++i) v *= yp[i] * yp[i];
    return Vector::Constant(1, v).eval();
  };
  // Products are accumulated without division so zero entries are exact.
  auto prod_except = [](const Vector& yp, Eigen::Index skip1, Eigen::Index skip2) {
    double v = 1.0;
    for (Eigen::Index k = 0; k < yp.size(); ++k)
      if (k != skip1 && k != skip2) v *= yp[k] * yp[k];
    return v;
  };
  map.jacobian = [plus, prod_except, n](const Vector& y) {
    const Vector yp = plus(y);
    Matrix jac(1, n);
    for (Eigen::Index i = 0; i < n; ++i) jac(0, i) = 2.0 * yp[i] * prod_except(yp, i, -1);
    return jac;
  };
  map.component_hessian = [plus, prod_except, n](const Vector& y, int) {
    const Vector yp = plus(y);
    Matrix hess(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) hess(i, i) = (y[i] > 0.0 ? 2.0 : 0.0) * prod_except(yp, i, -1);
        else hess(i, j) = 4.0 * yp[i] * yp[j] * prod_except(yp, i, j);
      }
    }
    return hess;
  };
  map.jacobian_lipschitz = beta;
  map.value_lipschitz = grad_bound;
  return map;
}

BenchmarkInstance make_p2(const std::string& params, std::uint64_t seed) {
  Params p("P2", params, {"m", "n", "box", "radius", "spread"});
  const int m = p.positive("m", 2);
  const int n = p.positive("n", 2);
  const double box = p.pos("box", 3.0);
  const double radius = p.pos("radius", 1.0);
  const double spread = p.nonneg("spread", 2.0);

  Rng rng(seed);
  BenchmarkInstance inst;
  inst.name = "P2";
  inst.sample_lo = filled(m, -box);
  inst.sample_hi = filled(m, box);
  CompositeProblem& prob = inst.problem;
  prob.name = "P2";
  prob.g = pieces::box_indicator(inst.sample_lo, inst.sample_hi);
  prob.h = pieces::zero(1);
  prob.inner = pieces::zero_map(m, 1);

  double y_max = 0.0;
  std::vector<Vector> centers;
  for (int i = 0; i < n; ++i) {
    const Vector c = rng.uniform_box(filled(m, -spread), filled(m, spread));
    centers.push_back(c);
    prob.channels.push_back(pieces::distance_minus_radius(c, radius));
    y_max = std::max(y_max, max_distance(inst.sample_lo, inst.sample_hi, c) - radius);
  }
  // Level-set constants over the box: (y_i)_+ <= Y for every channel.
  const double nn = static_cast<double>(n);
  const double beta_s = std::pow(y_max, 2.0 * nn - 2.0) * std::sqrt(4.0 * nn + 16.0 * nn * (nn - 1.0));
  const double grad_bound = std::sqrt(nn) * 2.0 * std::pow(y_max, 2.0 * nn - 1.0);
  prob.outer = product_of_squares(n, beta_s, grad_bound);

  // Start at the box corner farthest from the union of the disks.
  double best = -kInf;
  for (int corner = 0; corner < (1 << std::min(m, 16)); ++corner) {
    Vector x(m);
    for (int k = 0; k < m; ++k) x[k] = ((corner >> std::min(k, 15)) & 1) ? 0.8 * box : -0.8 * box;
    double closest = kInf;
    for (const auto& c : centers) closest = std::min(closest, (x - c).norm() - radius);
    if (closest > best) {
      best = closest;
      inst.x0 = x;
    }
  }
  inst.f_star = 0.0;
  inst.tags = {"STL", "nonsmooth-channels", "level-set-constants"};
  finalize(inst);
  return inst;
}

// ---------------------------------------------------------------------------
// P3: |x - a|^2/2 + w |(|x|^2 - 1)|.

BenchmarkInstance make_p3(const std::string& params, std::uint64_t seed) {
  Params p("P3", params, {"m", "w", "a_norm", "box"});
  const int m = p.positive("m", 3);
  const double w = p.pos("w", 2.0);
  const double a_norm = p.pos("a_norm", 2.5);
  const double box = p.pos("box", 3.0);
  if (w <= std::abs(a_norm - 1.0) / 2.0)
    throw ConfigError("P3: w must exceed |a_norm - 1|/2 for the penalty to be exact");

  Rng rng(seed);
  const Vector a = a_norm * rng.unit_vector(m);
  BenchmarkInstance inst;
  inst.name = "P3";
  inst.sample_lo = filled(m, -box);
  inst.sample_hi = filled(m, box);
  CompositeProblem& prob = inst.problem;
  prob.name = "P3";
  prob.g = pieces::squared_distance(a, 1.0);
  prob.h = pieces::l1_norm(1, w);

  SmoothMap c;
  c.name = "sphere-constraint";
  c.input_dim = m;
  c.output_dim = 1;
  c.value = [](const Vector& x) { return Vector::Constant(1, x.squaredNorm() - 1.0).eval(); };
  c.jacobian = [](const Vector& x) { return Matrix(2.0 * x.transpose()); };
  c.component_hessian = [m](const Vector&, int) { return (2.0 * Matrix::Identity(m, m)).eval(); };
  c.jacobian_lipschitz = 2.0;
  c.value_lipschitz = 2.0 * box_radius(inst.sample_lo, inst.sample_hi);
  c.hessian_lipschitz = 0.0;
  prob.inner = c;
  prob.outer = pieces::zero_map(0, 1);

  inst.x0 = Vector::Zero(m);
  inst.x_star = a / a.norm();
  inst.f_star = 0.5 * (a_norm - 1.0) * (a_norm - 1.0);
  inst.tags = {"exact-penalty", "C2", "nonsmooth"};
  finalize(inst);
  return inst;
}

// ---------------------------------------------------------------------------
// P4: g + sum_i (-r_i + r_i^2) with r_i = |B_i x - c_i|^2 / 2.

SmoothMap negative_linear_plus_square(int n, double grad_bound) {
  SmoothMap map;
  map.name = "minus-linear-plus-square";
  map.input_dim = n;
  map.output_dim = 1;
  map.value = [](const Vector& y) { return Vector::Constant(1, (-y.array() + y.array().square()).sum()).eval(); };
  map.jacobian = [](const Vector& y) { return Matrix((-1.0 + 2.0 * y.array()).matrix().transpose()); };
  map.component_hessian = [n](const Vector&, int) { return (2.0 * Matrix::Identity(n, n)).eval(); };
  map.jacobian_lipschitz = 2.0;
  map.value_lipschitz = grad_bound;
  map.hessian_lipschitz = 0.0;
  return map;
}

BenchmarkInstance make_p4(const std::string& params, std::uint64_t seed) {
  Params p("P4", params, {"variant", "m", "n", "rows", "lambda", "box"});
  const std::string variant = p.get<std::string>("variant", "scalar");
  if (variant != "scalar" && variant != "matrix")
    throw ConfigError("P4: variant must be \"scalar\" or \"matrix\"");
  const bool scalar = variant == "scalar";
  const int m = scalar ? 1 : p.positive("m", 4);
  const int n = scalar ? 1 : p.positive("n", 3);
  const int rows = scalar ? 1 : p.positive("rows", 2);
  const double lambda = p.nonneg("lambda", scalar ? 0.0 : 0.05);
  const double box = p.pos("box", 1.5);
  if (scalar && (p.get<int>("m", 1) != 1 || p.get<int>("n", 1) != 1))
    throw ConfigError("P4: the scalar variant has m = n = 1");

  Rng rng(seed);
  BenchmarkInstance inst;
  inst.name = "P4";
  inst.sample_lo = filled(m, -box);
  inst.sample_hi = filled(m, box);
  const double radius = box_radius(inst.sample_lo, inst.sample_hi);
  CompositeProblem& prob = inst.problem;
  prob.name = "P4";
  prob.g = lambda > 0.0 ? pieces::l1_norm_in_box(inst.sample_lo, inst.sample_hi, lambda)
                        : pieces::box_indicator(inst.sample_lo, inst.sample_hi);
  prob.h = pieces::zero(1);
  prob.inner = pieces::zero_map(m, 1);

  double grad_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    Matrix bi;
    Vector ci;
    if (scalar) {
      bi = Matrix::Identity(1, 1);
      ci = Vector::Zero(1);
    } else {
      bi = rng.normal_matrix(rows, m) / std::sqrt(static_cast<double>(m));
      ci = 0.5 * rng.normal_vector(rows);
    }
    ConvexPiece r = pieces::half_squared_residual(bi, ci);
    const double nb = pieces::spectral_norm(bi);
    const double resid = nb * radius + ci.norm();
    r.lipschitz = nb * resid;
    prob.channels.push_back(r);
    // r_i in [0, resid^2 / 2] on the box and linearizations at box points stay
    // above -beta_i diam^2 / 2, so |-1 + 2 y| <= max(resid^2 - 1, 1 + beta_i diam^2)
    // over both images.
    const double diam = 2.0 * radius;
    const double gi = std::max(resid * resid - 1.0, 1.0 + nb * nb * diam * diam);
    grad_sq += gi * gi;
  }
  prob.outer = negative_linear_plus_square(n, std::sqrt(grad_sq));

  if (scalar) {
    inst.x0 = Vector::Constant(1, 0.3);
    if (lambda == 0.0 && box >= 1.0) inst.f_star = -0.25;
  } else {
    inst.x0 = 0.5 * rng.uniform_box(inst.sample_lo, inst.sample_hi);
  }
  inst.tags = {"negative-channel", "smooth-channels"};
  finalize(inst);
  return inst;
}

// ---------------------------------------------------------------------------
// P5: |A x - b|^2 / 2 through affine channels.

BenchmarkInstance make_p5(const std::string& params, std::uint64_t seed) {
  Params p("P5", params, {"m", "n", "identity", "sigma_min", "sigma_max", "consistent", "box"});
  const bool identity = p.get<bool>("identity", false);
  const int m = p.positive("m", 5);
  const int n = identity ? m : p.positive("n", 8);
  if (n < m) throw ConfigError("P5: need n >= m for a strongly convex instance");
  const double smin = p.pos("sigma_min", 1.0);
  const double smax = p.pos("sigma_max", 3.0);
  if (smax < smin) throw ConfigError("P5: sigma_max < sigma_min");
  const bool consistent = p.get<bool>("consistent", true);
  const double box = p.pos("box", 5.0);

  Rng rng(seed);
  Matrix a;
  Vector b;
  Vector x_true;
  if (identity) {
    a = Matrix::Identity(m, m);
    b = Vector::Zero(m);
    x_true = Vector::Zero(m);
  } else {
    const Matrix u = random_orthogonal(rng, n);
    const Matrix v = random_orthogonal(rng, m);
    Vector sv(m);
    for (int k = 0; k < m; ++k)
      sv[k] = m == 1 ? smax : smax - (smax - smin) * static_cast<double>(k) / static_cast<double>(m - 1);
    a = u.leftCols(m) * sv.asDiagonal() * v.transpose();
    x_true = rng.normal_vector(m);
    b = a * x_true;
    if (!consistent) b += 0.1 * rng.normal_vector(n);
  }

  BenchmarkInstance inst;
  inst.name = "P5";
  inst.sample_lo = filled(m, -box);
  inst.sample_hi = filled(m, box);
  const double radius = box_radius(inst.sample_lo, inst.sample_hi);
  CompositeProblem& prob = inst.problem;
  prob.name = "P5";
  prob.g = pieces::zero(m);
  prob.h = pieces::zero(1);
  prob.inner = pieces::zero_map(m, 1);
  for (int i = 0; i < n; ++i) prob.channels.push_back(pieces::affine(a.row(i).transpose(), -b[i]));
  const double na = pieces::spectral_norm(a);
  prob.channel_map_lipschitz = na;
  prob.outer = pieces::half_squared_norm_outer(n, 1.0, na * radius + b.norm());

  const Vector xs = a.colPivHouseholderQr().solve(b);
  inst.x_star = xs;
  inst.f_star = consistent || identity ? 0.0 : 0.5 * (a * xs - b).squaredNorm();
  inst.x0 = identity ? Vector::Ones(m).eval() : Vector::Zero(m).eval();
  inst.tags = {"convex", "C2", "quadratic", "strongly-convex"};
  finalize(inst);
  return inst;
}

// ---------------------------------------------------------------------------
// Quadratic family: F(x) = (L/2)|x|^2 through identity channels.

BenchmarkInstance make_quadratic_family(const std::string& params, std::uint64_t) {
  Params p("quadratic-family", params, {"m", "curvature", "box", "x0"});
  const int m = p.positive("m", 1);
  const double curv = p.pos("curvature", 1.0);
  const double box = p.pos("box", 5.0);
  const double start = p.get<double>("x0", 2.0);

  BenchmarkInstance inst;
  inst.name = "quadratic-family";
  inst.sample_lo = filled(m, -box);
  inst.sample_hi = filled(m, box);
  CompositeProblem& prob = inst.problem;
  prob.name = "quadratic-family";
  prob.g = pieces::zero(m);
  prob.h = pieces::zero(1);
  prob.inner = pieces::zero_map(m, 1);
  for (int i = 0; i < m; ++i) prob.channels.push_back(pieces::affine(Vector::Unit(m, i), 0.0));
  prob.channel_map_lipschitz = 1.0;
  prob.outer = pieces::half_squared_norm_outer(m, curv, curv * box_radius(inst.sample_lo, inst.sample_hi));
  inst.x0 = Vector::Constant(m, start);
  inst.f_star = 0.0;
  inst.x_star = Vector::Zero(m);
  inst.tags = {"convex", "quadratic", "C2"};
  finalize(inst);
  return inst;
}

// ---------------------------------------------------------------------------
// C^2 instances with h(u) = u.

BenchmarkInstance c2_instance(const std::string& name, int m, double box, SmoothMap inner) {
  BenchmarkInstance inst;
  inst.name = name;
  inst.sample_lo = filled(m, -box);
  inst.sample_hi = filled(m, box);
  CompositeProblem& prob = inst.problem;
  prob.name = name;
  prob.g = pieces::box_indicator(inst.sample_lo, inst.sample_hi);
  prob.h = pieces::affine(Vector::Ones(1), 0.0);
  prob.h.name = "identity";
  prob.inner = std::move(inner);
  prob.outer = pieces::zero_map(0, 1);
  inst.x0 = Vector::Zero(m);
  inst.tags = {"C2"};
  finalize(inst);
  return inst;
}

BenchmarkInstance make_cubic(const std::string& params, std::uint64_t) {
  Params p("C2-cubic", params, {"box"});
  const double box = p.pos("box", 1.0);
  SmoothMap c;
  c.name = "cubic";
  c.input_dim = 1;
  c.output_dim = 1;
  c.value = [](const Vector& x) { return Vector::Constant(1, x[0] * x[0] * x[0] / 6.0).eval(); };
  c.jacobian = [](const Vector& x) { return Matrix::Constant(1, 1, 0.5 * x[0] * x[0]).eval(); };
  c.component_hessian = [](const Vector& x, int) { return Matrix::Constant(1, 1, x[0]).eval(); };
  c.jacobian_lipschitz = box;
  c.value_lipschitz = 0.5 * box * box;
  c.hessian_lipschitz = 1.0;
  BenchmarkInstance inst = c2_instance("C2-cubic", 1, box, std::move(c));
  inst.x0 = Vector::Constant(1, 0.5 * box);
  return inst;
}

BenchmarkInstance make_indefinite(const std::string& params, std::uint64_t) {
  Params p("C2-indefinite", params, {"box"});
  const double box = p.pos("box", 1.0);
  SmoothMap c;
  c.name = "saddle-plus-cubic";
  c.input_dim = 2;
  c.output_dim = 1;
  c.value = [](const Vector& x) {
    return Vector::Constant(1, 0.5 * (x[0] * x[0] - x[1] * x[1]) + x[1] * x[1] * x[1] / 6.0).eval();
  };
  c.jacobian = [](const Vector& x) {
    Matrix j(1, 2);
    j << x[0], -x[1] + 0.5 * x[1] * x[1];
    return j;
  };
  c.component_hessian = [](const Vector& x, int) {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = -1.0 + x[1];
    return h;
  };
  c.jacobian_lipschitz = 1.0 + box;
  c.value_lipschitz = std::sqrt(box * box + std::pow(box + 0.5 * box * box, 2.0));
  c.hessian_lipschitz = 1.0;
  BenchmarkInstance inst = c2_instance("C2-indefinite", 2, box, std::move(c));
  inst.x0 = Vector::Constant(2, 0.3 * box);
  return inst;
}

}  // namespace

std::vector<CatalogEntry> catalog() {
  return {
      {"P1", "robust regression: lambda|x|_1 + |C(x)|_1 with a mildly nonlinear C", {"nonsmooth", "nonconvex"}},
      {"P1-smooth", "P1 plus (rho/2)|R(x)|^2 over pseudo-Huber channels", {"nonsmooth", "nonconvex", "smooth-channels"}},
      {"P2", "STL disjunction: box indicator + prod_i (|x - c_i| - rho_i)_+^2", {"STL", "nonsmooth-channels", "level-set-constants"}},
      {"P3", "exact penalty: |x - a|^2/2 + w | |x|^2 - 1 |", {"exact-penalty", "C2", "nonsmooth"}},
      {"P4", "negative channel: sum_i (-r_i + r_i^2) over r_i = |B_i x - c_i|^2/2", {"negative-channel", "smooth-channels"}},
      {"P5", "quadratic composite |A x - b|^2/2, strongly convex", {"convex", "C2", "quadratic", "strongly-convex"}},
      {"quadratic-family", "(L/2)|x|^2 through identity channels", {"convex", "quadratic", "C2"}},
      {"C2-cubic", "h(u) = u, C(x) = x^3/6 on a box", {"C2"}},
      {"C2-indefinite", "h(u) = u, C(x) = (x1^2 - x2^2)/2 + x2^3/6 on a box", {"C2"}},
  };
}

BenchmarkInstance instantiate(const std::string& name, const std::string& params_json, std::uint64_t seed) {
  if (name == "P1") return make_p1(params_json, seed, false);
  if (name == "P1-smooth") return make_p1(params_json, seed, true);
  if (name == "P2") return make_p2(params_json, seed);
  if (name == "P3") return make_p3(params_json, seed);
  if (name == "P4") return make_p4(params_json, seed);
  if (name == "P5") return make_p5(params_json, seed);
  if (name == "quadratic-family") return make_quadratic_family(params_json, seed);
  if (name == "C2-cubic") return make_cubic(params_json, seed);
  if (name == "C2-indefinite") return make_indefinite(params_json, seed);
  throw ConfigError("unknown benchmark instance '" + name + "'");
}

bool has_tag(const BenchmarkInstance& instance, const std::string& tag) {
  return std::find(instance.tags.begin(), instance.tags.end(), tag) != instance.tags.end();
}

}  // namespace pcx::zoo
