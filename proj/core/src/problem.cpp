#include "pcx/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcx/errors.hpp"
#include "pcx/rng.hpp"

namespace pcx {

void CompositeProblem::validate() const {
  const int m = g.dim;
  if (m <= 0) throw ConfigError("problem '" + name + "': g must have positive dimension");
  if (!g.value) throw ConfigError("problem '" + name + "': g has no value oracle");
  if (!h.value) throw ConfigError("problem '" + name + "': h has no value oracle");
  if (inner.input_dim != m)
    throw ConfigError("problem '" + name + "': C input dimension " +
                      std::to_string(inner.input_dim) + " != m = " + std::to_string(m));
  if (h.dim != inner.output_dim)
    throw ConfigError("problem '" + name + "': h dimension " + std::to_string(h.dim) +
                      " != C output dimension " + std::to_string(inner.output_dim));
  if (!inner.value || !inner.jacobian)
    throw ConfigError("problem '" + name + "': C needs value and jacobian oracles");
  if (outer.input_dim != num_channels())
    throw ConfigError("problem '" + name + "': s input dimension " +
                      std::to_string(outer.input_dim) + " != number of channels " +
                      std::to_string(num_channels()));
  if (outer.output_dim != 1)
    throw ConfigError("problem '" + name + "': s must be scalar valued");
  if (!outer.value || !outer.jacobian)
    throw ConfigError("problem '" + name + "': s needs value and jacobian oracles");
  for (int i = 0; i < num_channels(); ++i) {
    const auto& r = channels[static_cast<std::size_t>(i)];
    if (r.dim != m)
      throw ConfigError("problem '" + name + "': channel " + std::to_string(i) +
                        " has dimension " + std::to_string(r.dim));
    if (!r.value || !r.subgradient)
      throw ConfigError("problem '" + name + "': channel " + std::to_string(i) +
                        " needs value and subgradient oracles");
    if (r.linearizable && (!r.has_gradient() || !std::isfinite(r.gradient_lipschitz)))
      throw ConfigError("problem '" + name + "': linearizable channel " + std::to_string(i) +
                        " needs a gradient oracle and a finite gradient Lipschitz constant");
  }
}

Vector CompositeProblem::channel_values(const Vector& x) const {
  Vector out(num_channels());
  for (int i = 0; i < num_channels(); ++i) {
    const double v = channels[static_cast<std::size_t>(i)].value(x);
    if (!std::isfinite(v))
      throw OracleContractError("channel " + std::to_string(i) + " returned a non-finite value");
    out[i] = v;
  }
  return out;
}

double CompositeProblem::outer_value(const Vector& y) const {
  if (outer.zero) return 0.0;
  return outer.value(y)[0];
}

Vector CompositeProblem::outer_gradient(const Vector& y) const {
  if (outer.zero) return Vector::Zero(y.size());
  return outer.jacobian(y).row(0).transpose();
}

ConstantRegistry derive_constants(double h_lipschitz, double inner_jacobian_lipschitz,
                                  double outer_jacobian_lipschitz,
                                  double outer_gradient_bound,
                                  const std::vector<double>& channel_lipschitz,
                                  const std::vector<double>& channel_gradient_lipschitz,
                                  const std::vector<int>& linearizable,
                                  double declared_map_lipschitz) {
  ConstantRegistry reg;
  reg.h_lipschitz = h_lipschitz;
  reg.inner_jacobian_lipschitz = inner_jacobian_lipschitz;
  reg.outer_jacobian_lipschitz = outer_jacobian_lipschitz;
  reg.outer_gradient_bound = outer_gradient_bound;
  reg.channel_lipschitz = channel_lipschitz;
  reg.channel_gradient_lipschitz = channel_gradient_lipschitz;
  reg.linearizable = linearizable;
  std::sort(reg.linearizable.begin(), reg.linearizable.end());

  double sum_sq = 0.0;
  for (double l : channel_lipschitz) sum_sq += l * l;
  reg.channel_map_lipschitz = std::sqrt(sum_sq);
  if (declared_map_lipschitz < reg.channel_map_lipschitz)
    reg.channel_map_lipschitz = declared_map_lipschitz;

  double beta_sq = 0.0;
  for (int i : reg.linearizable) {
    if (i < 0 || static_cast<std::size_t>(i) >= channel_gradient_lipschitz.size())
      throw ConfigError("linearizable channel " + std::to_string(i) + " has no declared gradient Lipschitz constant");
    const double b = channel_gradient_lipschitz[static_cast<std::size_t>(i)];
    if (!std::isfinite(b))
      throw ConfigError("linearizable channel " + std::to_string(i) + " has an unbounded gradient Lipschitz constant");
    beta_sq += b * b;
  }
  reg.linearized_curvature = std::sqrt(beta_sq);

  const double lr2 = reg.channel_map_lipschitz * reg.channel_map_lipschitz;
  const double inner_term = h_lipschitz * inner_jacobian_lipschitz;
  const double outer_term = lr2 * outer_jacobian_lipschitz;
  // A zero beta_s times an infinite L_R^2 contributes nothing.
  reg.upper_model_constant = (inner_jacobian_lipschitz == 0.0 ? 0.0 : inner_term) +
                             (outer_jacobian_lipschitz == 0.0 ? 0.0 : outer_term);
  const double design = reg.linearized_curvature == 0.0
                            ? 0.0
                            : outer_gradient_bound * reg.linearized_curvature;
  reg.lower_model_constant = reg.upper_model_constant + design;
  reg.curvature_cap = reg.lower_model_constant;
  return reg;
}

ConstantRegistry derive_constants(const CompositeProblem& problem,
                                  std::optional<std::vector<int>> linearizable) {
  std::vector<int> set;
  if (linearizable) {
    set = *linearizable;
  } else {
    for (int i = 0; i < problem.num_channels(); ++i)
      if (problem.channels[static_cast<std::size_t>(i)].linearizable) set.push_back(i);
  }
  std::vector<double> lr;
  std::vector<double> br;
  for (const auto& r : problem.channels) {
    lr.push_back(r.lipschitz);
    br.push_back(r.gradient_lipschitz);
  }
  const double h_lip = problem.h.zero ? 0.0 : problem.h.lipschitz;
  const double beta_c = problem.inner.zero ? 0.0 : problem.inner.jacobian_lipschitz;
  const double beta_s = problem.outer.zero ? 0.0 : problem.outer.jacobian_lipschitz;
  const double l_s = problem.outer.zero ? 0.0 : problem.outer.value_lipschitz;
  return derive_constants(h_lip, beta_c, beta_s, l_s, lr, br, set,
                          problem.channel_map_lipschitz);
}

double evaluate_objective(const CompositeProblem& problem, const Vector& x) {
  if (x.size() != problem.dim())
    throw ConfigError("evaluate_objective: point has dimension " + std::to_string(x.size()) +
                      ", expected " + std::to_string(problem.dim()));
  const double gv = problem.g.value(x);
  if (std::isnan(gv)) throw OracleContractError("g returned NaN");
  if (gv == kInf) return kInf;
  double total = gv;
  if (!problem.h.zero) {
    const double hv = problem.h.value(problem.inner.value(x));
    if (!std::isfinite(hv)) throw OracleContractError("h returned a non-finite value");
    total += hv;
  }
  if (problem.num_channels() > 0 && !problem.outer.zero) {
    const double sv = problem.outer_value(problem.channel_values(x));
    if (!std::isfinite(sv)) throw OracleContractError("s returned a non-finite value");
    total += sv;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Oracle validation

const OracleCheck* ValidationReport::find(const std::string& oracle,
                                          const std::string& kind) const {
  for (const auto& c : checks)
    if (c.oracle == oracle && c.kind == kind) return &c;
  return nullptr;
}

namespace {

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double fd_step_at(const Vector& x, double step) { return step * (1.0 + x.norm()); }

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                   Eigen::Index rows, double step) {
  const double h = fd_step_at(x, step);
  Matrix jac(rows, x.size());
  Vector xp = x;
  Vector xm = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    jac.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return jac;
}

double relative_discrepancy(const Matrix& exact, const Matrix& approx) {
  if (exact.size() == 0) return 0.0;
  const double scale = std::max(1.0, exact.cwiseAbs().maxCoeff());
  return (exact - approx).cwiseAbs().maxCoeff() / scale;
}

class Validator {
 public:
  Validator(const CompositeProblem& p, const ValidationOptions& o)
      : problem_(p), opt_(o), rng_(o.seed) {
    const int m = p.dim();
    if (o.box_lo.size() == m && o.box_hi.size() == m) {
      lo_ = o.box_lo;
      hi_ = o.box_hi;
      use_box_ = true;
    }
    for (int k = 0; k < o.probe_count; ++k) xs_.push_back(sample_x());
    for (const auto& x : xs_) {
      cs_.push_back(p.inner.value(x));
      if (p.num_channels() > 0) rs_.push_back(p.channel_values(x));
    }
  }

  ValidationReport run() {
    check_smooth_map_fd("C", problem_.inner, xs_);
    if (problem_.num_channels() > 0) check_smooth_map_fd("s", problem_.outer, rs_);
    check_piece("g", problem_.g, xs_, /*g_role=*/true);
    if (!problem_.h.zero) check_piece("h", problem_.h, cs_, false);
    for (int i = 0; i < problem_.num_channels(); ++i)
      check_piece("r[" + std::to_string(i) + "]", problem_.channels[static_cast<std::size_t>(i)],
                  xs_, false);
    check_map_lipschitz("C", problem_.inner, xs_);
    if (problem_.num_channels() > 0) {
      check_map_lipschitz("s", problem_.outer, rs_);
      check_outer_gradient_bound();
      check_channel_map_lipschitz();
    }
    report_.passed = std::all_of(report_.checks.begin(), report_.checks.end(),
                                 [](const OracleCheck& c) { return c.passed; });
    return report_;
  }

 private:
  Vector sample_x() {
    const int m = problem_.dim();
    if (use_box_) return rng_.uniform_box(lo_, hi_);
    const Vector dir = rng_.unit_vector(m);
    const double radius = std::pow(rng_.uniform(), 1.0 / m);
    return dir * radius;
  }

  // Random pair partner inside the convex hull of the pool: half of the
  // pairs are far apart, half are close so that local constants (gradient
  // Lipschitz) are probed as well.
  Vector partner(const std::vector<Vector>& pool, std::size_t k) {
    const Vector& base = pool[k];
    std::size_t j = static_cast<std::size_t>(rng_.next() % pool.size());
    if (j == k) j = (k + 1) % pool.size();
    if (k % 2 == 0) return pool[j];
    const double t = rng_.uniform(1e-3, 1e-2);
    return base + t * (pool[j] - base);
  }

  void push(OracleCheck c) { report_.checks.push_back(std::move(c)); }

  void check_smooth_map_fd(const std::string& label, const SmoothMap& map,
                           const std::vector<Vector>& points) {
    if (map.zero || points.empty()) return;
    OracleCheck jac{label + ".jacobian", "finite-difference"};
    jac.tolerance = opt_.fd_tolerance;
    for (const auto& x : points) {
      const Matrix exact = map.jacobian(x);
      const Matrix approx = fd_jacobian(map.value, x, map.output_dim, opt_.fd_step);
      const double d = relative_discrepancy(exact, approx);
      jac.observed = std::max(jac.observed, d);
      ++jac.samples;
      if (d > jac.tolerance) ++jac.violations;
    }
    jac.passed = jac.violations == 0;
    push(jac);

    if (!map.has_hessian()) return;
    OracleCheck hess{label + ".hessian", "finite-difference"};
    hess.tolerance = opt_.fd_tolerance;
    for (const auto& x : points) {
      for (int j = 0; j < map.output_dim; ++j) {
        const Matrix exact = map.component_hessian(x, j);
        auto row = [&](const Vector& z) -> Vector { return map.jacobian(z).row(j).transpose(); };
        const Matrix approx = fd_jacobian(row, x, map.input_dim, opt_.fd_step);
        const double d = relative_discrepancy(exact, approx);
        hess.observed = std::max(hess.observed, d);
        ++hess.samples;
        if (d > hess.tolerance) ++hess.violations;
      }
    }
    hess.passed = hess.violations == 0;
    push(hess);
  }

  void check_piece(const std::string& label, const ConvexPiece& piece,
                   const std::vector<Vector>& points, bool g_role) {
    if (piece.zero || points.empty()) return;
    const std::size_t n = points.size();

    // Convexity along segments and the subgradient inequality.
    OracleCheck convex{label + ".value", "convexity"};
    OracleCheck subgrad{label + ".subgradient", "subgradient-inequality"};
    convex.tolerance = opt_.convexity_tolerance;
    subgrad.tolerance = opt_.convexity_tolerance;
    for (std::size_t k = 0; k < n; ++k) {
      const Vector& x = points[k];
      const Vector y = points[(k * 7 + 3) % n];
      const double fx = piece.value(x);
      const double fy = piece.value(y);
      if (g_role && (!std::isfinite(fx) || !std::isfinite(fy))) continue;
      const double t = rng_.uniform();
      const double fz = piece.value(t * x + (1.0 - t) * y);
      const double rhs = t * fx + (1.0 - t) * fy;
      const double excess = fz - rhs;
      const double slack = convex.tolerance * (1.0 + std::abs(rhs));
      convex.observed = std::max(convex.observed, excess);
      ++convex.samples;
      if (excess > slack) ++convex.violations;

      const Vector sx = piece.subgradient(x);
      const double lower = fx + sx.dot(y - x);
      const double gap = lower - fy;
      subgrad.observed = std::max(subgrad.observed, gap);
      ++subgrad.samples;
      if (gap > subgrad.tolerance * (1.0 + std::abs(fy))) ++subgrad.violations;
    }
    convex.passed = convex.violations == 0;
    subgrad.passed = subgrad.violations == 0;
    push(convex);
    push(subgrad);

    // Gradient/Hessian agreement for smooth channels.
    if (piece.has_gradient() && !piece.nonsmooth) {
      OracleCheck grad{label + ".gradient", "finite-difference"};
      grad.tolerance = opt_.fd_tolerance;
      auto as_vec = [&](const Vector& z) -> Vector { return Vector::Constant(1, piece.value(z)); };
      for (const auto& x : points) {
        if (g_role && !std::isfinite(piece.value(x))) continue;
        const Matrix exact = piece.gradient(x).transpose();
        const Matrix approx = fd_jacobian(as_vec, x, 1, opt_.fd_step);
        const double d = relative_discrepancy(exact, approx);
        grad.observed = std::max(grad.observed, d);
        ++grad.samples;
        if (d > grad.tolerance) ++grad.violations;
      }
      grad.passed = grad.violations == 0;
      push(grad);

      if (piece.has_hessian()) {
        OracleCheck hess{label + ".hessian", "finite-difference"};
        hess.tolerance = opt_.fd_tolerance;
        for (const auto& x : points) {
          const Matrix exact = piece.hessian(x);
          const Matrix approx = fd_jacobian(piece.gradient, x, piece.dim, opt_.fd_step);
          const double d = relative_discrepancy(exact, approx);
          hess.observed = std::max(hess.observed, d);
          ++hess.samples;
          if (d > hess.tolerance) ++hess.violations;
        }
        hess.passed = hess.violations == 0;
        push(hess);
      }
    } else if (piece.has_gradient()) {
      OracleCheck skipped{label + ".gradient", "finite-difference"};
      skipped.skipped = true;
      push(skipped);
    }

    // Prox optimality by perturbation of the prox objective.
    if (piece.has_prox()) {
      OracleCheck prox{label + ".prox", "prox-optimality"};
      prox.tolerance = opt_.prox_tolerance;
      const double steps[] = {0.1, 1.0, 10.0};
      for (std::size_t k = 0; k < n; ++k) {
        const double t = steps[k % 3];
        const Vector v = points[k] + 0.5 * (1.0 + points[k].norm()) * rng_.normal_vector(piece.dim);
        const Vector p = piece.prox(v, t);
        auto phi = [&](const Vector& z) { return piece.value(z) + (z - v).squaredNorm() / (2.0 * t); };
        const double base = phi(p);
        if (!std::isfinite(base)) {
          ++prox.violations;
          ++prox.samples;
          continue;
        }
        for (int trial = 0; trial < 4; ++trial) {
          const double radius = std::pow(10.0, -1.0 - trial) * (1.0 + p.norm());
          const Vector q = p + radius * rng_.unit_vector(piece.dim);
          const double other = phi(q);
          const double gain = base - other;
          prox.observed = std::max(prox.observed, gain);
          ++prox.samples;
          if (gain > prox.tolerance * (1.0 + std::abs(base))) ++prox.violations;
        }
      }
      prox.passed = prox.violations == 0;
      push(prox);
    }

    // Declared Lipschitz constants against observed difference quotients.
    if (std::isfinite(piece.lipschitz)) {
      OracleCheck lip{label + ".value", "lipschitz"};
      lip.tolerance = 1.0;
      for (std::size_t k = 0; k < n; ++k) {
        const Vector& x = points[k];
        const Vector y = partner(points, k);
        const double fx = piece.value(x);
        const double fy = piece.value(y);
        if (!std::isfinite(fx) || !std::isfinite(fy)) continue;
        const double dist = (x - y).norm();
        if (dist == 0.0) continue;
        const double q = std::abs(fx - fy) / dist;
        const double ratio = piece.lipschitz > 0.0 ? q / piece.lipschitz : (q > 1e-12 ? kInf : 0.0);
        lip.observed = std::max(lip.observed, ratio);
        ++lip.samples;
        if (ratio > 1.0 + 1e-8) ++lip.violations;
      }
      lip.passed = lip.violations == 0;
      push(lip);
    }
    if (piece.has_gradient() && std::isfinite(piece.gradient_lipschitz)) {
      OracleCheck lip{label + ".gradient", "lipschitz"};
      lip.tolerance = 1.0;
      for (std::size_t k = 0; k < n; ++k) {
        const Vector& x = points[k];
        const Vector y = partner(points, k);
        const double dist = (x - y).norm();
        if (dist == 0.0) continue;
        const double q = (piece.gradient(x) - piece.gradient(y)).norm() / dist;
        const double ratio = piece.gradient_lipschitz > 0.0 ? q / piece.gradient_lipschitz
                                                            : (q > 1e-10 ? kInf : 0.0);
        lip.observed = std::max(lip.observed, ratio);
        ++lip.samples;
        if (ratio > 1.0 + 1e-8) ++lip.violations;
      }
      lip.passed = lip.violations == 0;
      push(lip);
    }
  }

  void check_map_lipschitz(const std::string& label, const SmoothMap& map,
                           const std::vector<Vector>& points) {
    if (map.zero || points.empty()) return;
    const std::size_t n = points.size();
    const bool scalar_outer = label == "s";
    // For s the value constant is the gradient bound and is checked separately.
    if (std::isfinite(map.value_lipschitz) && !scalar_outer) {
      OracleCheck lip{label + ".value", "lipschitz"};
      lip.tolerance = 1.0;
      for (std::size_t k = 0; k < n; ++k) {
        const Vector y = partner(points, k);
        const double dist = (points[k] - y).norm();
        if (dist == 0.0) continue;
        const double q = (map.value(points[k]) - map.value(y)).norm() / dist;
        const double ratio = map.value_lipschitz > 0 ? q / map.value_lipschitz : (q > 1e-12 ? kInf : 0.0);
        lip.observed = std::max(lip.observed, ratio);
        ++lip.samples;
        if (ratio > 1.0 + 1e-8) ++lip.violations;
      }
      lip.passed = lip.violations == 0;
      push(lip);
    }
    if (std::isfinite(map.jacobian_lipschitz)) {
      OracleCheck lip{label + ".jacobian", "lipschitz"};
      lip.tolerance = 1.0;
      for (std::size_t k = 0; k < n; ++k) {
        const Vector y = partner(points, k);
        const double dist = (points[k] - y).norm();
        if (dist == 0.0) continue;
        const double q = spectral_norm(map.jacobian(points[k]) - map.jacobian(y)) / dist;
        const double ratio = map.jacobian_lipschitz > 0 ? q / map.jacobian_lipschitz
                                                        : (q > 1e-10 ? kInf : 0.0);
        lip.observed = std::max(lip.observed, ratio);
        ++lip.samples;
        if (ratio > 1.0 + 1e-8) ++lip.violations;
      }
      lip.passed = lip.violations == 0;
      push(lip);
    }
  }

  void check_outer_gradient_bound() {
    const auto& s = problem_.outer;
    if (s.zero || !std::isfinite(s.value_lipschitz)) return;
    OracleCheck bound{"s.gradient", "bound"};
    bound.tolerance = 1.0;
    for (const auto& y : rs_) {
      const double q = problem_.outer_gradient(y).norm();
      const double ratio = s.value_lipschitz > 0 ? q / s.value_lipschitz : (q > 1e-12 ? kInf : 0.0);
      bound.observed = std::max(bound.observed, ratio);
      ++bound.samples;
      if (ratio > 1.0 + 1e-8) ++bound.violations;
    }
    bound.passed = bound.violations == 0;
    push(bound);
  }

  void check_channel_map_lipschitz() {
    const ConstantRegistry reg = derive_constants(problem_);
    if (!std::isfinite(reg.channel_map_lipschitz)) return;
    OracleCheck lip{"R.value", "lipschitz"};
    lip.tolerance = 1.0;
    for (std::size_t k = 0; k < xs_.size(); ++k) {
      const Vector y = partner(xs_, k);
      const double dist = (xs_[k] - y).norm();
      if (dist == 0.0) continue;
      const double q = (rs_[k] - problem_.channel_values(y)).norm() / dist;
      const double ratio = reg.channel_map_lipschitz > 0 ? q / reg.channel_map_lipschitz
                                                         : (q > 1e-12 ? kInf : 0.0);
      lip.observed = std::max(lip.observed, ratio);
      ++lip.samples;
      if (ratio > 1.0 + 1e-8) ++lip.violations;
    }
    lip.passed = lip.violations == 0;
    push(lip);
  }

  const CompositeProblem& problem_;
  const ValidationOptions& opt_;
  Rng rng_;
  bool use_box_ = false;
  Vector lo_, hi_;
  std::vector<Vector> xs_, cs_, rs_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate_oracles(const CompositeProblem& problem,
                                  const ValidationOptions& options) {
  problem.validate();
  if (options.probe_count <= 0) return {};
  return Validator(problem, options).run();
}

}  // namespace pcx
