#include "pcx/subsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pcx/errors.hpp"

namespace pcx {
namespace {

enum class Mode { Dual, Forward, Slow };

struct ChannelTerm {
  int index = 0;
  double weight = 0.0;
  Mode mode = Mode::Dual;
};

// The subproblem in splitting form:
//   g(x) + h(A x + b) + sum_kept w_i r_i(x) + <c, x> + |x - x_k|_Q^2 / 2.
struct Layout {
  const ModelState* state = nullptr;
  const ProximalMetric* metric = nullptr;
  Vector c;
  bool has_h = false;
  Mode h_mode = Mode::Dual;
  Matrix a;
  Vector b;
  std::vector<ChannelTerm> channels;
  bool has_curvature = false;
  double smooth_lipschitz = 0.0;
  bool slow = false;

  const CompositeProblem& problem() const { return *state->problem; }
  bool any_dual() const {
    if (has_h && h_mode == Mode::Dual) return true;
    return std::any_of(channels.begin(), channels.end(),
                       [](const ChannelTerm& t) { return t.mode == Mode::Dual; });
  }
  bool any_forward() const {
    if (has_h && h_mode != Mode::Dual) return true;
    return std::any_of(channels.begin(), channels.end(),
                       [](const ChannelTerm& t) { return t.mode != Mode::Dual; });
  }
};

bool is_affine(const ConvexPiece& r) {
  return r.has_gradient() && r.gradient_lipschitz == 0.0;
}

Layout make_layout(const ModelState& st, const ProximalMetric& metric) {
  const CompositeProblem& p = *st.problem;
  const int m = st.dim();
  if (metric.q.rows() != m) throw ConfigError("subproblem: metric dimension mismatch");
  if (!p.g.zero && !p.g.has_prox()) throw ConfigError("subproblem: g has no prox oracle");
  Layout lay;
  lay.state = &st;
  lay.metric = &metric;
  lay.c = Vector::Zero(m);
  for (int i : st.linearized)
    lay.c += st.outer_gradient[i] * st.channel_gradient[static_cast<std::size_t>(i)];

  for (int i = 0; i < p.num_channels(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (st.is_linearized[idx]) continue;
    const double w = st.outer_gradient[i];
    if (w == 0.0) continue;
    const ConvexPiece& r = p.channels[idx];
    if (is_affine(r)) {
      lay.c += w * st.channel_gradient[idx];
      continue;
    }
    if (w < 0.0)
      throw ConfigError("subproblem: channel " + std::to_string(i) +
                        " has a negative weight but is kept exact");
    ChannelTerm term{i, w, Mode::Dual};
    if (r.has_prox()) {
      term.mode = Mode::Dual;
    } else if (r.has_gradient() && std::isfinite(r.gradient_lipschitz)) {
      term.mode = Mode::Forward;
      lay.smooth_lipschitz += w * r.gradient_lipschitz;
    } else {
      term.mode = Mode::Slow;
      lay.slow = true;
    }
    lay.channels.push_back(term);
  }

  // With a zero Jacobian the h term of the model is constant.
  if (!p.h.zero && !st.inner_jacobian.isZero(0.0)) {
    lay.has_h = true;
    lay.a = st.inner_jacobian;
    lay.b = st.inner_value - st.inner_jacobian * st.x;
    if (p.h.has_prox()) {
      lay.h_mode = Mode::Dual;
    } else if (p.h.has_gradient() && std::isfinite(p.h.gradient_lipschitz)) {
      lay.h_mode = Mode::Forward;
      const double na = lay.a.operatorNorm();
      lay.smooth_lipschitz += p.h.gradient_lipschitz * na * na;
    } else {
      lay.h_mode = Mode::Slow;
      lay.slow = true;
    }
  }

  lay.has_curvature = !metric.scalar;
  if (lay.has_curvature) lay.smooth_lipschitz += metric.sigma_max - metric.mu;
  return lay;
}

// Gradient (or subgradient on slow pieces) of the forward part.
Vector forward_gradient(const Layout& lay, const Vector& x) {
  const ModelState& st = *lay.state;
  const CompositeProblem& p = lay.problem();
  Vector grad = lay.c;
  if (lay.has_curvature) grad += lay.metric->curvature * (x - st.x);
  for (const ChannelTerm& t : lay.channels) {
    const ConvexPiece& r = p.channels[static_cast<std::size_t>(t.index)];
    if (t.mode == Mode::Forward) grad += t.weight * r.gradient(x);
    else if (t.mode == Mode::Slow) grad += t.weight * r.subgradient(x);
  }
  if (lay.has_h && lay.h_mode != Mode::Dual) {
    const Vector u = lay.a * x + lay.b;
    const Vector gh = lay.h_mode == Mode::Forward ? p.h.gradient(u) : p.h.subgradient(u);
    grad += lay.a.transpose() * gh;
  }
  return grad;
}

double squared_operator_norm(const Matrix& a, int iterations, double tol) {
  if (a.size() == 0) return 0.0;
  const Matrix gram = a.transpose() * a;
  const auto m = gram.rows();
  Vector v(m);
  for (Eigen::Index i = 0; i < m; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i) / static_cast<double>(m);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = gram * v;
    const double next = v.dot(w);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    const bool done = std::abs(next - lambda) <= tol * std::abs(next);
    lambda = next;
    if (done) break;
  }
  // Power iteration approaches from below; the Frobenius norm caps the margin.
  return std::min(1.05 * lambda, a.squaredNorm());
}

Vector primal_prox(const Layout& lay, const Vector& v, double tau) {
  const ModelState& st = *lay.state;
  const double mu = lay.metric->mu;
  const Vector z = (tau * mu * st.x + v) / (1.0 + tau * mu);
  const ConvexPiece& g = lay.problem().g;
  if (g.zero) return z;
  return g.prox(z, tau / (1.0 + tau * mu));
}

// `suboptimality` < 0 means the residual is an exact subgradient of F_Q at x,
// so strong convexity gives residual^2 / (2 sigma_min).
SubproblemCertificate finish(const ModelState& st, const ProximalMetric& metric, Vector x,
                             double residual, int iterations, bool converged,
                             const std::string& method, double suboptimality = -1.0) {
  SubproblemCertificate cert;
  cert.model_value = eval_model(st, x);
  if (!std::isfinite(cert.model_value))
    throw NumericalError("subproblem: solution lies outside dom g (infeasible model)");
  cert.value = cert.model_value + 0.5 * metric.norm_sq(x - st.x);
  cert.solution = std::move(x);
  cert.kkt_residual = residual;
  cert.suboptimality = suboptimality >= 0.0 ? suboptimality : residual * residual / (2.0 * metric.sigma_min);
  cert.iterations = iterations;
  cert.converged = converged;
  cert.method = method;
  return cert;
}

}  // namespace

double prox_model_value(const ModelState& state, const ProximalMetric& metric, const Vector& x) {
  const double model = eval_model(state, x);
  if (model == kInf) return kInf;
  return model + 0.5 * metric.norm_sq(x - state.x);
}

SubproblemCertificate solve_subproblem(const ModelState& st, const ProximalMetric& metric,
                                       const SubproblemOptions& options) {
  const Layout lay = make_layout(st, metric);
  const CompositeProblem& p = *st.problem;
  const int m = st.dim();

  if (!lay.any_dual() && !lay.any_forward()) {
    if (!lay.has_curvature) {
      const double mu = metric.mu;
      Vector x = st.x - lay.c / mu;
      if (!p.g.zero) x = p.g.prox(x, 1.0 / mu);
      return finish(st, metric, std::move(x), 0.0, 0, true, "closed-form");
    }
    if (p.g.zero) {
      Vector x = st.x - metric.q.ldlt().solve(lay.c);
      const double res = (metric.q * (x - st.x) + lay.c).norm();
      return finish(st, metric, std::move(x), res, 0, true, "linear-solve");
    }
  }

  // Condat-Vu iteration with dual blocks for h (through A) and for every kept
  // channel with a prox (through the identity).
  std::vector<int> dual_channels;
  for (std::size_t t = 0; t < lay.channels.size(); ++t)
    if (lay.channels[t].mode == Mode::Dual) dual_channels.push_back(static_cast<int>(t));
  const bool h_dual = lay.has_h && lay.h_mode == Mode::Dual;
  const double norm_a2 = h_dual ? squared_operator_norm(lay.a, options.power_iterations, options.power_tol) : 0.0;
  const double norm_k2 = norm_a2 + static_cast<double>(dual_channels.size());
  const double norm_k = std::sqrt(norm_k2);

  // Steps satisfy 1/tau - sigma |K|^2 > L_f / 2 for every balance omega:
  // tau = 1 / (L_f/2 + |K|/omega), sigma = 0.95 / (omega |K|).
  const double lf = lay.smooth_lipschitz;
  double omega = 1.0;
  double adapt = 0.5;
  double tau = 0.0;
  double sigma = 0.0;
  auto set_steps = [&]() {
    if (norm_k > 0.0) {
      tau = 1.0 / (0.5 * lf + norm_k / omega);
      sigma = 0.95 / (omega * norm_k);
    } else {
      tau = 1.0 / (0.5 * lf + metric.mu + lf);
      sigma = 0.0;
    }
  };
  set_steps();

  const std::size_t nblocks = (h_dual ? 1 : 0) + dual_channels.size();
  std::vector<Vector> y(nblocks);
  {
    std::size_t k = 0;
    if (h_dual) y[k++] = Vector::Zero(lay.a.rows());
    for (std::size_t t = 0; t < dual_channels.size(); ++t) y[k++] = Vector::Zero(m);
  }
  if (options.warm_start && options.warm_start->blocks.size() == nblocks) {
    bool ok = true;
    for (std::size_t k = 0; k < nblocks; ++k)
      ok = ok && options.warm_start->blocks[k].size() == y[k].size();
    if (ok) y = options.warm_start->blocks;
  }

  auto k_transpose = [&](const std::vector<Vector>& dual) {
    Vector out = Vector::Zero(m);
    std::size_t k = 0;
    if (h_dual) out += lay.a.transpose() * dual[k++];
    for (; k < dual.size(); ++k) out += dual[k];
    return out;
  };

  struct Iterate {
    Vector x;
    std::vector<Vector> y;
    // Points p with y in the subdifferential of the dual-block piece at p.
    std::vector<Vector> anchor;
    Vector grad;
    Vector kty;
    double primal_norm = 0.0;
    double dual_norm = 0.0;
  };
  // One Condat-Vu step from (x, y); residual norms refer to the new point.
  auto advance = [&](const Vector& x, const std::vector<Vector>& y, const Vector& grad, const Vector& kty) {
    Iterate next;
    next.x = primal_prox(lay, x - tau * (grad + kty), tau);
    const Vector x_bar = 2.0 * next.x - x;
    const Vector dx = next.x - x;
    next.y.resize(nblocks);
    next.anchor.resize(nblocks);
    double dual_res_sq = 0.0;
    std::size_t k = 0;
    if (h_dual) {
      const Vector v = y[k] + sigma * (lay.a * x_bar + lay.b);
      next.anchor[k] = p.h.prox(v / sigma, 1.0 / sigma);
      next.y[k] = v - sigma * next.anchor[k];
      dual_res_sq += ((y[k] - next.y[k]) / sigma + lay.a * dx).squaredNorm();
      ++k;
    }
    for (int t : dual_channels) {
      const ChannelTerm& term = lay.channels[static_cast<std::size_t>(t)];
      const ConvexPiece& r = p.channels[static_cast<std::size_t>(term.index)];
      const Vector v = y[k] + sigma * x_bar;
      next.anchor[k] = r.prox(v / sigma, term.weight / sigma);
      next.y[k] = v - sigma * next.anchor[k];
      dual_res_sq += ((y[k] - next.y[k]) / sigma + dx).squaredNorm();
      ++k;
    }
    next.grad = forward_gradient(lay, next.x);
    next.kty = k_transpose(next.y);
    next.primal_norm = ((x - next.x) / tau - (kty - next.kty) + next.grad - grad).norm();
    next.dual_norm = std::sqrt(dual_res_sq);
    return next;
  };

  // F_Q(x) - min F_Q <= |primal residual|^2 / (2 sigma_min) + sum of Bregman
  // gaps D(u, p) = f(u) - f(p) - <y, u - p> of the dual-block pieces: the
  // primal residual is a subgradient at x of the strongly convex minorant
  // obtained by replacing each dual-block piece with its support at p.
  auto certified_gap = [&](const Iterate& iter) {
    if (iter.anchor.size() != nblocks) return kInf;
    double gap = iter.primal_norm * iter.primal_norm / (2.0 * metric.sigma_min);
    std::size_t k = 0;
    if (h_dual) {
      const Vector u = lay.a * iter.x + lay.b;
      gap += std::max(0.0, p.h.value(u) - p.h.value(iter.anchor[k]) - iter.y[k].dot(u - iter.anchor[k]));
      ++k;
    }
    for (int t : dual_channels) {
      const ChannelTerm& term = lay.channels[static_cast<std::size_t>(t)];
      const ConvexPiece& r = p.channels[static_cast<std::size_t>(term.index)];
      gap += std::max(0.0, term.weight * (r.value(iter.x) - r.value(iter.anchor[k])) -
                               iter.y[k].dot(iter.x - iter.anchor[k]));
      ++k;
    }
    return std::isnan(gap) ? kInf : gap;
  };

  Iterate cur;
  cur.x = st.x;
  cur.y = y;
  cur.grad = forward_gradient(lay, cur.x);
  cur.kty = k_transpose(cur.y);
  const double threshold = options.tol * (1.0 + st.x.norm() * metric.sigma_max);
  double residual = kInf;
  bool converged = false;
  int it = 0;
  Vector best_x = cur.x;
  double best_value = kInf;

  // Restarts from the running average (fast path only): taken on sufficient
  // residual decay, or on stalled progress, or after a long epoch.
  constexpr int kRestartCheck = 64;
  Vector x_sum = Vector::Zero(m);
  std::vector<Vector> y_sum(nblocks);
  for (std::size_t k = 0; k < nblocks; ++k) y_sum[k] = Vector::Zero(cur.y[k].size());
  int epoch_len = 0;
  int epoch_start = 0;
  double restart_residual = kInf;
  double last_candidate = kInf;

  for (it = 1; it <= options.max_iter; ++it) {
    if (lay.slow) {
      omega = 1.0 / std::sqrt(1.0 + it / 50.0);
      set_steps();
    }
    cur = advance(cur.x, cur.y, cur.grad, cur.kty);
    const double primal_norm = cur.primal_norm;
    const double dual_norm = cur.dual_norm;
    residual = primal_norm + norm_k * dual_norm;

    if (lay.slow) {
      const double value = prox_model_value(st, metric, cur.x);
      if (value < best_value) {
        best_value = value;
        best_x = cur.x;
      }
    }
    if (residual <= threshold) {
      converged = true;
      break;
    }
    if (options.gap_tol > 0.0 && it % 10 == 0 && certified_gap(cur) <= options.gap_tol) {
      converged = true;
      break;
    }
    if (!lay.slow && nblocks > 0) {
      x_sum += cur.x;
      for (std::size_t k = 0; k < nblocks; ++k) y_sum[k] += cur.y[k];
      ++epoch_len;
      if (epoch_len % kRestartCheck == 0) {
        const double inv = 1.0 / static_cast<double>(epoch_len);
        std::vector<Vector> y_avg(nblocks);
        for (std::size_t k = 0; k < nblocks; ++k) y_avg[k] = y_sum[k] * inv;
        const Vector x_avg = x_sum * inv;
        Iterate avg = advance(x_avg, y_avg, forward_gradient(lay, x_avg), k_transpose(y_avg));
        const double avg_residual = avg.primal_norm + norm_k * avg.dual_norm;
        const bool use_avg = avg_residual < residual;
        const double candidate = use_avg ? avg_residual : residual;
        const bool restart = candidate <= 0.2 * restart_residual ||
                             (candidate <= 0.8 * restart_residual && candidate > last_candidate) ||
                             it - epoch_start >= std::max(1000, it / 3);
        last_candidate = candidate;
        if (restart) {
          if (use_avg) {
            cur = std::move(avg);
            residual = avg_residual;
          }
          restart_residual = candidate;
          last_candidate = kInf;
          adapt = 0.5;
          epoch_start = it;
          epoch_len = 0;
          x_sum.setZero();
          for (auto& v : y_sum) v.setZero();
          if (residual <= threshold) {
            converged = true;
            break;
          }
        }
      }
    }
    // Residual balancing with a decaying adaptation level.
    if (!lay.slow && norm_k > 0.0 && adapt > 1e-6) {
      const double scaled_dual = norm_k * dual_norm;
      if (primal_norm > 1.5 * scaled_dual && omega < 1e3) {
        omega /= 1.0 - adapt;
        adapt *= 0.98;
        set_steps();
      } else if (scaled_dual > 1.5 * primal_norm && omega > 1e-3) {
        omega *= 1.0 - adapt;
        adapt *= 0.98;
        set_steps();
      }
    }
  }
  const double gap = it > 0 ? certified_gap(cur) : kInf;
  Vector x = std::move(cur.x);
  y = std::move(cur.y);
  if (it > options.max_iter) it = options.max_iter;
  if (options.warm_start) options.warm_start->blocks = y;
  if (lay.slow && best_value < prox_model_value(st, metric, x)) x = best_x;
  SubproblemCertificate cert = finish(st, metric, std::move(x), residual, it, converged, "primal-dual", gap);
  cert.slow_path = lay.slow;
  return cert;
}

namespace {

// argmin_z w r(z) + (rho/2)|z - v|^2 for a smooth channel without a prox.
Vector newton_prox(const ConvexPiece& r, double w, double rho, const Vector& v) {
  auto objective = [&](const Vector& z) { return w * r.value(z) + 0.5 * rho * (z - v).squaredNorm(); };
  Vector z = v;
  const auto m = v.size();
  const double scale = 1.0 + rho * v.norm();
  for (int it = 0; it < 200; ++it) {
    const Vector grad = w * r.gradient(z) + rho * (z - v);
    if (grad.norm() <= 1e-15 * scale) break;
    Vector step;
    if (r.has_hessian()) {
      const Matrix hess = w * r.hessian(z) + rho * Matrix::Identity(m, m);
      step = -hess.ldlt().solve(grad);
    } else {
      step = -grad / (w * r.gradient_lipschitz + rho);
    }
    const double f0 = objective(z);
    const double slope = grad.dot(step);
    double t = 1.0;
    Vector trial = z + step;
    while (objective(trial) > f0 + 1e-4 * t * slope && t > 1e-12) {
      t *= 0.5;
      trial = z + t * step;
    }
    if ((trial - z).norm() <= 1e-16 * (1.0 + z.norm())) {
      z = trial;
      break;
    }
    z = trial;
  }
  return z;
}

struct AdmmBlock {
  enum class Kind { G, H, Channel } kind;
  int channel = -1;
  double weight = 1.0;
};

}  // namespace

Vector oracle_solve(const ModelState& st, const ProximalMetric& metric, const HighAccuracySpec& spec) {
  const CompositeProblem& p = *st.problem;
  const int m = st.dim();
  if (metric.q.rows() != m) throw ConfigError("oracle_solve: metric dimension mismatch");

  Vector c = Vector::Zero(m);
  std::vector<AdmmBlock> blocks;
  if (!p.g.zero) {
    if (!p.g.has_prox()) throw ConfigError("oracle_solve: g has no prox oracle");
    blocks.push_back({AdmmBlock::Kind::G});
  }
  Matrix a;
  Vector b;
  if (!p.h.zero && !st.inner_jacobian.isZero(0.0)) {
    if (!p.h.has_prox()) throw ConfigError("oracle_solve: h has no prox oracle");
    a = st.inner_jacobian;
    b = st.inner_value - st.inner_jacobian * st.x;
    blocks.push_back({AdmmBlock::Kind::H});
  }
  for (int i = 0; i < p.num_channels(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const double w = st.outer_gradient[i];
    if (w == 0.0) continue;
    if (st.is_linearized[idx]) {
      c += w * st.channel_gradient[idx];
      continue;
    }
    const ConvexPiece& r = p.channels[idx];
    if (r.has_gradient() && r.gradient_lipschitz == 0.0) {
      c += w * st.channel_gradient[idx];
      continue;
    }
    if (!r.has_prox() && !r.has_gradient())
      throw ConfigError("oracle_solve: channel " + std::to_string(i) + " has neither prox nor gradient");
    blocks.push_back({AdmmBlock::Kind::Channel, i, w});
  }

  // Block j constrains z_j = K_j x + b_j with K_j in {I, A}.
  auto apply_k = [&](const AdmmBlock& blk, const Vector& x) -> Vector {
    return blk.kind == AdmmBlock::Kind::H ? Vector(a * x + b) : x;
  };
  auto apply_kt = [&](const AdmmBlock& blk, const Vector& z) -> Vector {
    return blk.kind == AdmmBlock::Kind::H ? Vector(a.transpose() * z) : z;
  };
  auto offset = [&](const AdmmBlock& blk) -> Vector {
    return blk.kind == AdmmBlock::Kind::H ? b : Vector::Zero(m);
  };

  const Vector rhs0 = metric.q * st.x - c;
  if (blocks.empty()) return metric.q.ldlt().solve(rhs0);

  Matrix gram = Matrix::Zero(m, m);
  for (const auto& blk : blocks) {
    if (blk.kind == AdmmBlock::Kind::H) gram += a.transpose() * a;
    else gram.diagonal().array() += 1.0;
  }

  double rho = std::sqrt(metric.sigma_min * metric.sigma_max);
  Eigen::LDLT<Matrix> factor((metric.q + rho * gram).eval());

  std::vector<Vector> z(blocks.size()), u(blocks.size());
  Vector x = st.x;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    z[j] = apply_k(blocks[j], x);
    u[j] = Vector::Zero(z[j].size());
  }

  for (int it = 1; it <= spec.max_iter; ++it) {
    Vector rhs = rhs0;
    for (std::size_t j = 0; j < blocks.size(); ++j)
      rhs += rho * apply_kt(blocks[j], z[j] - offset(blocks[j]) - u[j]);
    x = factor.solve(rhs);

    double primal_sq = 0.0;
    Vector dual_change = Vector::Zero(m);
    double scale_sq = x.squaredNorm();
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      const AdmmBlock& blk = blocks[j];
      const Vector kx = apply_k(blk, x);
      const Vector v = kx + u[j];
      Vector z_new;
      switch (blk.kind) {
        case AdmmBlock::Kind::G: z_new = p.g.prox(v, 1.0 / rho); break;
        case AdmmBlock::Kind::H: z_new = p.h.prox(v, 1.0 / rho); break;
        case AdmmBlock::Kind::Channel: {
          const ConvexPiece& r = p.channels[static_cast<std::size_t>(blk.channel)];
          z_new = r.has_prox() ? r.prox(v, blk.weight / rho) : newton_prox(r, blk.weight, rho, v);
          break;
        }
      }
      dual_change += apply_kt(blk, z_new - z[j]);
      z[j] = std::move(z_new);
      u[j] += kx - z[j];
      primal_sq += (kx - z[j]).squaredNorm();
      scale_sq = std::max(scale_sq, kx.squaredNorm());
    }
    const double r_primal = std::sqrt(primal_sq);
    const double r_dual = rho * dual_change.norm();
    const double threshold = spec.tol * (1.0 + std::sqrt(scale_sq));
    if (r_primal <= threshold && r_dual <= threshold) break;

    // Penalty balancing stops after a warm-up so the tail runs at fixed rho.
    if (it % 25 == 0 && it <= 2500) {
      double factor_change = 1.0;
      if (r_primal > 10.0 * r_dual) factor_change = 2.0;
      else if (r_dual > 10.0 * r_primal) factor_change = 0.5;
      if (factor_change != 1.0) {
        rho *= factor_change;
        for (auto& uj : u) uj /= factor_change;
        factor.compute((metric.q + rho * gram).eval());
      }
    }
  }
  // The g-block copy is feasible for indicator-type g; use it when present.
  for (std::size_t j = 0; j < blocks.size(); ++j)
    if (blocks[j].kind == AdmmBlock::Kind::G && !std::isfinite(p.g.value(x))) return z[j];
  return x;
}

Vector oracle_solve(const ModelState& st, const ProximalMetric& metric, const GridSpec& spec) {
  const int m = st.dim();
  if (m > 3) throw ConfigError("oracle_solve: grid mode supports m <= 3, got " + std::to_string(m));
  if (spec.points_per_dim < 2) throw ConfigError("oracle_solve: need at least 2 grid points per dimension");
  Vector lo = spec.lo.size() == m ? spec.lo : Vector(st.x.array() - spec.radius);
  Vector hi = spec.hi.size() == m ? spec.hi : Vector(st.x.array() + spec.radius);

  Vector best = st.x;
  double best_value = prox_model_value(st, metric, st.x);
  const int n = spec.points_per_dim;
  long total = 1;
  for (int d = 0; d < m; ++d) total *= n;
  Vector pt(m);
  for (int level = 0; level < spec.levels; ++level) {
    for (long idx = 0; idx < total; ++idx) {
      long rem = idx;
      for (int d = 0; d < m; ++d) {
        const long k = rem % n;
        rem /= n;
        pt[d] = lo[d] + (hi[d] - lo[d]) * static_cast<double>(k) / static_cast<double>(n - 1);
      }
      const double v = prox_model_value(st, metric, pt);
      if (v < best_value) {
        best_value = v;
        best = pt;
      }
    }
    const Vector half = 0.5 * spec.shrink * (hi - lo);
    lo = best - half;
    hi = best + half;
  }
  if (!std::isfinite(best_value)) throw NumericalError("oracle_solve: no feasible grid point");
  return best;
}

}  // namespace pcx
