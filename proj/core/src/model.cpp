#include "pcx/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pcx/errors.hpp"

namespace pcx {

ModelState build_model(const CompositeProblem& problem, const Vector& x,
                       double sign_tolerance) {
  if (x.size() != problem.dim())
    throw ConfigError("build_model: point has dimension " + std::to_string(x.size()) +
                      ", expected " + std::to_string(problem.dim()));
  ModelState st;
  st.problem = &problem;
  st.x = x;
  st.g_value = problem.g.value(x);
  if (!std::isfinite(st.g_value))
    throw ConfigError("build_model: g(x_k) is not finite");

  const int n = problem.num_channels();
  double total = st.g_value;
  if (!problem.h.zero) {
    st.inner_value = problem.inner.value(x);
    st.inner_jacobian = problem.inner.jacobian(x);
    const double hv = problem.h.value(st.inner_value);
    if (!std::isfinite(hv)) throw OracleContractError("h returned a non-finite value");
    total += hv;
  } else {
    st.inner_value = Vector::Zero(problem.inner.output_dim);
    st.inner_jacobian = Matrix::Zero(problem.inner.output_dim, problem.dim());
  }

  st.channel_value = n > 0 ? problem.channel_values(x) : Vector();
  st.outer_gradient = Vector::Zero(n);
  if (n > 0 && !problem.outer.zero) {
    st.outer_value = problem.outer_value(st.channel_value);
    if (!std::isfinite(st.outer_value)) throw OracleContractError("s returned a non-finite value");
    st.outer_gradient = problem.outer_gradient(st.channel_value);
    total += st.outer_value;
  }
  st.objective = total;

  st.is_linearized.assign(static_cast<std::size_t>(n), false);
  st.channel_gradient.resize(static_cast<std::size_t>(n));
  st.channel_subgradient.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const ConvexPiece& r = problem.channels[idx];
    if (st.outer_gradient[i] < -sign_tolerance) {
      if (!r.has_gradient())
        throw ConfigError("build_model: channel " + std::to_string(i) +
                          " must be linearized (negative outer partial) but has no gradient oracle");
      st.linearized.push_back(i);
      st.is_linearized[idx] = true;
    }
    if (r.has_gradient()) st.channel_gradient[idx] = r.gradient(x);
    st.channel_subgradient[idx] = r.subgradient(x);
  }
  return st;
}

double channel_model_increment(const ModelState& st, const Vector& x) {
  const CompositeProblem& p = *st.problem;
  double acc = 0.0;
  const Vector d = x - st.x;
  for (int i = 0; i < p.num_channels(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const double w = st.outer_gradient[i];
    if (w == 0.0) continue;
    if (st.is_linearized[idx]) {
      acc += w * st.channel_gradient[idx].dot(d);
    } else {
      acc += w * (p.channels[idx].value(x) - st.channel_value[i]);
    }
  }
  return acc;
}

double eval_model(const ModelState& st, const Vector& x) {
  const CompositeProblem& p = *st.problem;
  const double gv = p.g.value(x);
  if (gv == kInf) return kInf;
  double total = gv;
  if (!p.h.zero) total += p.h.value(st.inner_value + st.inner_jacobian * (x - st.x));
  if (p.num_channels() > 0 && !p.outer.zero) {
    total += st.outer_value;
    total += channel_model_increment(st, x);
  }
  return total;
}

double model_design_error(const ModelState& st, const Vector& x) {
  const CompositeProblem& p = *st.problem;
  double acc = 0.0;
  const Vector d = x - st.x;
  for (int i : st.linearized) {
    const auto idx = static_cast<std::size_t>(i);
    const double gap = p.channels[idx].value(x) - st.channel_value[i] - st.channel_gradient[idx].dot(d);
    acc += st.outer_gradient[i] * gap;
  }
  return acc;
}

ModelErrorReport model_error_bounds_check(const ModelState& st,
                                          const ConstantRegistry& constants,
                                          const std::vector<Vector>& samples,
                                          double slack_scale) {
  ModelErrorReport rep;
  const double lu = constants.upper_model_constant;
  const double ll = constants.lower_model_constant;
  for (const auto& x : samples) {
    const double f = evaluate_objective(*st.problem, x);
    if (!std::isfinite(f)) continue;
    const double model = eval_model(st, x);
    const double err = f - model;
    const double d2 = (x - st.x).squaredNorm();
    const double upper = 0.5 * lu * d2;
    const double lower = 0.5 * ll * d2;
    const double slack = slack_scale * (1.0 + std::abs(f));
    ++rep.samples;
    const double up_excess = err - upper;
    const double low_excess = -err - lower;
    if (up_excess > slack) ++rep.upper_violations;
    if (low_excess > slack) ++rep.lower_violations;
    rep.max_normalized_violation = std::max(
        rep.max_normalized_violation, std::max(up_excess, low_excess) / (1.0 + std::abs(f)));
    if (upper > 0.0) rep.upper_tightness = std::max(rep.upper_tightness, err / upper);
    if (lower > 0.0) rep.lower_tightness = std::max(rep.lower_tightness, -err / lower);
  }
  return rep;
}

PsdProjection psd_project(const Matrix& m) {
  if (m.rows() != m.cols()) throw ConfigError("psd_project: matrix is not square");
  PsdProjection out;
  if (m.size() == 0) {
    out.projected = m;
    out.gap = m;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "psd_project: eigensolver failed (n=" << m.rows() << ", |M|_F=" << m.norm()
        << ", asymmetry=" << (m - m.transpose()).norm()
        << ", finite=" << (m.allFinite() ? "yes" : "no") << ")";
    throw NumericalError(msg.str());
  }
  const Vector clipped = eig.eigenvalues().cwiseMax(0.0);
  const Matrix& v = eig.eigenvectors();
  Matrix proj = v * clipped.asDiagonal() * v.transpose();
  out.projected = 0.5 * (proj + proj.transpose());
  out.gap = out.projected - m;
  return out;
}

CurvatureBlocks assemble_curvature(const ModelState& st) {
  const CompositeProblem& p = *st.problem;
  const int m = st.dim();
  CurvatureBlocks blocks;
  blocks.inner = Matrix::Zero(m, m);
  blocks.outer = Matrix::Zero(m, m);

  if (!p.h.zero && !p.inner.zero && p.inner.has_hessian()) {
    const Vector y = (p.h.has_gradient() && !p.h.nonsmooth) ? p.h.gradient(st.inner_value)
                                                             : p.h.subgradient(st.inner_value);
    for (int j = 0; j < p.inner.output_dim; ++j) {
      if (y[j] == 0.0) continue;
      blocks.inner += y[j] * p.inner.component_hessian(st.x, j);
    }
    blocks.has_inner = true;
  }

  const int n = p.num_channels();
  if (n > 0 && !p.outer.zero && p.outer.has_hessian()) {
    Matrix gr(n, m);
    for (int i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      gr.row(i) = (st.channel_gradient[idx].size() == m ? st.channel_gradient[idx]
                                                        : st.channel_subgradient[idx])
                      .transpose();
    }
    const Matrix hs = p.outer.component_hessian(st.channel_value, 0);
    blocks.outer = gr.transpose() * hs * gr;
    blocks.has_outer_pullback = true;
    for (int i : st.linearized) {
      const ConvexPiece& r = p.channels[static_cast<std::size_t>(i)];
      if (!r.has_hessian()) continue;
      blocks.outer += st.outer_gradient[i] * r.hessian(st.x);
      blocks.has_compensation = true;
    }
  }

  const Matrix sum = blocks.inner + blocks.outer;
  blocks.combined = 0.5 * (sum + sum.transpose());
  PsdProjection proj = psd_project(blocks.combined);
  blocks.projected = std::move(proj.projected);
  blocks.gap = std::move(proj.gap);
  return blocks;
}

ProximalMetric make_metric(double mu, const Matrix& curvature) {
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw ConfigError("make_metric: mu must be positive and finite");
  if (curvature.rows() != curvature.cols())
    throw ConfigError("make_metric: curvature block is not square");
  ProximalMetric metric;
  metric.mu = mu;
  metric.curvature = curvature;
  const auto m = curvature.rows();
  metric.q = curvature;
  metric.q.diagonal().array() += mu;
  metric.scalar = curvature.isZero(0.0);
  if (metric.scalar || m == 0) {
    metric.sigma_min = mu;
    metric.sigma_max = mu;
    return metric;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(curvature, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("make_metric: eigensolver failed");
  metric.sigma_min = mu + std::max(0.0, eig.eigenvalues().minCoeff());
  metric.sigma_max = mu + std::max(0.0, eig.eigenvalues().maxCoeff());
  return metric;
}

ProximalMetric make_metric(double mu, int m) { return make_metric(mu, Matrix::Zero(m, m)); }

}  // namespace pcx
