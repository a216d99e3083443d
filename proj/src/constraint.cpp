#include "knotflow/constraint.hpp"

#include <cmath>
#include <string>

#include "knotflow/collision.hpp"
#include "knotflow/error.hpp"

namespace knotflow {

ConstraintTargets ConstraintTargets::from_polygon(const Polygon& p) {
  return {p.edge_lengths()};
}

ConstraintTargets ConstraintTargets::uniform(int edges, double total_length) {
  return {Vec::Constant(edges, total_length / edges)};
}

void ConstraintTargets::validate(int edges) const {
  if (lengths.size() != edges)
    fail(ErrorKind::DimensionMismatch, "target lengths do not match edge count");
  if (!(lengths.minCoeff() > 0.0))
    fail(ErrorKind::InvalidArgument, "target lengths must be positive");
}

Vec ConstraintState::stacked() const {
  Vec out(log_residual.size() + barycenter.size());
  out << log_residual, barycenter;
  return out;
}

double ConstraintState::inf_norm(double target_length) const {
  return std::max(log_residual.cwiseAbs().maxCoeff(), barycenter.norm() / target_length);
}

ConstraintState phi(const Polygon& p, const ConstraintTargets& targets) {
  targets.validate(p.size());
  const int n = p.size();
  ConstraintState st;
  st.log_residual.resize(n);
  st.barycenter = Vec::Zero(p.dim());
  for (int i = 0; i < n; ++i) {
    const double l = p.edge_length(i);
    st.log_residual[i] = std::log(l) - std::log(targets.lengths[i]);
    st.barycenter += 0.5 * l * (p.vertex(i) + p.vertex(i + 1));
  }
  return st;
}

Mat d_log_lengths(const Polygon& p) {
  const int n = p.size(), m = p.dim();
  Mat jac = Mat::Zero(n, p.dofs());
  for (int i = 0; i < n; ++i) {
    const EdgeFrame e = p.edge(i);
    const Vec row = e.tangent / e.length;
    jac.block(i, p.wrap(i + 1) * m, 1, m) += row.transpose();
    jac.block(i, i * m, 1, m) -= row.transpose();
  }
  return jac;
}

Mat d_phi(const Polygon& p) {
  const int n = p.size(), m = p.dim();
  Mat jac = Mat::Zero(n + m, p.dofs());
  jac.topRows(n) = d_log_lengths(p);
  const Mat eye = Mat::Identity(m, m);
  for (int i = 0; i < n; ++i) {
    const EdgeFrame e = p.edge(i);
    const Vec mid = 0.5 * (e.tail + e.head);
    const int tail = i, head = p.wrap(i + 1);
    // d(½ ℓ (P↑ + P↓)) = ½ ℓ (dP↑ + dP↓) + mid τᵀ (dP↑ - dP↓)
    jac.block(n, tail * m, m, m) += 0.5 * e.length * eye - mid * e.tangent.transpose();
    jac.block(n, head * m, m, m) += 0.5 * e.length * eye + mid * e.tangent.transpose();
  }
  return jac;
}

Polygon centered(const Polygon& p) {
  const Vec b = phi(p, ConstraintTargets::from_polygon(p)).barycenter / p.length();
  return p.transformed(Mat::Identity(p.dim(), p.dim()), -b);
}

RestoreResult restore_feasibility(const Polygon& trial, const ConstraintTargets& targets,
                                  const SaddleFactorization& saddle,
                                  const RestoreOptions& options) {
  const double target_length = targets.total();
  Polygon q = trial;
  double previous = 0.0;
  for (int it = 0;; ++it) {
    const ConstraintState st = phi(q, targets);
    const double res = st.inf_norm(target_length);
    if (!std::isfinite(res))
      fail(ErrorKind::NonConvergence, "restoration produced a non-finite residual");
    if (res <= options.tol) {
      if (proximity(q).min_distance <= kContactRelTol * q.length())
        fail(ErrorKind::SelfIntersection, "restored polygon self-intersects");
      return {std::move(q), it, res};
    }
    if (it >= options.max_iter)
      fail(ErrorKind::NonConvergence, "restoration residual " + std::to_string(res) +
                                          " after " + std::to_string(it) + " iterations");
    if (it > 0 && res > previous)
      fail(ErrorKind::NonConvergence, "restoration residual increased");
    previous = res;
    const Vec dx = saddle.pseudoinverse_apply(st.stacked());
    Mat next = q.vertices() - Eigen::Map<const Mat>(dx.data(), q.dim(), q.size());
    q = Polygon::unchecked(std::move(next));
  }
}

double stretch_penalty(const Polygon& p, const ConstraintTargets& targets) {
  targets.validate(p.size());
  const double total = targets.total();
  double sum = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    const double r = std::log(p.edge_length(i) / targets.lengths[i]);
    sum += targets.lengths[i] / total * r * r;
  }
  return sum;
}

Vec d_stretch_penalty(const Polygon& p, const ConstraintTargets& targets) {
  targets.validate(p.size());
  const double total = targets.total();
  Vec weights(p.size());
  for (int i = 0; i < p.size(); ++i)
    weights[i] = 2.0 * targets.lengths[i] / total * std::log(p.edge_length(i) / targets.lengths[i]);
  return d_log_lengths(p).transpose() * weights;
}

}  // namespace knotflow
