#include "knotflow/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <optional>
#include <utility>

#include "knotflow/collision.hpp"
#include "knotflow/energy.hpp"
#include "knotflow/error.hpp"

namespace knotflow {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ProjGD: return "ProjGD";
    case Method::ImplicitEulerL2: return "ImplicitEulerL2";
    case Method::NCG: return "NCG";
    case Method::LBFGS: return "LBFGS";
    case Method::Nesterov: return "Nesterov";
    case Method::TrustRegion: return "TrustRegion";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::ProjGD, Method::ImplicitEulerL2, Method::NCG, Method::LBFGS,
                   Method::Nesterov, Method::TrustRegion})
    if (name == to_string(m)) return m;
  fail(ErrorKind::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Auto: return "auto";
    case Mode::Feasible: return "feasible";
    case Mode::Penalty: return "penalty";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  for (Mode m : {Mode::Auto, Mode::Feasible, Mode::Penalty})
    if (name == to_string(m)) return m;
  fail(ErrorKind::InvalidArgument, "unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Converged: return "converged";
    case Status::MaxIterations: return "max_iter";
    case Status::TargetReached: return "target_reached";
    case Status::TimeBudget: return "time_budget";
    case Status::LineSearchFailure: return "line_search_failure";
    case Status::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

Mode OptimizerConfig::resolved_mode() const {
  if (mode != Mode::Auto) return mode;
  switch (method) {
    case Method::NCG:
    case Method::LBFGS:
    case Method::Nesterov: return Mode::Penalty;
    default: return Mode::Feasible;
  }
}

void OptimizerConfig::validate() const {
  metric.validate();
  auto bad = [](const std::string& what) { fail(ErrorKind::InvalidArgument, what); };
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) bad("armijo_c must lie in (0, 1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
    bad("backtrack_factor must lie in (0, 1)");
  if (max_iter < 0) bad("max_iter must be non-negative");
  if (!(grad_tol >= 0.0) || !(abs_grad_tol >= 0.0)) bad("gradient tolerances must be >= 0");
  if (!(max_displacement > 0.0) || !(step_growth > 1.0))
    bad("max_displacement must be positive and step_growth above 1");
  if (!(wolfe_c1 > 0.0 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0))
    bad("Wolfe constants need 0 < c1 < c2 < 1");
  if (lbfgs_history < 1) bad("lbfgs_history must be positive");
  if (!(tr_radius > 0.0 && tr_expand > 1.0 && tr_shrink > 0.0 && tr_shrink < 1.0 &&
        tr_accept_low < tr_accept_high))
    bad("invalid trust-region parameters");
  const Mode m = resolved_mode();
  if (m == Mode::Penalty && !(alpha > 0.0)) bad("penalty mode needs alpha > 0");
  const bool feasible_only = method == Method::ImplicitEulerL2 || method == Method::TrustRegion;
  const bool penalty_only =
      method == Method::NCG || method == Method::LBFGS || method == Method::Nesterov;
  if (feasible_only && m == Mode::Penalty)
    bad(std::string(to_string(method)) + " runs in feasible mode only");
  if (penalty_only && m == Mode::Feasible)
    bad(std::string(to_string(method)) + " runs in penalty mode only");
}

namespace {

using Clock = std::chrono::steady_clock;

Vec reshape_flat(const Polygon& p) { return p.flat(); }

// Step length whose largest vertex displacement equals `fraction`·L0.
double displacement_cap(const Polygon& p, const Vec& u, double fraction, double total) {
  const Eigen::Map<const Mat> field(u.data(), p.dim(), p.size());
  const double largest = field.colwise().norm().maxCoeff();
  if (!(largest > 0.0)) return 0.0;
  return fraction * total / largest;
}

// Metric for penalty methods: G with the barycenter term (no barycenter
// constraint holds translations in place) plus α·Jᵀ diag(ℓ0/L0) J on the
// log-length rows, except for L2.
Mat penalty_metric(const Polygon& p, const OptimizerConfig& cfg,
                   const ConstraintTargets& targets) {
  MetricKind kind = cfg.metric;
  if (kind.type != MetricType::L2) kind.include_barycenter_term = true;
  Mat g = assemble_gram(p, kind, cfg.quad).dense();
  if (kind.type != MetricType::L2) {
    const Mat jl = d_log_lengths(p);
    const Vec w = targets.lengths / targets.total();
    g.noalias() += cfg.alpha * jl.transpose() * w.asDiagonal() * jl;
  }
  return 0.5 * (g + g.transpose());
}

Eigen::LLT<Mat> factor_spd(const Mat& g) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success)
    fail(ErrorKind::SingularSystem, "penalty metric is not positive definite");
  return llt;
}

Status status_for(const Error& e) {
  return e.kind() == ErrorKind::LineSearchFailure ? Status::LineSearchFailure
                                                  : Status::NumericalFailure;
}

// Shared bookkeeping: trace rows, stopping rules and the current iterate.
class Driver {
 public:
  Driver(const Polygon& start, const OptimizerConfig& cfg)
      : cfg_(cfg),
        mode_(cfg.resolved_mode()),
        t0_(Clock::now()),
        p(centered(start)),
        targets(ConstraintTargets::from_polygon(p)) {
    objective.quad = cfg.quad;
    if (mode_ == Mode::Penalty) {
      objective.targets = &targets;
      objective.alpha = cfg.alpha;
    }
    f = objective.value(p);
    g = objective.gradient(p);
  }

  bool feasible() const { return mode_ == Mode::Feasible; }
  const OptimizerConfig& cfg() const { return cfg_; }

  /// Appends the row for the current iterate; true when the run should stop.
  bool record(double grad_norm) {
    TraceRecord row;
    row.iter = iter;
    row.time_s = std::chrono::duration<double>(Clock::now() - t0_).count();
    row.energy = f;
    row.grad_norm = grad_norm;
    row.step_size = pending_.tau;
    row.phi_inf = phi(p, targets).inf_norm(targets.total());
    row.backtracks = pending_.backtracks;
    row.newton_iters = pending_.newton;
    trace_.push_back(row);
    if (cfg_.on_iterate) cfg_.on_iterate(iter, p);
    if (iter == 0) g0 = grad_norm;

    if (grad_norm <= cfg_.abs_grad_tol || (iter > 0 && grad_norm <= cfg_.grad_tol * g0))
      return finish(Status::Converged);
    if (f <= cfg_.target_energy) return finish(Status::TargetReached);
    if (iter >= cfg_.max_iter) return finish(Status::MaxIterations);
    if (row.time_s >= cfg_.time_budget) return finish(Status::TimeBudget);
    return false;
  }

  void accept(Polygon next, double value, Vec gradient, double tau, int backtracks,
              int newton) {
    // Penalty objectives ignore translations; drop the drift so the
    // barycenter part of Φ stays zero like in feasible mode.
    p = feasible() ? std::move(next) : centered(next);
    f = value;
    g = std::move(gradient);
    last_tau = tau;
    pending_ = {tau, backtracks, newton};
    ++iter;
  }

  void accept(StepResult step) {
    Vec grad = step.gradient.size() ? std::move(step.gradient) : objective.gradient(step.polygon);
    accept(std::move(step.polygon), step.value, std::move(grad), step.tau, step.backtracks,
           step.newton_iters);
  }

  bool finish(Status s, std::string message = {}) {
    status_ = s;
    message_ = std::move(message);
    return true;
  }

  bool abort(const Error& e) { return finish(status_for(e), e.what()); }

  /// Initial trial step: capped by the displacement limit and warm-started
  /// from the last accepted step.
  double tau_max(const Vec& u) const {
    double cap = displacement_cap(p, u, cfg_.max_displacement, targets.total());
    if (std::isfinite(last_tau)) cap = std::min(cap, cfg_.step_growth * last_tau);
    return cap;
  }

  LineSearchSettings armijo_settings(const Vec& u, const SaddleFactorization* saddle) const {
    LineSearchSettings s;
    s.armijo_c = cfg_.armijo_c;
    s.backtrack_factor = cfg_.backtrack_factor;
    s.tau_max = tau_max(u);
    s.saddle = saddle;
    s.targets = &targets;
    s.restore = cfg_.restore;
    return s;
  }

  RunResult result() && {
    return {std::move(p), std::move(trace_), status_, std::move(message_)};
  }

 private:
  struct Pending {
    double tau = 0.0;
    int backtracks = 0;
    int newton = 0;
  };

  const OptimizerConfig& cfg_;
  Mode mode_;
  Clock::time_point t0_;
  std::vector<TraceRecord> trace_;
  Pending pending_;
  Status status_ = Status::MaxIterations;
  std::string message_;

 public:
  Polygon p;
  ConstraintTargets targets;
  Objective objective;
  double f = 0.0;
  Vec g;
  int iter = 0;
  double g0 = 0.0;
  double last_tau = std::numeric_limits<double>::infinity();
};

struct FeasibleDirection {
  SaddleFactorization saddle;
  ProjectedGradient pg;
  double norm;
};

FeasibleDirection feasible_direction(const Driver& d, const MetricKind& kind) {
  const GramOperator gram = assemble_gram(d.p, kind, d.cfg().quad);
  SaddleFactorization saddle = SaddleFactorization::factorize(gram, d_phi(d.p));
  ProjectedGradient pg = saddle.projected_gradient(d.g);
  const double norm = std::sqrt(std::max(0.0, d.g.dot(pg.u)));
  return {std::move(saddle), std::move(pg), norm};
}

// ∇²(log ℓ_I) summed with weights, vertex-major N·m layout.
Mat weighted_log_length_hessian(const Polygon& p, const Vec& weights) {
  const int n = p.size(), m = p.dim();
  Mat h = Mat::Zero(p.dofs(), p.dofs());
  for (int i = 0; i < n; ++i) {
    if (weights[i] == 0.0) continue;
    const int i1 = p.wrap(i + 1);
    const Vec e = p.vertex(i1) - p.vertex(i);
    const double l2 = e.squaredNorm();
    const Mat block =
        weights[i] * (Mat::Identity(m, m) - 2.0 * e * e.transpose() / l2) / l2;
    h.block(i * m, i * m, m, m) += block;
    h.block(i1 * m, i1 * m, m, m) += block;
    h.block(i * m, i1 * m, m, m) -= block;
    h.block(i1 * m, i * m, m, m) -= block;
  }
  return h;
}

}  // namespace

RunResult run_projected_gd(const Polygon& start, OptimizerConfig config) {
  config.validate();
  Driver d(start, config);
  for (;;) {
    try {
      if (d.feasible()) {
        FeasibleDirection dir = feasible_direction(d, config.metric);
        if (d.record(dir.norm)) break;
        const Vec u = -dir.pg.u;
        d.accept(armijo_step(d.p, d.f, d.g, u, d.objective, d.armijo_settings(u, &dir.saddle)));
      } else {
        const Eigen::LLT<Mat> llt = factor_spd(penalty_metric(d.p, config, d.targets));
        const Vec z = llt.solve(d.g);
        if (d.record(std::sqrt(std::max(0.0, d.g.dot(z))))) break;
        const Vec u = -z;
        d.accept(armijo_step(d.p, d.f, d.g, u, d.objective, d.armijo_settings(u, nullptr)));
      }
    } catch (const Error& e) {
      d.abort(e);
      break;
    }
  }
  return std::move(d).result();
}

ImplicitStep implicit_euler_displacement(const Polygon& p, const Mat& gram, const Mat& jacobian,
                                         double dt, const QuadratureRule& quad,
                                         int max_newton) {
  const int n = p.dofs();
  const int c = static_cast<int>(jacobian.rows());
  if (gram.rows() != n || jacobian.cols() != n)
    fail(ErrorKind::DimensionMismatch, "implicit Euler: operator sizes do not match");
  if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "implicit Euler needs dt > 0");
  Mat kkt = Mat::Zero(n + c, n + c);
  kkt.topRightCorner(n, c) = jacobian.transpose();
  kkt.bottomLeftCorner(c, n) = jacobian;
  Vec rhs = Vec::Zero(n + c);
  Vec w = Vec::Zero(n);
  for (int it = 1; it <= max_newton; ++it) {
    const Polygon q = Polygon::unchecked(p.vertices() + Eigen::Map<const Mat>(w.data(), p.dim(), p.size()));
    const Mat h = d2_energy(q, quad);
    // Newton on G w/dt + DE(P+w) + Jᵀμ = 0, J w = 0, solved for the new w.
    kkt.topLeftCorner(n, n) = gram / dt + h;
    rhs.head(n) = h * w - d_energy(q, quad);
    const Vec sol = kkt.partialPivLu().solve(rhs);
    const Vec next = sol.head(n);
    if (!next.allFinite())
      fail(ErrorKind::NewtonInnerFailure, "implicit Euler Newton produced non-finite values");
    const double change = (next - w).norm();
    w = next;
    if (change <= 1e-10 * w.norm()) return {std::move(w), it};
  }
  fail(ErrorKind::NewtonInnerFailure,
       "implicit Euler Newton did not converge in " + std::to_string(max_newton) + " iterations");
}

RunResult run_implicit_euler_l2(const Polygon& start, OptimizerConfig config) {
  config.metric = MetricKind{MetricType::L2, true, false, true};
  config.validate();
  Driver d(start, config);
  const double allowance_scale = 1e-13;
  for (;;) {
    try {
      FeasibleDirection dir = feasible_direction(d, config.metric);
      if (d.record(dir.norm)) break;
      const Mat gram = dir.saddle.gram();
      const Mat jac = dir.saddle.jacobian();
      const double dt0 = initial_step(d.p, -dir.pg.u, d.tau_max(-dir.pg.u));
      int backtracks = 0;
      bool accepted = false;
      for (double dt = dt0; dt >= 1e-14 * dt0 && !accepted; dt *= config.backtrack_factor) {
        try {
          const ImplicitStep st = implicit_euler_displacement(d.p, gram, jac, dt, config.quad);
          const double slope = d.g.dot(st.w);
          if (!(slope < 0.0)) fail(ErrorKind::NotDescentDirection, "implicit step ascends");
          if (collision_bound(d.p, st.w, 1.0).contact)
            fail(ErrorKind::SelfIntersection, "implicit step collides");
          RestoreResult restored =
              restore_feasibility(d.p.displaced(st.w, 1.0), d.targets, dir.saddle, config.restore);
          const double f = d.objective.value(restored.polygon);
          if (f <= d.f + config.armijo_c * slope + allowance_scale * std::max(1.0, std::abs(d.f))) {
            Vec grad = d.objective.gradient(restored.polygon);
            d.accept(std::move(restored.polygon), f, std::move(grad), dt, backtracks,
                     restored.iterations);
            accepted = true;
          }
        } catch (const Error&) {
        }
        if (!accepted) ++backtracks;
      }
      if (!accepted)
        fail(ErrorKind::LineSearchFailure, "implicit Euler step size underflow");
    } catch (const Error& e) {
      d.abort(e);
      break;
    }
  }
  return std::move(d).result();
}

RunResult run_ncg_pr_plus(const Polygon& start, OptimizerConfig config) {
  if (config.mode == Mode::Auto) config.mode = Mode::Penalty;
  config.validate();
  Driver d(start, config);
  Vec z_prev, g_prev, dir_prev;
  double tau_init = 1.0;
  for (;;) {
    try {
      const Eigen::LLT<Mat> llt = factor_spd(penalty_metric(d.p, config, d.targets));
      const Vec z = llt.solve(d.g);
      if (d.record(std::sqrt(std::max(0.0, d.g.dot(z))))) break;
      Vec dir = -z;
      if (dir_prev.size()) {
        const double beta = pr_plus_beta(z, d.g, z_prev, g_prev);
        dir += beta * dir_prev;
        if (!(d.g.dot(dir) < 0.0)) dir = -z;  // automatic reset
      }
      StepResult step = wolfe_step(d.p, d.f, d.g, dir, d.objective,
                                   std::min(tau_init, d.tau_max(dir)), config.wolfe_c1,
                                   config.wolfe_c2);
      z_prev = z;
      g_prev = d.g;
      dir_prev = dir;
      tau_init = std::max(step.tau, 1e-3 * tau_init);
      d.accept(std::move(step));
    } catch (const Error& e) {
      d.abort(e);
      break;
    }
  }
  return std::move(d).result();
}

RunResult run_lbfgs(const Polygon& start, OptimizerConfig config) {
  if (config.mode == Mode::Auto) config.mode = Mode::Penalty;
  config.validate();
  Driver d(start, config);
  std::vector<Vec> s_hist, y_hist;
  for (;;) {
    try {
      const Eigen::LLT<Mat> llt = factor_spd(penalty_metric(d.p, config, d.targets));
      const Vec z = llt.solve(d.g);
      if (d.record(std::sqrt(std::max(0.0, d.g.dot(z))))) break;
      Vec dir = -lbfgs_direction(d.g, s_hist, y_hist, [&](const Vec& v) { return Vec(llt.solve(v)); });
      if (!(d.g.dot(dir) < 0.0)) {
        s_hist.clear();
        y_hist.clear();
        dir = -z;
      }
      const Vec x_old = reshape_flat(d.p);
      const Vec g_old = d.g;
      StepResult step = wolfe_step(d.p, d.f, d.g, dir, d.objective,
                                   std::min(1.0, d.tau_max(dir)), config.wolfe_c1,
                                   config.wolfe_c2);
      d.accept(std::move(step));
      Vec s = reshape_flat(d.p) - x_old;
      Vec y = d.g - g_old;
      if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
        s_hist.push_back(std::move(s));
        y_hist.push_back(std::move(y));
        if (static_cast<int>(s_hist.size()) > config.lbfgs_history) {
          s_hist.erase(s_hist.begin());
          y_hist.erase(y_hist.begin());
        }
      }
    } catch (const Error& e) {
      d.abort(e);
      break;
    }
  }
  return std::move(d).result();
}

RunResult run_nesterov(const Polygon& start, OptimizerConfig config) {
  if (config.mode == Mode::Auto) config.mode = Mode::Penalty;
  config.validate();
  Driver d(start, config);
  std::optional<Polygon> previous;
  int momentum_age = 0;
  for (;;) {
    try {
      const Eigen::LLT<Mat> llt = factor_spd(penalty_metric(d.p, config, d.targets));
      const Vec z = llt.solve(d.g);
      if (d.record(std::sqrt(std::max(0.0, d.g.dot(z))))) break;

      std::optional<StepResult> step;
      if (previous && momentum_age > 0) {
        // Extrapolate, truncated by the collision bound, then step from there.
        const double beta = static_cast<double>(momentum_age) / (momentum_age + 3);
        const Vec v = beta * (reshape_flat(d.p) - reshape_flat(*previous));
        try {
          const Polygon y = d.p.displaced(v, initial_step(d.p, v, 1.0));
          const double fy = d.objective.value(y);
          const Vec gy = d.objective.gradient(y);
          const Vec u = -Vec(llt.solve(gy));
          StepResult s = armijo_step(y, fy, gy, u, d.objective, d.armijo_settings(u, nullptr));
          if (s.value < d.f) step = std::move(s);
        } catch (const Error&) {
        }
      }
      if (!step) {
        momentum_age = 0;  // objective increased: plain step from the iterate
        const Vec u = -z;
        step = armijo_step(d.p, d.f, d.g, u, d.objective, d.armijo_settings(u, nullptr));
      }
      previous = d.p;
      ++momentum_age;
      d.accept(std::move(*step));
    } catch (const Error& e) {
      d.abort(e);
      break;
    }
  }
  return std::move(d).result();
}

Vec solve_trust_region_subproblem(const Vec& g, const Mat& h, double radius) {
  const int k = static_cast<int>(g.size());
  if (h.rows() != k || h.cols() != k)
    fail(ErrorKind::DimensionMismatch, "trust-region model sizes differ");
  if (k == 0) return Vec();
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (h + h.transpose()));
  const Vec& lam = eig.eigenvalues();
  const Vec gq = eig.eigenvectors().transpose() * g;
  auto step_for = [&](double shift) {
    Vec c(k);
    for (int i = 0; i < k; ++i) c[i] = -gq[i] / (lam[i] + shift);
    return c;
  };
  if (lam[0] > 0.0) {
    const Vec c = step_for(0.0);
    if (c.norm() <= radius) return eig.eigenvectors() * c;
  }
  // Boundary solution: find shift > max(0, -λ_min) with |c(shift)| = radius.
  double lo = std::max(0.0, -lam[0]);
  double hi = lo + g.norm() / radius + std::abs(lam[k - 1]) + 1.0;
  if (step_for(lo * (1.0 + 1e-12) + 1e-300).norm() < radius) {
    // hard case: g has no weight on the lowest mode; move along it instead
    Vec c = step_for(lo * (1.0 + 1e-12) + 1e-300);
    c[0] = 0.0;
    const double rest = std::sqrt(std::max(0.0, radius * radius - c.squaredNorm()));
    c[0] = gq[0] > 0.0 ? -rest : rest;
    return eig.eigenvectors() * c;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (step_for(mid).norm() > radius)
      lo = mid;
    else
      hi = mid;
  }
  return eig.eigenvectors() * step_for(hi);
}

double update_trust_radius(double radius, double ratio, bool on_boundary,
                           const OptimizerConfig& config) {
  if (ratio < config.tr_accept_low) return radius * config.tr_shrink;
  if (ratio > config.tr_accept_high && on_boundary) return radius * config.tr_expand;
  return radius;
}

RunResult run_trust_region(const Polygon& start, OptimizerConfig config) {
  config.validate();
  Driver d(start, config);
  double radius = config.tr_radius;
  Vec prev_u;
  for (;;) {
    try {
      FeasibleDirection dir = feasible_direction(d, config.metric);
      if (d.record(dir.norm)) break;
      const Mat gram = dir.saddle.gram();

      // Lagrangian Hessian: energy curvature minus multiplier-weighted
      // curvature of the log-length constraints.
      Mat hess = d2_energy(d.p, config.quad) -
                 weighted_log_length_hessian(d.p, dir.pg.lambda.head(d.p.size()));

      std::vector<Vec> candidates{dir.pg.u};
      if (prev_u.size()) candidates.push_back(dir.saddle.project_tangent(prev_u));
      if (dir.norm < config.tr_newton_gate * d.g0) {
        const int n = d.p.dofs();
        const Mat jac = dir.saddle.jacobian();
        const int c = static_cast<int>(jac.rows());
        const double shift = 1e-6 * hess.norm() / gram.norm();
        Mat kkt = Mat::Zero(n + c, n + c);
        kkt.topLeftCorner(n, n) = hess + shift * gram;
        kkt.topRightCorner(n, c) = jac.transpose();
        kkt.bottomLeftCorner(c, n) = jac;
        Vec rhs = Vec::Zero(n + c);
        rhs.head(n) = -d.g;
        const Vec newton = Vec(kkt.partialPivLu().solve(rhs)).head(n);
        if (newton.allFinite() && d.g.dot(newton) < 0.0) candidates.push_back(newton);
      }

      // G-orthonormal basis of the subspace.
      std::vector<Vec> basis;
      for (Vec v : candidates) {
        for (const Vec& b : basis) v -= b.dot(gram * v) * b;
        const double norm = std::sqrt(std::max(0.0, v.dot(gram * v)));
        const double scale = std::sqrt(std::max(0.0, candidates[0].dot(gram * candidates[0])));
        if (norm > 1e-8 * scale && norm > 0.0) basis.push_back(v / norm);
      }
      const int k = static_cast<int>(basis.size());
      Mat b(d.p.dofs(), k);
      for (int i = 0; i < k; ++i) b.col(i) = basis[i];
      const Vec gr = b.transpose() * d.g;
      const Mat hr = b.transpose() * hess * b;

      int attempts = 0;
      const double radius_floor = 1e-14 * radius;
      for (;;) {
        if (radius < radius_floor)
          fail(ErrorKind::LineSearchFailure, "trust region collapsed");
        const Vec c = solve_trust_region_subproblem(gr, hr, radius);
        const double predicted = -(gr.dot(c) + 0.5 * c.dot(hr * c));
        const Vec s = b * c;
        double ratio = -1.0;
        std::optional<RestoreResult> restored;
        double f_new = d.f;
        if (predicted > 0.0) {
          try {
            if (collision_bound(d.p, s, 1.0).contact)
              fail(ErrorKind::SelfIntersection, "trust-region step collides");
            restored = restore_feasibility(d.p.displaced(s, 1.0), d.targets, dir.saddle,
                                           config.restore);
            f_new = d.objective.value(restored->polygon);
            ratio = (d.f - f_new) / predicted;
          } catch (const Error&) {
            restored.reset();
          }
        }
        radius = update_trust_radius(radius, ratio, c.norm() >= 0.99 * radius, config);
        if (restored && ratio > 1e-4 && f_new < d.f) {
          prev_u = dir.pg.u;
          Vec grad = d.objective.gradient(restored->polygon);
          d.accept(std::move(restored->polygon), f_new, std::move(grad), c.norm(), attempts,
                   restored->iterations);
          break;
        }
        ++attempts;
      }
    } catch (const Error& e) {
      d.abort(e);
      break;
    }
  }
  return std::move(d).result();
}

RunResult optimize(const Polygon& start, const OptimizerConfig& config) {
  switch (config.method) {
    case Method::ProjGD: return run_projected_gd(start, config);
    case Method::ImplicitEulerL2: return run_implicit_euler_l2(start, config);
    case Method::NCG: return run_ncg_pr_plus(start, config);
    case Method::LBFGS: return run_lbfgs(start, config);
    case Method::Nesterov: return run_nesterov(start, config);
    case Method::TrustRegion: return run_trust_region(start, config);
  }
  fail(ErrorKind::InvalidArgument, "unknown method");
}

}  // namespace knotflow
