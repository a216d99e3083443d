#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "knotflow/collision.hpp"
#include "knotflow/constraint.hpp"
#include "knotflow/energy.hpp"
#include "knotflow/metric.hpp"
#include "knotflow/optimize.hpp"
#include "knotflow/saddle.hpp"
#include "support.hpp"

using namespace knotflow;
using knotflow::test::random_polygon;
using knotflow::test::random_vector;

namespace {

OptimizerConfig config_for(Method method, MetricType metric = MetricType::W32Geometric) {
  OptimizerConfig cfg;
  cfg.method = method;
  cfg.metric.type = metric;
  return cfg;
}

int iterations_to(const Polygon& start, MetricType metric, double level, int max_iter) {
  OptimizerConfig cfg = config_for(Method::ProjGD, metric);
  cfg.target_energy = level;
  cfg.grad_tol = 0.0;
  cfg.max_iter = max_iter;
  const RunResult r = optimize(start, cfg);
  return r.status == Status::TargetReached ? r.trace.back().iter : -1;
}

struct FeasibleSetup {
  Polygon p;
  ConstraintTargets targets;
  SaddleFactorization saddle;
  Vec grad;
  ProjectedGradient pg;
};

FeasibleSetup feasible_setup(const Polygon& start) {
  Polygon p = centered(start);
  ConstraintTargets targets = ConstraintTargets::from_polygon(p);
  SaddleFactorization saddle =
      SaddleFactorization::factorize(assemble_gram(p, MetricKind{}), d_phi(p));
  Vec grad = d_energy(p);
  ProjectedGradient pg = saddle.projected_gradient(grad);
  return {std::move(p), std::move(targets), std::move(saddle), std::move(grad), std::move(pg)};
}

// No consecutive pair of iterates admits a contact along the straight path.
void expect_collision_free_path(const Polygon& start, OptimizerConfig cfg) {
  std::vector<Polygon> iterates;
  cfg.on_iterate = [&](int, const Polygon& p) { iterates.push_back(p); };
  optimize(start, cfg);
  ASSERT_GE(iterates.size(), 2u);
  for (std::size_t k = 0; k + 1 < iterates.size(); ++k) {
    const Vec step = iterates[k + 1].flat() - iterates[k].flat();
    EXPECT_FALSE(collision_bound(iterates[k], step, 1.0).contact) << "step " << k;
  }
}

}  // namespace

TEST(Config, ModeResolutionAndValidation) {
  EXPECT_EQ(config_for(Method::ProjGD).resolved_mode(), Mode::Feasible);
  EXPECT_EQ(config_for(Method::TrustRegion).resolved_mode(), Mode::Feasible);
  EXPECT_EQ(config_for(Method::LBFGS).resolved_mode(), Mode::Penalty);
  EXPECT_EQ(config_for(Method::NCG).resolved_mode(), Mode::Penalty);
  EXPECT_EQ(config_for(Method::Nesterov).resolved_mode(), Mode::Penalty);

  OptimizerConfig bad = config_for(Method::ProjGD);
  bad.armijo_c = 1.5;
  EXPECT_KF_ERROR(bad.validate(), ErrorKind::InvalidArgument);
  OptimizerConfig tr = config_for(Method::TrustRegion);
  tr.mode = Mode::Penalty;
  EXPECT_KF_ERROR(tr.validate(), ErrorKind::InvalidArgument);
  OptimizerConfig lb = config_for(Method::LBFGS);
  lb.mode = Mode::Feasible;
  EXPECT_KF_ERROR(lb.validate(), ErrorKind::InvalidArgument);
  OptimizerConfig pen = config_for(Method::ProjGD);
  pen.mode = Mode::Penalty;
  pen.alpha = 0.0;
  EXPECT_KF_ERROR(pen.validate(), ErrorKind::InvalidArgument);

  for (Method m : {Method::ProjGD, Method::ImplicitEulerL2, Method::NCG, Method::LBFGS,
                   Method::Nesterov, Method::TrustRegion})
    EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_KF_ERROR(parse_method("SGD"), ErrorKind::InvalidArgument);
  EXPECT_EQ(parse_mode("penalty"), Mode::Penalty);
}

TEST(Armijo, RegularPolygonBarelyMoves) {
  const FeasibleSetup s = feasible_setup(regular_ngon(32, 1.0));
  const Vec u = -s.pg.u;
  Objective obj;
  LineSearchSettings ls;
  ls.tau_max = 1.0;
  ls.saddle = &s.saddle;
  ls.targets = &s.targets;
  const double e0 = energy_value(s.p);
  ASSERT_LT(s.grad.dot(u), 0.0);
  const StepResult r = armijo_step(s.p, e0, s.grad, u, obj, ls);
  EXPECT_LE(std::abs(r.value - e0), 1e-10);
}

TEST(Armijo, CoilStepDecreasesAndStaysFeasible) {
  const FeasibleSetup s = feasible_setup(coiled_unknot(96, 6, 0.5));
  const Vec u = -s.pg.u;
  Objective obj;
  LineSearchSettings ls;
  const Eigen::Map<const Mat> field(u.data(), 3, 96);
  ls.tau_max = 0.25 * s.p.length() / field.colwise().norm().maxCoeff();
  ls.saddle = &s.saddle;
  ls.targets = &s.targets;
  const double e0 = energy_value(s.p);
  const StepResult r = armijo_step(s.p, e0, s.grad, u, obj, ls);
  EXPECT_GT(r.tau, 0.0);
  EXPECT_LE(r.tau, ls.tau_max);
  EXPECT_LT(r.value, e0);
  EXPECT_LE(r.value, e0 + 0.5 * r.tau * s.grad.dot(u) + 1e-13 * e0);
  EXPECT_LE(r.newton_iters, 5);
  EXPECT_LE(phi(r.polygon, s.targets).inf_norm(s.targets.total()), 1e-8);
  EXPECT_DOUBLE_EQ(r.value, energy_value(r.polygon));
}

TEST(Armijo, AscentDirectionRejected) {
  const FeasibleSetup s = feasible_setup(coiled_unknot(64, 3, 0.8));
  Objective obj;
  LineSearchSettings ls;
  ls.saddle = &s.saddle;
  ls.targets = &s.targets;
  EXPECT_KF_ERROR(armijo_step(s.p, energy_value(s.p), s.grad, s.pg.u, obj, ls),
                  ErrorKind::NotDescentDirection);
}

TEST(Wolfe, AcceptedPointSatisfiesBothConditions) {
  const Polygon p = centered(random_polygon(20, 4));
  const ConstraintTargets t = ConstraintTargets::from_polygon(p);
  Objective obj;
  obj.targets = &t;
  obj.alpha = 10.0;
  const double f = obj.value(p);
  const Vec g = obj.gradient(p);
  const Vec u = -g / g.norm() * 0.01;
  const StepResult r = wolfe_step(p, f, g, u, obj, 1.0, 1e-4, 0.9);
  ASSERT_GT(r.tau, 0.0);
  EXPECT_LE(r.value, f + 1e-4 * r.tau * g.dot(u));
  ASSERT_EQ(r.gradient.size(), p.dofs());
  EXPECT_LE((r.gradient - obj.gradient(r.polygon)).norm(), 1e-12 * r.gradient.norm());
  EXPECT_GE(r.gradient.dot(u), 0.9 * g.dot(u));
}

TEST(PrPlus, ClampsNegativeCoefficient) {
  const Vec g_prev{{1.0, 0.0}}, z_prev{{2.0, 0.0}};
  // z·(g - g_prev) < 0.
  EXPECT_EQ(pr_plus_beta(Vec{{0.5, 0.0}}, Vec{{0.5, 0.0}}, z_prev, g_prev), 0.0);
  // Positive case reduces to the Polak-Ribière quotient.
  const Vec g{{0.5, 1.0}}, z{{0.25, 3.0}};
  EXPECT_NEAR(pr_plus_beta(z, g, z_prev, g_prev), z.dot(g - g_prev) / z_prev.dot(g_prev), 1e-15);
}

// On a strictly convex quadratic with exact line searches and memory at least
// the dimension, L-BFGS terminates in at most n steps.
TEST(Lbfgs, QuadraticFiniteTermination) {
  const int n = 16;
  const Mat r = Eigen::Map<const Mat>(random_vector(n * n, 1).data(), n, n);
  const Mat a = r * r.transpose() + n * Mat::Identity(n, n);
  const Vec diag = random_vector(n, 2).cwiseAbs().array() + 0.5;
  const Vec b = random_vector(n, 3);
  auto initial = [&](const Vec& v) { return Vec(v.cwiseQuotient(diag)); };
  Vec x = Vec::Zero(n);
  std::vector<Vec> s, y;
  const double g0 = b.norm();
  int iters = 0;
  for (; iters < 3 * n; ++iters) {
    const Vec g = a * x - b;
    if (g.norm() <= 1e-10 * g0) break;
    const Vec d = -lbfgs_direction(g, s, y, initial);
    ASSERT_LT(g.dot(d), 0.0);
    const double step = -g.dot(d) / d.dot(a * d);
    const Vec x_new = x + step * d;
    s.push_back(x_new - x);
    y.push_back(a * (x_new - x));
    x = x_new;
  }
  EXPECT_LE(iters, n + 1);
  EXPECT_LE((a * x - b).norm(), 1e-10 * g0);
}

TEST(Lbfgs, EmptyHistoryAppliesInitialOperator) {
  const Vec g{{1.0, -2.0, 4.0}};
  const Vec d = lbfgs_direction(g, {}, {}, [](const Vec& v) { return Vec(0.5 * v); });
  EXPECT_EQ(d, Vec(0.5 * g));
}

TEST(TrustRegionSubproblem, InteriorNewtonStep) {
  const Mat h = Vec{{2.0, 5.0, 1.0}}.asDiagonal();
  const Vec g{{1.0, -1.0, 0.5}};
  const Vec c = solve_trust_region_subproblem(g, h, 10.0);
  EXPECT_LE((c - Vec(-h.inverse() * g)).norm(), 1e-14);
}

// Polar grid search over the disk as an independent reference.
TEST(TrustRegionSubproblem, BoundaryAndIndefiniteCasesAgainstGrid) {
  const struct {
    Mat h;
    Vec g;
    double radius;
  } cases[] = {
      {Mat{{2.0, 0.5}, {0.5, 1.0}}, Vec{{3.0, -4.0}}, 0.5},
      {Mat{{1.0, 0.0}, {0.0, -2.0}}, Vec{{1.0, 0.3}}, 1.0},
      {Mat{{1.0, 0.0}, {0.0, -2.0}}, Vec{{1.0, 0.0}}, 1.0},  // hard case
      {Mat{{-1.0, 0.2}, {0.2, -0.5}}, Vec{{0.0, 0.0}}, 2.0},
  };
  for (const auto& tc : cases) {
    auto model = [&](const Vec& c) { return tc.g.dot(c) + 0.5 * c.dot(tc.h * c); };
    const Vec c = solve_trust_region_subproblem(tc.g, tc.h, tc.radius);
    EXPECT_LE(c.norm(), tc.radius * (1 + 1e-9));
    double best = 0.0;
    for (int i = 0; i <= 400; ++i)
      for (int k = 0; k < 720; ++k) {
        const double rad = tc.radius * i / 400, ang = 2 * std::numbers::pi * k / 720;
        best = std::min(best, model(Vec{{rad * std::cos(ang), rad * std::sin(ang)}}));
      }
    EXPECT_LE(model(c), best + 1e-9);
    EXPECT_GE(model(c), best - 1e-3 * std::abs(best));
  }
}

TEST(TrustRegion, RadiusUpdateRule) {
  const OptimizerConfig cfg;
  EXPECT_DOUBLE_EQ(update_trust_radius(1.0, 0.1, true, cfg), 0.25);
  EXPECT_DOUBLE_EQ(update_trust_radius(1.0, -1.0, false, cfg), 0.25);
  EXPECT_DOUBLE_EQ(update_trust_radius(1.0, 0.9, true, cfg), 2.0);
  EXPECT_DOUBLE_EQ(update_trust_radius(1.0, 0.9, false, cfg), 1.0);
  EXPECT_DOUBLE_EQ(update_trust_radius(1.0, 0.5, true, cfg), 1.0);
}

TEST(TrustRegion, SuperlinearNearMinimizer) {
  OptimizerConfig cfg = config_for(Method::TrustRegion);
  cfg.grad_tol = 1e-8;
  const RunResult r = optimize(perturbed_circle(32, 0.02, 3), cfg);
  EXPECT_EQ(r.status, Status::Converged) << r.message;
  const auto& t = r.trace;
  ASSERT_GE(t.size(), 3u);
  const std::size_t k = t.size() - 1;
  // Last contraction factor far below any linear rate seen with gradient steps.
  EXPECT_LT(t[k].grad_norm / t[k - 1].grad_norm, 1e-3);
  for (const TraceRecord& row : t) EXPECT_LE(row.phi_inf, 1e-8);
}

TEST(TrustRegion, NewtonGateSpeedsUpTail) {
  OptimizerConfig with = config_for(Method::TrustRegion);
  with.grad_tol = 1e-7;
  with.max_iter = 400;
  OptimizerConfig without = with;
  without.tr_newton_gate = 0.0;
  const Polygon start = perturbed_circle(32, 0.02, 3);
  const RunResult a = optimize(start, with);
  const RunResult b = optimize(start, without);
  ASSERT_EQ(a.status, Status::Converged) << a.message;
  EXPECT_LT(a.trace.back().iter, b.trace.back().iter);
}

TEST(ProjectedGd, PerturbedCircleReachesLevelQuickly) {
  const int iters = iterations_to(perturbed_circle(64, 0.05, 1), MetricType::W32Geometric, 4.05, 60);
  EXPECT_GE(iters, 0);
  EXPECT_LE(iters, 60);
}

// Level 4.05 lies within one step of the start for both metrics on this
// family, so the comparison uses 4.01.
TEST(ProjectedGd, L2NeedsManyMoreIterations) {
  const Polygon start = perturbed_circle(64, 0.05, 1);
  const int sobolev = iterations_to(start, MetricType::W32Geometric, 4.01, 100);
  const int l2 = iterations_to(start, MetricType::L2, 4.01, 5000);
  ASSERT_GT(sobolev, 0);
  ASSERT_GT(l2, 0);
  EXPECT_GE(l2, 10 * sobolev);
}

TEST(ProjectedGd, CoilUntanglesMonotonically) {
  OptimizerConfig cfg = config_for(Method::ProjGD);
  cfg.target_energy = 4.1;
  const RunResult r = optimize(coiled_unknot(96, 4, 0.6), cfg);
  EXPECT_EQ(r.status, Status::TargetReached) << r.message;
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    EXPECT_LT(r.trace[k].energy, r.trace[k - 1].energy);
    EXPECT_LE(r.trace[k].phi_inf, 1e-8);
    EXPECT_LE(r.trace[k].newton_iters, 5);
  }
}

TEST(ProjectedGd, TrefoilConvergesToKnottedMinimum) {
  OptimizerConfig cfg = config_for(Method::ProjGD);
  const Polygon start = torus_knot(2, 3, 120, 2.0, 1.0);
  const RunResult r = optimize(start, cfg);
  EXPECT_EQ(r.status, Status::Converged) << r.message;
  EXPECT_LT(r.trace.back().energy, r.trace.front().energy);
  EXPECT_GT(r.trace.back().energy, 60.0);
  cfg.max_iter = 10;
  expect_collision_free_path(start, cfg);
}

TEST(ImplicitEuler, DisplacementIsSecondOrderInTimeStep) {
  const Polygon p = centered(perturbed_circle(16, 0.1, 2));
  MetricKind l2;
  l2.type = MetricType::L2;
  const Mat g = assemble_gram(p, l2).dense();
  const Mat j = d_phi(p);
  const Vec u = SaddleFactorization::factorize(g, j).projected_gradient(d_energy(p)).u;
  std::vector<double> err;
  for (double dt : {1e-3, 5e-4, 2.5e-4, 1.25e-4}) {
    const ImplicitStep st = implicit_euler_displacement(p, g, j, dt, QuadratureRule::midpoint());
    EXPECT_LE((j * st.w).norm(), 1e-10 * st.w.norm());
    err.push_back((st.w + dt * u).norm());
  }
  for (std::size_t k = 1; k < err.size(); ++k) {
    EXPECT_GT(err[k - 1] / err[k], 3.0);
    EXPECT_LT(err[k - 1] / err[k], 5.0);
  }
}

TEST(ImplicitEuler, HugeTimeStepTerminates) {
  const Polygon p = centered(perturbed_circle(16, 0.1, 2));
  MetricKind l2;
  l2.type = MetricType::L2;
  const Mat g = assemble_gram(p, l2).dense();
  try {
    const ImplicitStep st = implicit_euler_displacement(p, g, d_phi(p), 1e6, QuadratureRule::midpoint());
    EXPECT_TRUE(st.w.allFinite());
    EXPECT_LE(st.newton_iters, 20);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NewtonInnerFailure);
  }
  EXPECT_KF_ERROR(implicit_euler_displacement(p, g, d_phi(p), 0.0, QuadratureRule::midpoint()),
                  ErrorKind::InvalidArgument);
}

TEST(ImplicitEuler, RunIsMonotoneAndFeasible) {
  OptimizerConfig cfg = config_for(Method::ImplicitEulerL2);
  cfg.max_iter = 25;
  const RunResult r = optimize(perturbed_circle(32, 0.05, 4), cfg);
  EXPECT_NE(r.status, Status::NumericalFailure) << r.message;
  EXPECT_NE(r.status, Status::LineSearchFailure) << r.message;
  ASSERT_GE(r.trace.size(), 2u);
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    EXPECT_LE(r.trace[k].energy, r.trace[k - 1].energy + 1e-13 * r.trace[k - 1].energy);
    EXPECT_LE(r.trace[k].phi_inf, 1e-8);
  }
  EXPECT_LT(r.trace.back().energy, r.trace.front().energy);
}

TEST(Penalty, ConstraintViolationSmallAndEnergyCloseToFeasible) {
  const Polygon start = coiled_unknot(96, 6, 0.5);
  OptimizerConfig pen = config_for(Method::LBFGS);
  pen.alpha = 1e3;
  pen.max_iter = 300;
  const RunResult a = optimize(start, pen);
  OptimizerConfig feas = config_for(Method::ProjGD);
  feas.max_iter = 300;
  const RunResult b = optimize(start, feas);
  EXPECT_LE(a.trace.back().phi_inf, 1e-2);
  EXPECT_LE(std::abs(a.trace.back().energy - b.trace.back().energy), 0.02 * b.trace.back().energy);
}

TEST(Penalty, AllPenaltyMethodsDescend) {
  const Polygon start = coiled_unknot(64, 3, 0.8);
  for (Method m : {Method::NCG, Method::LBFGS, Method::Nesterov}) {
    OptimizerConfig cfg = config_for(m);
    cfg.max_iter = 40;
    const RunResult r = optimize(start, cfg);
    EXPECT_NE(r.status, Status::NumericalFailure) << to_string(m) << ": " << r.message;
    EXPECT_LT(r.trace.back().energy, 0.5 * r.trace.front().energy) << to_string(m);
    for (std::size_t k = 1; k < r.trace.size(); ++k)
      EXPECT_LE(r.trace[k].energy, r.trace[k - 1].energy + 1e-12 * r.trace[k - 1].energy);
  }
}

TEST(Run, StoppingRules) {
  const Polygon start = coiled_unknot(64, 3, 0.8);
  OptimizerConfig cfg = config_for(Method::ProjGD);
  cfg.time_budget = 0.0;
  const RunResult timed = optimize(start, cfg);
  EXPECT_EQ(timed.status, Status::TimeBudget);
  EXPECT_EQ(timed.trace.size(), 1u);

  cfg = config_for(Method::ProjGD);
  cfg.max_iter = 3;
  const RunResult capped = optimize(start, cfg);
  EXPECT_EQ(capped.status, Status::MaxIterations);
  EXPECT_EQ(capped.trace.back().iter, 3);

  // A regular polygon is already stationary.
  const RunResult done = optimize(regular_ngon(24, 1.0), config_for(Method::ProjGD));
  EXPECT_EQ(done.status, Status::Converged);
  EXPECT_EQ(done.trace.size(), 1u);
}

TEST(Run, DeterministicTraces) {
  const Polygon start = coiled_unknot(64, 3, 0.8);
  for (Method m : {Method::ProjGD, Method::LBFGS, Method::TrustRegion}) {
    OptimizerConfig cfg = config_for(m);
    cfg.max_iter = 15;
    const RunResult a = optimize(start, cfg);
    const RunResult b = optimize(start, cfg);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
      EXPECT_EQ(a.trace[k].energy, b.trace[k].energy);
      EXPECT_EQ(a.trace[k].grad_norm, b.trace[k].grad_norm);
      EXPECT_EQ(a.trace[k].step_size, b.trace[k].step_size);
      EXPECT_EQ(a.trace[k].backtracks, b.trace[k].backtracks);
    }
    EXPECT_EQ(a.final, b.final);
  }
}
