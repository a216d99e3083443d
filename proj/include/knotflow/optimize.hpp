#pragma once

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "knotflow/constraint.hpp"
#include "knotflow/curve.hpp"
#include "knotflow/metric.hpp"
#include "knotflow/quadrature.hpp"
#include "knotflow/saddle.hpp"

namespace knotflow {

enum class Method { ProjGD, ImplicitEulerL2, NCG, LBFGS, Nesterov, TrustRegion };
std::string_view to_string(Method method);
Method parse_method(std::string_view name);

/// Feasible methods keep Φ = 0 by projection and restoration; penalty
/// methods minimise E + α·stretch_penalty instead. Auto picks penalty for
/// NCG, L-BFGS and Nesterov and feasible for the rest.
enum class Mode { Auto, Feasible, Penalty };
std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view name);

struct OptimizerConfig {
  Method method = Method::ProjGD;
  MetricKind metric{};
  Mode mode = Mode::Auto;
  double alpha = 1e3;

  int max_iter = 1000;
  double grad_tol = 1e-4;      // relative to the initial gradient norm
  double abs_grad_tol = 1e-9;  // absolute floor for already-stationary input
  double target_energy = -std::numeric_limits<double>::infinity();
  double time_budget = std::numeric_limits<double>::infinity();  // seconds

  double armijo_c = 0.5;
  double backtrack_factor = 0.5;
  /// Largest vertex displacement of a single step, as a fraction of L0.
  double max_displacement = 0.25;
  /// Line searches start from at most step_growth times the last accepted
  /// step (then the collision bound and max_displacement apply).
  double step_growth = 4.0;

  int lbfgs_history = 30;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;

  double tr_radius = 0.1;
  double tr_expand = 2.0;
  double tr_shrink = 0.25;
  double tr_accept_high = 0.75;
  double tr_accept_low = 0.25;
  double tr_newton_gate = 1e-2;  // relative to the initial gradient norm

  RestoreOptions restore{};
  QuadratureRule quad = QuadratureRule::midpoint();

  /// Called with (iteration, polygon) for every trace row.
  std::function<void(int, const Polygon&)> on_iterate;

  Mode resolved_mode() const;
  void validate() const;
};

struct TraceRecord {
  int iter = 0;
  double time_s = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double step_size = 0.0;
  double phi_inf = 0.0;
  int backtracks = 0;
  int newton_iters = 0;
};

enum class Status {
  Converged,
  MaxIterations,
  TargetReached,
  TimeBudget,
  LineSearchFailure,
  NumericalFailure
};
std::string_view to_string(Status status);

struct RunResult {
  Polygon final;
  std::vector<TraceRecord> trace;
  Status status = Status::MaxIterations;
  std::string message;
};

RunResult optimize(const Polygon& start, const OptimizerConfig& config);

RunResult run_projected_gd(const Polygon& start, OptimizerConfig config);
RunResult run_implicit_euler_l2(const Polygon& start, OptimizerConfig config);
RunResult run_ncg_pr_plus(const Polygon& start, OptimizerConfig config);
RunResult run_lbfgs(const Polygon& start, OptimizerConfig config);
RunResult run_nesterov(const Polygon& start, OptimizerConfig config);
RunResult run_trust_region(const Polygon& start, OptimizerConfig config);

// ---------------------------------------------------------------------------
// Building blocks, exposed for testing.

/// Objective E (feasible) or E + α·stretch (penalty) with its gradient.
struct Objective {
  QuadratureRule quad = QuadratureRule::midpoint();
  const ConstraintTargets* targets = nullptr;  // penalty term when non-null
  double alpha = 0.0;

  double value(const Polygon& p) const;
  Vec gradient(const Polygon& p) const;
};

struct LineSearchSettings {
  double armijo_c = 0.5;
  double backtrack_factor = 0.5;
  double tau_max = 1.0;
  /// Feasible mode: restore onto Φ = 0 with the base-point factorization.
  const SaddleFactorization* saddle = nullptr;
  const ConstraintTargets* targets = nullptr;
  RestoreOptions restore{};
};

struct StepResult {
  Polygon polygon;
  double tau = 0.0;
  double value = 0.0;
  int backtracks = 0;
  int newton_iters = 0;
  Vec gradient;  // filled by wolfe_step only
};

/// Backtracking from initial_step(P, u, tau_max) until
/// f(Q) ≤ f(P) + c·τ·∇f·u, Q = restore(P + τu) in feasible mode. Any
/// failure of a trial (restoration, embedding) shrinks τ as well.
/// Throws NotDescentDirection if ∇f·u ≥ 0 and LineSearchFailure once τ
/// drops below 1e-14 of the first trial.
StepResult armijo_step(const Polygon& p, double value, const Vec& grad, const Vec& u,
                       const Objective& objective, const LineSearchSettings& settings);

/// Weak Wolfe-Powell search capped at 2/3 of the first collision time along u.
StepResult wolfe_step(const Polygon& p, double value, const Vec& grad, const Vec& u,
                      const Objective& objective, double tau_init, double c1, double c2);

/// Polak-Ribière coefficient clamped at zero, for preconditioned gradients
/// z = G⁻¹g.
double pr_plus_beta(const Vec& z, const Vec& g, const Vec& z_prev, const Vec& g_prev);

/// L-BFGS two-loop recursion with H0 applied by `initial`.
Vec lbfgs_direction(const Vec& grad, const std::vector<Vec>& s, const std::vector<Vec>& y,
                    const std::function<Vec(const Vec&)>& initial);

/// Displacement w of one backward Euler step of length dt for the L2 flow,
/// linearised constraints J(P)w = 0: G w / dt + DE(P + w) + Jᵀμ = 0, solved
/// by Newton with d2_energy. Throws NewtonInnerFailure when Newton stalls.
struct ImplicitStep {
  Vec w;
  int newton_iters = 0;
};
ImplicitStep implicit_euler_displacement(const Polygon& p, const Mat& gram, const Mat& jacobian,
                                         double dt, const QuadratureRule& quad,
                                         int max_newton = 20);

/// Ratio-based radius update: shrink below tr_accept_low, expand above
/// tr_accept_high when the step reached the boundary.
double update_trust_radius(double radius, double ratio, bool on_boundary,
                           const OptimizerConfig& config);

/// Minimiser of gᵀc + ½cᵀHc subject to |c| ≤ radius (small dense problem).
Vec solve_trust_region_subproblem(const Vec& g, const Mat& h, double radius);

}  // namespace knotflow
