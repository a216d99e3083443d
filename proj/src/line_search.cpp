#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "knotflow/collision.hpp"
#include "knotflow/energy.hpp"
#include "knotflow/error.hpp"
#include "knotflow/optimize.hpp"

namespace knotflow {

namespace {

// Energies are sums of O(N²) terms; comparisons tolerate that much roundoff.
double roundoff_allowance(double value) { return 1e-13 * std::max(1.0, std::abs(value)); }

}  // namespace

double Objective::value(const Polygon& p) const {
  double v = energy_value(p, quad);
  if (targets) v += alpha * stretch_penalty(p, *targets);
  return v;
}

Vec Objective::gradient(const Polygon& p) const {
  Vec g = d_energy(p, quad);
  if (targets) g += alpha * d_stretch_penalty(p, *targets);
  return g;
}

StepResult armijo_step(const Polygon& p, double value, const Vec& grad, const Vec& u,
                       const Objective& objective, const LineSearchSettings& settings) {
  const double slope = grad.dot(u);
  if (!(slope < 0.0))
    fail(ErrorKind::NotDescentDirection,
         "line search direction has slope " + std::to_string(slope));
  if (settings.saddle && !settings.targets)
    fail(ErrorKind::InvalidArgument, "restoration needs constraint targets");

  const double tau0 = initial_step(p, u, settings.tau_max);
  if (!(tau0 > 0.0)) fail(ErrorKind::LineSearchFailure, "no admissible initial step");
  const double allowance = roundoff_allowance(value);
  int backtracks = 0;
  for (double tau = tau0; tau >= 1e-14 * tau0; tau *= settings.backtrack_factor) {
    try {
      Polygon trial = p.displaced(u, tau);
      int newton = 0;
      if (settings.saddle) {
        RestoreResult restored =
            restore_feasibility(trial, *settings.targets, *settings.saddle, settings.restore);
        trial = std::move(restored.polygon);
        newton = restored.iterations;
      }
      const double f = objective.value(trial);
      if (std::isfinite(f) && f <= value + settings.armijo_c * tau * slope + allowance)
        return {std::move(trial), tau, f, backtracks, newton, {}};
    } catch (const Error&) {
      // restoration failure, contact or coincident points: shrink as well
    }
    ++backtracks;
  }
  fail(ErrorKind::LineSearchFailure,
       "Armijo backtracking failed after " + std::to_string(backtracks) + " trials");
}

StepResult wolfe_step(const Polygon& p, double value, const Vec& grad, const Vec& u,
                      const Objective& objective, double tau_init, double c1, double c2) {
  const double slope = grad.dot(u);
  if (!(slope < 0.0))
    fail(ErrorKind::NotDescentDirection,
         "line search direction has slope " + std::to_string(slope));
  constexpr double kExpansion = 64.0;
  const double cap = initial_step(p, u, kExpansion * tau_init);
  if (!(cap > 0.0)) fail(ErrorKind::LineSearchFailure, "no admissible initial step");
  const double allowance = roundoff_allowance(value);

  double lo = 0.0, hi = cap;
  bool bracketed = false;
  std::optional<StepResult> armijo_only;
  double tau = std::min(tau_init, cap);
  int evals = 0;
  constexpr int kMaxEvals = 60;
  for (; evals < kMaxEvals; ++evals) {
    bool sufficient = false;
    try {
      Polygon trial = p.displaced(u, tau);
      const double f = objective.value(trial);
      if (std::isfinite(f) && f <= value + c1 * tau * slope + allowance) {
        sufficient = true;
        Vec g = objective.gradient(trial);
        const double new_slope = g.dot(u);
        if (new_slope >= c2 * slope || tau >= cap)
          return {std::move(trial), tau, f, evals, 0, std::move(g)};
        armijo_only = StepResult{std::move(trial), tau, f, evals, 0, std::move(g)};
      }
    } catch (const Error&) {
    }
    if (sufficient) {
      lo = tau;
    } else {
      hi = tau;
      bracketed = true;
    }
    tau = bracketed ? 0.5 * (lo + hi) : std::min(2.0 * tau, cap);
    if (bracketed && hi - lo <= 1e-14 * hi) break;
  }
  if (armijo_only) {
    armijo_only->backtracks = evals;
    return std::move(*armijo_only);
  }
  fail(ErrorKind::LineSearchFailure,
       "Wolfe search failed after " + std::to_string(evals) + " evaluations");
}

double pr_plus_beta(const Vec& z, const Vec& g, const Vec& z_prev, const Vec& g_prev) {
  const double denom = z_prev.dot(g_prev);
  if (!(denom > 0.0)) return 0.0;
  return std::max(0.0, z.dot(g - g_prev) / denom);
}

Vec lbfgs_direction(const Vec& grad, const std::vector<Vec>& s, const std::vector<Vec>& y,
                    const std::function<Vec(const Vec&)>& initial) {
  const std::size_t k = s.size();
  std::vector<double> alpha(k), rho(k);
  Vec q = grad;
  for (std::size_t i = k; i-- > 0;) {
    rho[i] = 1.0 / y[i].dot(s[i]);
    alpha[i] = rho[i] * s[i].dot(q);
    q -= alpha[i] * y[i];
  }
  Vec r = initial(q);
  for (std::size_t i = 0; i < k; ++i) {
    const double beta = rho[i] * y[i].dot(r);
    r += (alpha[i] - beta) * s[i];
  }
  return r;
}

}  // namespace knotflow
