#pragma once

#include "knotflow/curve.hpp"
#include "knotflow/saddle.hpp"

namespace knotflow {

struct ConstraintTargets {
  Vec lengths;  // ℓ0 per edge, all positive

  double total() const { return lengths.sum(); }

  static ConstraintTargets from_polygon(const Polygon& p);
  static ConstraintTargets uniform(int edges, double total_length);
  void validate(int edges) const;
};

/// Φ(P) = (log ℓ_P(I) - log ℓ0(I) per edge, Σ_I ½ ℓ_P(I) (P(I↑) + P(I↓))).
struct ConstraintState {
  Vec log_residual;
  Vec barycenter;

  Vec stacked() const;
  /// max(‖log residual‖∞, |b| / L0): logs are dimensionless, the barycenter
  /// is scaled by the target length.
  double inf_norm(double target_length) const;
  bool feasible(double tol, double target_length) const {
    return inf_norm(target_length) <= tol;
  }
};

ConstraintState phi(const Polygon& p, const ConstraintTargets& targets);

/// (N + m) x (N*m) Jacobian of phi.
Mat d_phi(const Polygon& p);

/// Rows of d_phi belonging to the log-length constraints (N x N*m).
Mat d_log_lengths(const Polygon& p);

/// Translate so the length-weighted barycenter sits at the origin.
Polygon centered(const Polygon& p);

struct RestoreOptions {
  double tol = 1e-8;
  int max_iter = 5;
};

struct RestoreResult {
  Polygon polygon;
  int iterations = 0;
  double residual = 0.0;
};

/// Modified Newton Q ← Q - J(P)^† Φ(Q), the pseudoinverse taken from the
/// saddle factorization built at the step's base point P. Throws
/// NonConvergence if the residual is not below tol after max_iter
/// corrections or grows between iterations, SelfIntersection if the result
/// is not embedded.
RestoreResult restore_feasibility(const Polygon& trial, const ConstraintTargets& targets,
                                  const SaddleFactorization& saddle,
                                  const RestoreOptions& options = {});

/// Hencky-type stretch penalty Σ_I (ℓ0(I)/L0) log(ℓ_P(I)/ℓ0(I))², and its
/// gradient.
double stretch_penalty(const Polygon& p, const ConstraintTargets& targets);
Vec d_stretch_penalty(const Polygon& p, const ConstraintTargets& targets);

}  // namespace knotflow
