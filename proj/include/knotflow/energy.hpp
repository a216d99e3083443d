#pragma once

#include "knotflow/curve.hpp"
#include "knotflow/quadrature.hpp"

namespace knotflow {

/// Tangent-point style integrand whose double integral over the curve equals
/// the Möbius energy minus 4:
///
///   F = |τ_I - τ_J|² / (2|Δγ|²) + 2<τ_I,τ_J>/|Δγ|²
///       - 2 <Δγ,τ_I><Δγ,τ_J> / |Δγ|⁴,     Δγ = γ_I(s) - γ_J(t).
///
/// It vanishes identically on round circles and never references the
/// intrinsic distance, so its derivatives stay local to the four vertices of
/// an edge pair. Throws CoincidentPoints when the two points (nearly)
/// coincide relative to the edge lengths.
double in_integrand(const Vec& tail_i, const Vec& head_i, const Vec& tail_j,
                    const Vec& head_j, double s, double t);

/// W_IJ = ℓ_I ℓ_J Σ_ij F(t_i, t_j) ω_i ω_j for a pair with disjoint closures.
double local_contribution(const Polygon& p, int edge_i, int edge_j,
                          const QuadratureRule& quad);

struct EnergyValue {
  double value = 0.0;
  Mat pair_table;  // N x N table of W_IJ (both orders); empty unless requested
};

/// Discrete energy 4 + Σ_{ordered disjoint pairs} W_IJ.
EnergyValue energy(const Polygon& p,
                   const QuadratureRule& quad = QuadratureRule::midpoint(),
                   bool keep_pairs = false);

double energy_value(const Polygon& p,
                    const QuadratureRule& quad = QuadratureRule::midpoint());

/// 1/|γ(a) - γ(b)|² - 1/ρ(a,b)², ρ the polygon's own arc distance.
double energy_density(const Polygon& p, const QuadPoint& a, const QuadPoint& b);

enum class KsVariant { Vertex, Edge };

/// One-point discretisations of the density above, evaluated at edge tails
/// (vertex energy) or midpoints (edge energy).
double ks_energy(const Polygon& p, KsVariant variant);

/// Gradient of energy(), vertex-major flat layout (N*m).
Vec d_energy(const Polygon& p,
             const QuadratureRule& quad = QuadratureRule::midpoint());

/// Dense symmetric Hessian of energy(), (N*m) x (N*m).
Mat d2_energy(const Polygon& p,
              const QuadratureRule& quad = QuadratureRule::midpoint());

}  // namespace knotflow
