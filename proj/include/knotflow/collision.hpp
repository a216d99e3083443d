#pragma once

#include "knotflow/curve.hpp"

namespace knotflow {

/// Euclidean distance between the closed segments [a0,a1] and [b0,b1].
double segment_distance(const Vec& a0, const Vec& a1, const Vec& b0,
                        const Vec& b1);

struct ProximityReport {
  double min_distance = 0.0;
  int edge_a = -1;
  int edge_b = -1;
};

/// Minimum distance over all pairs of non-adjacent edges of a vertex loop
/// (m x N columns). Works on raw vertices so polygon validation can use it.
ProximityReport proximity(const Mat& columns);
ProximityReport proximity(const Polygon& p);

double pair_distance(const Polygon& p, int a, int b);

/// Relative contact distance used by continuous collision detection.
inline constexpr double kCollisionRelTol = 1e-9;

/// Conservative lower bound τ* on the first time P + τu self-intersects.
/// Every τ < τ* is certified collision-free; returns tau_max when no contact
/// happens before it. Throws AlreadyColliding if P itself is in contact.
double first_collision_step(const Polygon& p, const Vec& u, double tau_max);

struct CollisionBound {
  double tau = 0.0;
  bool contact = false;  // false: no contact up to and including tau_max
};

CollisionBound collision_bound(const Polygon& p, const Vec& u, double tau_max);

/// Line-search seed from a collision bound: 2/3 τ* when a contact was found
/// (capped at tau_max), tau_max otherwise.
double initial_step(const CollisionBound& bound, double tau_max);
double initial_step(const Polygon& p, const Vec& u, double tau_max);

}  // namespace knotflow
