#include "knotflow/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "knotflow/error.hpp"

namespace knotflow {

namespace {

// Closest points between two segments (Ericson, Real-Time Collision
// Detection, 5.1.9) in arbitrary dimension on raw column pointers.
double seg_dist(const double* a0, const double* a1, const double* b0,
                const double* b1, int m) {
  double aa = 0, ee = 0, bb = 0, cc = 0, ff = 0;
  for (int k = 0; k < m; ++k) {
    const double d1 = a1[k] - a0[k];
    const double d2 = b1[k] - b0[k];
    const double r = a0[k] - b0[k];
    aa += d1 * d1;
    ee += d2 * d2;
    bb += d1 * d2;
    cc += d1 * r;
    ff += d2 * r;
  }
  constexpr double tiny = std::numeric_limits<double>::min();
  double s = 0.0, t = 0.0;
  if (aa <= tiny && ee <= tiny) {
    s = t = 0.0;
  } else if (aa <= tiny) {
    t = std::clamp(ff / ee, 0.0, 1.0);
  } else if (ee <= tiny) {
    s = std::clamp(-cc / aa, 0.0, 1.0);
  } else {
    const double denom = aa * ee - bb * bb;
    s = denom > 0.0 ? std::clamp((bb * ff - cc * ee) / denom, 0.0, 1.0) : 0.0;
    t = (bb * s + ff) / ee;
    if (t < 0.0) {
      t = 0.0;
      s = std::clamp(-cc / aa, 0.0, 1.0);
    } else if (t > 1.0) {
      t = 1.0;
      s = std::clamp((bb - cc) / aa, 0.0, 1.0);
    }
  }
  double d2 = 0.0;
  for (int k = 0; k < m; ++k) {
    const double diff = (a0[k] + s * (a1[k] - a0[k])) - (b0[k] + t * (b1[k] - b0[k]));
    d2 += diff * diff;
  }
  return std::sqrt(d2);
}

struct PairInfo {
  int a, b;
  double speed;  // bound on relative speed of any two points of the pair
};

double pair_dist(const Mat& x, int n, int a, int b) {
  const int m = static_cast<int>(x.rows());
  return seg_dist(x.col(a).data(), x.col((a + 1) % n).data(), x.col(b).data(),
                  x.col((b + 1) % n).data(), m);
}

double min_distance(const Mat& x, const std::vector<PairInfo>& pairs) {
  const int n = static_cast<int>(x.cols());
  double best = std::numeric_limits<double>::infinity();
  for (const PairInfo& pr : pairs) best = std::min(best, pair_dist(x, n, pr.a, pr.b));
  return best;
}

}  // namespace

double segment_distance(const Vec& a0, const Vec& a1, const Vec& b0,
                        const Vec& b1) {
  const auto m = a0.size();
  if (a1.size() != m || b0.size() != m || b1.size() != m)
    fail(ErrorKind::DimensionMismatch, "segment endpoints differ in dimension");
  return seg_dist(a0.data(), a1.data(), b0.data(), b1.data(), static_cast<int>(m));
}

ProximityReport proximity(const Mat& x) {
  const int n = static_cast<int>(x.cols());
  ProximityReport report;
  report.min_distance = std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) {
    for (int b = a + 2; b < n; ++b) {
      if (a == 0 && b == n - 1) continue;
      const double d = pair_dist(x, n, a, b);
      if (d < report.min_distance) {
        report.min_distance = d;
        report.edge_a = a;
        report.edge_b = b;
      }
    }
  }
  return report;
}

ProximityReport proximity(const Polygon& p) { return proximity(p.vertices()); }

double pair_distance(const Polygon& p, int a, int b) {
  if (!p.disjoint(a, b))
    fail(ErrorKind::AdjacentEdges, "pair distance needs non-adjacent edges");
  return pair_dist(p.vertices(), p.size(), p.wrap(a), p.wrap(b));
}

CollisionBound collision_bound(const Polygon& p, const Vec& u, double tau_max) {
  const int n = p.size();
  const int m = p.dim();
  if (u.size() != p.dofs())
    fail(ErrorKind::DimensionMismatch, "displacement size mismatch");
  const double eps = kCollisionRelTol * p.length();
  const Mat& x0 = p.vertices();
  if (proximity(x0).min_distance <= eps)
    fail(ErrorKind::AlreadyColliding, "polygon is already in contact");
  if (!(tau_max > 0.0)) return {tau_max, false};

  const Eigen::Map<const Mat> vel(u.data(), m, n);
  std::vector<PairInfo> active;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 2; b < n; ++b) {
      if (a == 0 && b == n - 1) continue;
      const int ends_a[2] = {a, (a + 1) % n};
      const int ends_b[2] = {b, (b + 1) % n};
      double speed = 0.0;
      for (int ia : ends_a)
        for (int ib : ends_b) speed = std::max(speed, (vel.col(ia) - vel.col(ib)).norm());
      if (speed > 0.0) active.push_back({a, b, speed});
    }
  }

  double tau = 0.0;
  Mat x = x0;
  constexpr int kMaxRounds = 100000;
  for (int round = 0; round < kMaxRounds && !active.empty(); ++round) {
    double step = std::numeric_limits<double>::infinity();
    std::size_t kept = 0;
    for (std::size_t k = 0; k < active.size(); ++k) {
      const PairInfo pr = active[k];
      const double d = pair_dist(x, n, pr.a, pr.b);
      if (d <= eps) return {tau, true};
      // pair cannot reach contact before tau_max
      if (d - pr.speed * (tau_max - tau) > eps) continue;
      step = std::min(step, (d - eps) / pr.speed);
      active[kept++] = pr;
    }
    active.resize(kept);
    if (active.empty()) break;
    if (tau + step >= tau_max) {
      x = x0 + tau_max * vel;
      if (min_distance(x, active) <= eps) return {tau_max, true};
      return {tau_max, false};
    }
    if (step <= 1e-15 * tau_max) return {tau, true};
    tau += step;
    x = x0 + tau * vel;
  }
  return {tau_max, false};
}

double first_collision_step(const Polygon& p, const Vec& u, double tau_max) {
  return collision_bound(p, u, tau_max).tau;
}

double initial_step(const CollisionBound& bound, double tau_max) {
  if (!bound.contact) return tau_max;
  return std::min(tau_max, 2.0 / 3.0 * bound.tau);
}

double initial_step(const Polygon& p, const Vec& u, double tau_max) {
  return initial_step(collision_bound(p, u, tau_max), tau_max);
}

}  // namespace knotflow
