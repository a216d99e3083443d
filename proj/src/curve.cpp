#include "knotflow/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "knotflow/collision.hpp"
#include "knotflow/error.hpp"

namespace knotflow {

namespace {

constexpr double kPi = std::numbers::pi;

void check_shape(const Mat& columns) {
  if (columns.rows() < 2)
    fail(ErrorKind::InvalidArgument, "polygon dimension must be at least 2");
  if (columns.cols() < 4)
    fail(ErrorKind::TooFewVertices,
         "polygon needs at least 4 vertices, got " +
             std::to_string(columns.cols()));
  if (!columns.allFinite())
    fail(ErrorKind::InvalidArgument, "polygon has non-finite coordinates");
}

}  // namespace

Polygon::Polygon(Mat columns) : pts_(std::move(columns)) {
  check_shape(pts_);
  build_tables();
  const ProximityReport report = proximity(pts_);
  if (report.min_distance <= kContactRelTol * arcs_.total)
    fail(ErrorKind::SelfIntersection,
         "edges " + std::to_string(report.edge_a) + " and " +
             std::to_string(report.edge_b) + " intersect");
}

Polygon::Polygon(Mat columns, Unchecked) : pts_(std::move(columns)) {
  check_shape(pts_);
  build_tables();
}

Polygon Polygon::from_rows(const Mat& rows) { return Polygon(rows.transpose()); }

Polygon Polygon::from_flat(const Vec& flat, int dim) {
  if (dim < 1 || flat.size() % dim != 0)
    fail(ErrorKind::DimensionMismatch, "flat vector length not a multiple of dim");
  return Polygon(Eigen::Map<const Mat>(flat.data(), dim, flat.size() / dim));
}

Polygon Polygon::unchecked(Mat columns) {
  return Polygon(std::move(columns), Unchecked{});
}

void Polygon::build_tables() {
  const int n = size();
  lengths_.resize(n);
  arcs_.prefix.assign(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    lengths_[i] = (pts_.col((i + 1) % n) - pts_.col(i)).norm();
    arcs_.prefix[i + 1] = arcs_.prefix[i] + lengths_[i];
  }
  arcs_.total = arcs_.prefix[n];
  const double tiny = kContactRelTol * arcs_.total;
  for (int i = 0; i < n; ++i) {
    if (!(lengths_[i] > tiny))
      fail(ErrorKind::DegenerateEdge,
           "edge " + std::to_string(i) + " has zero length");
  }
}

EdgeFrame Polygon::edge(int e) const {
  const int i = wrap(e);
  EdgeFrame f;
  f.index = i;
  f.tail = pts_.col(i);
  f.head = pts_.col(wrap(i + 1));
  f.length = lengths_[i];
  f.tangent = (f.head - f.tail) / f.length;
  return f;
}

QuadPoint Polygon::quad_point(int e, double t) const {
  const int i = wrap(e);
  QuadPoint q;
  q.edge = i;
  q.t = t;
  q.position = (1.0 - t) * pts_.col(i) + t * pts_.col(wrap(i + 1));
  q.arc = arcs_.coordinate(i, t, lengths_[i]);
  return q;
}

bool Polygon::disjoint(int a, int b) const {
  const int i = wrap(a), j = wrap(b);
  if (i == j) return false;
  const int n = size();
  return (i + 1) % n != j && (j + 1) % n != i;
}

Polygon Polygon::displaced(const Vec& u, double tau) const {
  if (u.size() != dofs())
    fail(ErrorKind::DimensionMismatch, "displacement size mismatch");
  Mat moved = pts_ + tau * Eigen::Map<const Mat>(u.data(), dim(), size());
  return Polygon(std::move(moved));
}

Polygon Polygon::transformed(const Mat& linear, const Vec& shift) const {
  Mat moved = linear * pts_;
  moved.colwise() += shift;
  return Polygon(std::move(moved));
}

double geodesic_distance(const Polygon& p, const QuadPoint& a,
                         const QuadPoint& b) {
  const double d = std::abs(a.arc - b.arc);
  return std::min(d, p.length() - d);
}

Polygon regular_ngon(int n, double radius, int dim) {
  if (n < 4)
    fail(ErrorKind::TooFewVertices, "regular polygon needs at least 4 vertices");
  if (dim < 2) fail(ErrorKind::InvalidArgument, "dimension must be at least 2");
  Mat pts = Mat::Zero(dim, n);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * i / n;
    pts(0, i) = radius * std::cos(a);
    pts(1, i) = radius * std::sin(a);
  }
  return Polygon(std::move(pts));
}

Polygon torus_knot(int p, int q, int n, double major_radius,
                   double minor_radius) {
  if (std::gcd(p, q) != 1)
    fail(ErrorKind::InvalidArgument, "torus knot needs gcd(p, q) = 1");
  if (n < 4)
    fail(ErrorKind::TooFewVertices, "torus knot needs at least 4 vertices");
  Mat pts(3, n);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * i / n;
    const double r = major_radius + minor_radius * std::cos(q * t);
    pts(0, i) = r * std::cos(p * t);
    pts(1, i) = r * std::sin(p * t);
    pts(2, i) = minor_radius * std::sin(q * t);
  }
  return Polygon(std::move(pts));
}

namespace {

// Periodic Gaussian filter over a closed polyline sampled uniformly in arc
// length; sigma is measured in arc length.
Mat smooth_closed(const Mat& pts, double sigma) {
  const int k = static_cast<int>(pts.cols());
  double total = 0.0;
  for (int i = 0; i < k; ++i) total += (pts.col((i + 1) % k) - pts.col(i)).norm();
  const double h = total / k;
  const int half = static_cast<int>(std::ceil(3.0 * sigma / h));
  if (half < 1) return pts;
  std::vector<double> w(2 * half + 1);
  double sum = 0.0;
  for (int j = -half; j <= half; ++j) {
    w[j + half] = std::exp(-0.5 * (j * h / sigma) * (j * h / sigma));
    sum += w[j + half];
  }
  Mat out = Mat::Zero(pts.rows(), k);
  for (int i = 0; i < k; ++i)
    for (int j = -half; j <= half; ++j)
      out.col(i) += (w[j + half] / sum) * pts.col(((i + j) % k + k) % k);
  return out;
}

}  // namespace

Polygon coiled_unknot(int n, int windings, double aspect) {
  if (windings < 1)
    fail(ErrorKind::InvalidArgument, "coiled unknot needs at least one winding");
  if (n < 8 * windings)
    fail(ErrorKind::TooFewVertices,
         "coiled unknot needs at least 8 vertices per winding");
  if (!(aspect > 0.0))
    fail(ErrorKind::DegenerateEdge, "coiled unknot with zero pitch collapses");
  const double radius = 1.0;
  const double pitch = aspect * radius;
  constexpr double kReturnTurns = 0.25;
  const double height = pitch * (windings - kReturnTurns);
  const double bulge = std::min(0.5 * radius, 0.75 * pitch);
  auto smoothstep = [](double x) {
    x = std::clamp(x, 0.0, 1.0);
    return x * x * (3.0 - 2.0 * x);
  };

  // Over the full angle 2*pi*windings the curve rises along a helix; in the
  // last quarter turn it steps outward, drops back to z = 0 outside the
  // coils and steps in again to close up.
  const int dense = 64 * n;
  const double rise_end = 1.0 - kReturnTurns / windings;
  Mat pts(3, dense);
  for (int k = 0; k < dense; ++k) {
    const double u = static_cast<double>(k) / dense;
    const double a = 2.0 * kPi * windings * u;
    double rho = radius, z = height * u / rise_end;
    if (u >= rise_end) {
      const double v = (u - rise_end) / (1.0 - rise_end);
      rho += bulge * smoothstep(3.0 * v) * smoothstep(3.0 - 3.0 * v);
      z = height * (1.0 - smoothstep(3.0 * v - 1.0));
    }
    pts.col(k) << rho * std::cos(a), rho * std::sin(a), z;
  }
  const double sigma = 0.1 * std::min(radius, pitch);
  const Mat uniform = resample_closed(pts, dense);
  return Polygon(resample_closed(smooth_closed(uniform, sigma), n));
}

Polygon perturbed_circle(int n, double amplitude, std::uint64_t seed,
                         int max_mode, int dim) {
  if (n < 4)
    fail(ErrorKind::TooFewVertices, "perturbed circle needs at least 4 vertices");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::vector<double> amp, ph;
  for (int k = 2; k <= max_mode; ++k) {
    amp.push_back(coeff(rng));
    ph.push_back(phase(rng));
  }
  auto delta = [&](double theta) {
    double d = 0.0;
    for (std::size_t k = 0; k < amp.size(); ++k)
      d += amp[k] * std::cos((k + 2) * theta + ph[k]);
    return d;
  };
  // Normalise on a fixed fine grid so the shape is independent of n.
  double peak = 0.0;
  for (int i = 0; i < 4096; ++i)
    peak = std::max(peak, std::abs(delta(2.0 * kPi * i / 4096)));
  const double scale = peak > 0.0 ? amplitude / peak : 0.0;

  Mat pts = Mat::Zero(dim, n);
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * kPi * i / n;
    const double r = 1.0 + scale * delta(theta);
    pts(0, i) = r * std::cos(theta);
    pts(1, i) = r * std::sin(theta);
  }
  return Polygon(std::move(pts));
}

Mat resample_closed(const Mat& dense, int n) {
  const int k = static_cast<int>(dense.cols());
  std::vector<double> cum(k + 1, 0.0);
  for (int i = 0; i < k; ++i)
    cum[i + 1] = cum[i] + (dense.col((i + 1) % k) - dense.col(i)).norm();
  const double total = cum[k];
  Mat out(dense.rows(), n);
  int seg = 0;
  for (int j = 0; j < n; ++j) {
    const double s = total * j / n;
    while (seg < k - 1 && cum[seg + 1] <= s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0.0 ? (s - cum[seg]) / len : 0.0;
    out.col(j) = (1.0 - t) * dense.col(seg) + t * dense.col((seg + 1) % k);
  }
  return out;
}

}  // namespace knotflow
