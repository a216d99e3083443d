#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace knotflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Relative distance (in units of total length) below which two curve
/// points or two non-adjacent edges count as touching.
inline constexpr double kContactRelTol = 1e-12;

/// Edge I joins vertex I to vertex (I+1) mod N.
struct EdgeFrame {
  int index = 0;
  Vec tail;  // P(I↓)
  Vec head;  // P(I↑)
  double length = 0.0;
  Vec tangent;
};

/// Prefix sums of edge lengths; prefix[I] is the arc coordinate of vertex I.
struct ArcTable {
  std::vector<double> prefix;  // size N + 1, prefix[N] == total
  double total = 0.0;

  double coordinate(int edge, double t, double edge_length) const {
    return prefix[edge] + t * edge_length;
  }
};

struct QuadPoint {
  int edge = 0;
  double t = 0.0;
  Vec position;
  double arc = 0.0;
};

/// Closed polygon with N vertices in R^m. Stored column-wise (m x N), so the
/// flat column-major buffer is the vertex-major layout used by every
/// gradient, Gram matrix and Jacobian in the library.
class Polygon {
 public:
  /// Validated construction: N >= 4, m >= 2, positive edges, embedded.
  explicit Polygon(Mat columns);

  /// Rows are points (N x m).
  static Polygon from_rows(const Mat& rows);
  static Polygon from_flat(const Vec& flat, int dim);

  /// Skips the O(N^2) self-intersection test. Used for intermediate trial
  /// points whose embeddedness the caller audits separately.
  static Polygon unchecked(Mat columns);

  int size() const { return static_cast<int>(pts_.cols()); }
  int dim() const { return static_cast<int>(pts_.rows()); }
  int dofs() const { return static_cast<int>(pts_.size()); }

  const Mat& vertices() const { return pts_; }
  Eigen::Map<const Vec> flat() const { return {pts_.data(), pts_.size()}; }
  auto vertex(int i) const { return pts_.col(wrap(i)); }

  int wrap(int i) const {
    const int n = size();
    return ((i % n) + n) % n;
  }

  double edge_length(int edge) const { return lengths_[wrap(edge)]; }
  const Vec& edge_lengths() const { return lengths_; }
  EdgeFrame edge(int edge) const;

  const ArcTable& arcs() const { return arcs_; }
  double length() const { return arcs_.total; }

  QuadPoint quad_point(int edge, double t) const;

  /// True when edges I and J have disjoint closures.
  bool disjoint(int a, int b) const;

  /// P + tau * u, validated.
  Polygon displaced(const Vec& u, double tau) const;

  /// Vertex-wise rigid motion / scaling, x -> R x + v.
  Polygon transformed(const Mat& linear, const Vec& shift) const;

  bool operator==(const Polygon& other) const { return pts_ == other.pts_; }

 private:
  struct Unchecked {};
  Polygon(Mat columns, Unchecked);
  void build_tables();

  Mat pts_;
  Vec lengths_;
  ArcTable arcs_;
};

double geodesic_distance(const Polygon& p, const QuadPoint& a,
                         const QuadPoint& b);

Polygon regular_ngon(int n, double radius, int dim = 3);

Polygon torus_knot(int p, int q, int n, double major_radius,
                   double minor_radius);

/// Unknot: a helix of `windings` turns (pitch = aspect * coil radius) closed
/// by a return arc that stays outside the coil. Resampled to near-uniform
/// edge lengths.
Polygon coiled_unknot(int n, int windings, double aspect);

/// Planar circle with a smooth radial perturbation r(θ) = R (1 + δ(θ)),
/// δ a random combination of modes 2..max_mode normalised to
/// max |δ| = amplitude. The continuous shape depends only on the seed, so
/// different n sample the same curve.
Polygon perturbed_circle(int n, double amplitude, std::uint64_t seed,
                         int max_mode = 5, int dim = 3);

/// Resample a closed curve given by densely sampled points (m x K) into n
/// vertices equally spaced in arc length.
Mat resample_closed(const Mat& dense, int n);

}  // namespace knotflow
