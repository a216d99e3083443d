#pragma once

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <gtest/gtest.h>

#include "knotflow/curve.hpp"
#include "knotflow/error.hpp"

namespace knotflow {
inline void PrintTo(ErrorKind kind, std::ostream* os) { *os << to_string(kind); }
}  // namespace knotflow

namespace knotflow::test {

#define EXPECT_KF_ERROR(stmt, expected_kind)                        \
  EXPECT_THROW(                                                     \
      {                                                             \
        try {                                                       \
          stmt;                                                     \
        } catch (const ::knotflow::Error& kf_err_) {                \
          EXPECT_EQ(kf_err_.kind(), expected_kind) << kf_err_.what(); \
          throw;                                                    \
        }                                                           \
      },                                                            \
      ::knotflow::Error)

// Jittered circle: every coordinate moves by at most a quarter of the mean
// edge length, which keeps the loop embedded.
inline Polygon random_polygon(int n, std::uint64_t seed, int dim = 3, double radius = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  const double h = 2.0 * std::numbers::pi * radius / n;
  Mat pts = Mat::Zero(dim, n);
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / n;
    pts(0, i) = radius * std::cos(theta);
    pts(1, i) = radius * std::sin(theta);
    for (int d = 0; d < dim; ++d) pts(d, i) += h * jitter(rng);
  }
  return Polygon(std::move(pts));
}

inline Vec random_vector(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vec v(size);
  for (int i = 0; i < size; ++i) v[i] = normal(rng);
  return v;
}

// Haar-ish rotation (det +1) from the QR factor of a Gaussian matrix.
inline Mat random_rotation(int dim, std::uint64_t seed) {
  const Vec g = random_vector(dim * dim, seed);
  const Mat a = Eigen::Map<const Mat>(g.data(), dim, dim);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

// Brute force sampled distance between two segments; an upper bound on the
// true distance that converges as `samples` grows.
inline double sampled_segment_distance(const Vec& a0, const Vec& a1, const Vec& b0,
                                       const Vec& b1, int samples) {
  double best = INFINITY;
  for (int i = 0; i <= samples; ++i) {
    const Vec a = a0 + (a1 - a0) * (double(i) / samples);
    for (int j = 0; j <= samples; ++j) {
      const Vec b = b0 + (b1 - b0) * (double(j) / samples);
      best = std::min(best, (a - b).norm());
    }
  }
  return best;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace knotflow::test
