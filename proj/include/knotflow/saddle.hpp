#pragma once

#include "knotflow/curve.hpp"
#include "knotflow/metric.hpp"

namespace knotflow {

struct ProjectedGradient {
  Vec u;       // G-orthogonal projection of the Riesz gradient onto ker(J)
  Vec lambda;  // Lagrange multipliers
};

/// Pivoted dense LU of the symmetric indefinite KKT matrix
///
///   [ G  Jᵀ ]
///   [ J  0  ]
///
/// with iterative refinement so every solve meets a relative residual of
/// kSolveTolerance. Immutable once built; solves are const.
class SaddleFactorization {
 public:
  static constexpr double kSolveTolerance = 1e-10;

  static SaddleFactorization factorize(const GramOperator& gram, const Mat& jacobian);
  static SaddleFactorization factorize(const Mat& gram, const Mat& jacobian);

  int primal_size() const { return n_; }
  int constraint_size() const { return c_; }

  struct Solution {
    Vec primal;
    Vec dual;
    double relative_residual = 0.0;
  };
  Solution solve(const Vec& top, const Vec& bottom) const;

  /// rhs (η, 0): G u + Jᵀλ = η, J u = 0.
  ProjectedGradient projected_gradient(const Vec& eta) const;
  /// rhs (0, ξ): J u = ξ with u G-orthogonal to ker(J).
  Vec pseudoinverse_apply(const Vec& xi) const;
  /// rhs (G ũ, 0): G-orthogonal projection of ũ onto ker(J).
  Vec project_tangent(const Vec& u) const;

  Vec gram_apply(const Vec& u) const;
  auto gram() const { return kkt_.topLeftCorner(n_, n_); }
  auto jacobian() const { return kkt_.bottomLeftCorner(c_, n_); }
  double rcond() const { return rcond_; }

 private:
  SaddleFactorization(Mat kkt, int n, int c);

  Mat kkt_;
  Eigen::PartialPivLU<Mat> lu_;
  int n_ = 0;
  int c_ = 0;
  double rcond_ = 0.0;
};

}  // namespace knotflow
