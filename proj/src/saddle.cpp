#include "knotflow/saddle.hpp"

#include <string>

#include "knotflow/error.hpp"

namespace knotflow {

namespace {
// Reciprocal condition estimate below which the KKT matrix is treated as
// singular (rank-deficient J or G indefinite on ker J).
constexpr double kSingularRcond = 1e-15;
constexpr int kMaxRefinements = 6;
}  // namespace

SaddleFactorization::SaddleFactorization(Mat kkt, int n, int c)
    : kkt_(std::move(kkt)), n_(n), c_(c) {
  lu_.compute(kkt_);
  rcond_ = lu_.rcond();
  if (!(rcond_ > kSingularRcond) || !lu_.matrixLU().allFinite())
    fail(ErrorKind::SingularSystem,
         "saddle matrix is singular (rcond " + std::to_string(rcond_) + ")");
}

SaddleFactorization SaddleFactorization::factorize(const GramOperator& gram,
                                                   const Mat& jacobian) {
  return factorize(gram.dense(), jacobian);
}

SaddleFactorization SaddleFactorization::factorize(const Mat& gram, const Mat& jacobian) {
  const auto n = gram.rows();
  if (gram.cols() != n || jacobian.cols() != n)
    fail(ErrorKind::DimensionMismatch, "saddle blocks have inconsistent sizes");
  const auto c = jacobian.rows();
  if (c == 0) fail(ErrorKind::InvalidArgument, "saddle system needs at least one constraint");
  Mat kkt = Mat::Zero(n + c, n + c);
  kkt.topLeftCorner(n, n) = gram;
  kkt.topRightCorner(n, c) = jacobian.transpose();
  kkt.bottomLeftCorner(c, n) = jacobian;
  return SaddleFactorization(std::move(kkt), static_cast<int>(n), static_cast<int>(c));
}

SaddleFactorization::Solution SaddleFactorization::solve(const Vec& top,
                                                         const Vec& bottom) const {
  if (top.size() != n_ || bottom.size() != c_)
    fail(ErrorKind::DimensionMismatch, "saddle rhs has wrong size");
  Vec rhs(n_ + c_);
  rhs << top, bottom;
  const double rhs_norm = rhs.norm();
  Solution out;
  if (rhs_norm == 0.0) {
    out.primal = Vec::Zero(n_);
    out.dual = Vec::Zero(c_);
    return out;
  }
  Vec x = lu_.solve(rhs);
  double rel = (rhs - kkt_ * x).norm() / rhs_norm;
  for (int k = 0; k < kMaxRefinements && rel > kSolveTolerance; ++k) {
    x += lu_.solve(rhs - kkt_ * x);
    rel = (rhs - kkt_ * x).norm() / rhs_norm;
  }
  if (!(rel <= kSolveTolerance))
    fail(ErrorKind::SingularSystem,
         "saddle solve residual " + std::to_string(rel) + " above tolerance");
  out.primal = x.head(n_);
  out.dual = x.tail(c_);
  out.relative_residual = rel;
  return out;
}

ProjectedGradient SaddleFactorization::projected_gradient(const Vec& eta) const {
  Solution s = solve(eta, Vec::Zero(c_));
  return {std::move(s.primal), std::move(s.dual)};
}

Vec SaddleFactorization::pseudoinverse_apply(const Vec& xi) const {
  return solve(Vec::Zero(n_), xi).primal;
}

Vec SaddleFactorization::project_tangent(const Vec& u) const {
  return solve(gram_apply(u), Vec::Zero(c_)).primal;
}

Vec SaddleFactorization::gram_apply(const Vec& u) const {
  if (u.size() != n_) fail(ErrorKind::DimensionMismatch, "Gram apply: wrong size");
  return kkt_.topLeftCorner(n_, n_) * u;
}

}  // namespace knotflow
