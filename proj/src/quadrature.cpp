#include "knotflow/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "knotflow/error.hpp"

namespace knotflow {

QuadratureRule QuadratureRule::midpoint() { return {{0.5}, {1.0}}; }

QuadratureRule QuadratureRule::vertex() { return {{0.0}, {1.0}}; }

QuadratureRule QuadratureRule::gauss_legendre(int k) {
  if (k < 1) fail(ErrorKind::InvalidArgument, "quadrature needs k >= 1");
  QuadratureRule rule;
  rule.nodes.resize(k);
  rule.weights.resize(k);
  // Newton on P_k from the Chebyshev-like initial guess, then map [-1,1] to [0,1].
  for (int i = 0; i < k; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= k; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (k == 1) p0 = 1.0;
      dp = k * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= k; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    if (k == 1) p0 = 1.0;
    dp = k * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[k - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[k - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

QuadratureRule QuadratureRule::custom(std::vector<double> nodes,
                                      std::vector<double> weights) {
  if (nodes.empty() || nodes.size() != weights.size())
    fail(ErrorKind::InvalidArgument, "quadrature nodes/weights mismatch");
  for (double t : nodes)
    if (t < 0.0 || t > 1.0)
      fail(ErrorKind::InvalidArgument, "quadrature node outside [0,1]");
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12)
    fail(ErrorKind::InvalidArgument, "quadrature weights must sum to one");
  return {std::move(nodes), std::move(weights)};
}

}  // namespace knotflow
