#pragma once

#include <vector>

namespace knotflow {

/// k-point rule on [0,1]; weights sum to one.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }

  static QuadratureRule midpoint();
  static QuadratureRule vertex();  // t = 0
  static QuadratureRule gauss_legendre(int k);
  static QuadratureRule custom(std::vector<double> nodes,
                               std::vector<double> weights);
};

}  // namespace knotflow
