#pragma once

#include <string_view>

#include "knotflow/curve.hpp"
#include "knotflow/quadrature.hpp"

namespace knotflow {

enum class MetricType { L2, W12, W22, W32Pure, W32Geometric };

std::string_view to_string(MetricType type);
MetricType parse_metric(std::string_view name);

struct MetricKind {
  MetricType type = MetricType::W32Geometric;
  /// W32Geometric: energy-weighted zeroth-order term (required).
  /// L2/W12/W22: add the lumped mass to the stiffness.
  bool include_low_order = true;
  /// Adds |∫ u ds|², which restores definiteness on constant fields.
  bool include_barycenter_term = false;
  /// Low-order term differences u_I(t_i) - u_J(t_j) across the pair; false
  /// uses the intra-edge difference u_I(t_i) - u_I(t_j) instead.
  bool cross_edge_low_order = true;

  void validate() const;
};

/// Gram matrix of a metric. Every supported metric acts identically on each
/// coordinate, so only the scalar N x N matrix S is stored; the full
/// (N*m) x (N*m) operator is S ⊗ I_m in vertex-major layout.
class GramOperator {
 public:
  GramOperator(Mat scalar, int dim, MetricKind kind);

  int size() const { return static_cast<int>(scalar_.rows()) * dim_; }
  int vertices() const { return static_cast<int>(scalar_.rows()); }
  int dim() const { return dim_; }
  const MetricKind& kind() const { return kind_; }

  const Mat& scalar() const { return scalar_; }
  Mat dense() const;

  Vec apply(const Vec& u) const;
  double inner(const Vec& u, const Vec& v) const;

 private:
  Mat scalar_;
  int dim_;
  MetricKind kind_;
};

GramOperator assemble_gram(const Polygon& p, const MetricKind& kind,
                           const QuadratureRule& quad = QuadratureRule::midpoint());

/// L2 / W12 / W22 baselines and the W32 principal part (W32Pure).
GramOperator assemble_gram_baselines(const Polygon& p, const MetricKind& kind,
                                     const QuadratureRule& quad = QuadratureRule::midpoint());

/// Lumped vertex weights (ℓ_{i-1} + ℓ_i) / 2.
Vec lumped_mass(const Polygon& p);

}  // namespace knotflow
