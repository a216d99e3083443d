#include "knotflow/metric.hpp"

#include <cmath>
#include <string>

#include "knotflow/error.hpp"

namespace knotflow {

std::string_view to_string(MetricType type) {
  switch (type) {
    case MetricType::L2: return "L2";
    case MetricType::W12: return "W12";
    case MetricType::W22: return "W22";
    case MetricType::W32Pure: return "W32Pure";
    case MetricType::W32Geometric: return "W32Geometric";
  }
  return "?";
}

MetricType parse_metric(std::string_view name) {
  for (MetricType t : {MetricType::L2, MetricType::W12, MetricType::W22,
                       MetricType::W32Pure, MetricType::W32Geometric})
    if (name == to_string(t)) return t;
  fail(ErrorKind::InvalidArgument, "unknown metric '" + std::string(name) + "'");
}

void MetricKind::validate() const {
  if (type == MetricType::W32Geometric && !include_low_order)
    fail(ErrorKind::InvalidArgument, "W32Geometric requires the low-order term");
}

GramOperator::GramOperator(Mat scalar, int dim, MetricKind kind)
    : scalar_(std::move(scalar)), dim_(dim), kind_(kind) {}

Mat GramOperator::dense() const {
  const int n = vertices();
  Mat g = Mat::Zero(size(), size());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int d = 0; d < dim_; ++d) g(i * dim_ + d, j * dim_ + d) = scalar_(i, j);
  return g;
}

Vec GramOperator::apply(const Vec& u) const {
  if (u.size() != size())
    fail(ErrorKind::DimensionMismatch, "Gram apply: vector has size " +
                                           std::to_string(u.size()) + ", expected " +
                                           std::to_string(size()));
  const Eigen::Map<const Mat> field(u.data(), dim_, vertices());
  Vec out(size());
  Eigen::Map<Mat>(out.data(), dim_, vertices()).noalias() = field * scalar_;
  return out;
}

double GramOperator::inner(const Vec& u, const Vec& v) const {
  if (v.size() != size())
    fail(ErrorKind::DimensionMismatch, "Gram inner: dimension mismatch");
  return v.dot(apply(u));
}

Vec lumped_mass(const Polygon& p) {
  const int n = p.size();
  Vec w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 * (p.edge_length(i - 1) + p.edge_length(i));
  return w;
}

namespace {

void add_barycenter_term(const Polygon& p, Mat& s) {
  const Vec w = lumped_mass(p);
  s.noalias() += w * w.transpose();
}

// Principal Gagliardo-type term plus (optionally) the energy-weighted
// zeroth-order term, both summed over ordered pairs with disjoint closures.
void add_w32_terms(const Polygon& p, const QuadratureRule& quad, bool low_order,
                   bool cross_edge, Mat& s) {
  const int n = p.size();
  const Mat& x = p.vertices();
  const double total = p.length();
  const auto& prefix = p.arcs().prefix;
  const int q = quad.size();
  const double tiny = kContactRelTol * total;
  Eigen::Matrix4d local;
  Eigen::Vector4d diff, e;
  for (int i = 0; i < n; ++i) {
    const int i1 = p.wrap(i + 1);
    const double li = p.edge_length(i);
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      const int j1 = p.wrap(j + 1);
      const double lj = p.edge_length(j);
      local.setZero();
      double kernel = 0.0;
      for (int a = 0; a < q; ++a) {
        const double s_i = quad.nodes[a];
        for (int b = 0; b < q; ++b) {
          const double t_j = quad.nodes[b];
          const double ww = quad.weights[a] * quad.weights[b];
          const double r2 =
              ((1.0 - s_i) * x.col(i) + s_i * x.col(i1) - (1.0 - t_j) * x.col(j) - t_j * x.col(j1))
                  .squaredNorm();
          if (r2 < tiny * tiny)
            fail(ErrorKind::CoincidentPoints, "Gram assembly: coincident quadrature points");
          kernel += ww / r2;
          if (!low_order) continue;
          const double ds = std::abs(prefix[i] + s_i * li - prefix[j] - t_j * lj);
          const double rho = std::min(ds, total - ds);
          const double density = 1.0 / r2 - 1.0 / (rho * rho);
          if (cross_edge)
            e << 1.0 - s_i, s_i, -(1.0 - t_j), -t_j;
          else
            e << t_j - s_i, s_i - t_j, 0.0, 0.0;
          local.noalias() += (2.0 * li * lj * ww * density / r2) * (e * e.transpose());
        }
      }
      diff << -1.0 / li, 1.0 / li, 1.0 / lj, -1.0 / lj;
      local.noalias() += (2.0 * li * lj * kernel) * (diff * diff.transpose());
      const int v[4] = {i, i1, j, j1};
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) s(v[r], v[c]) += local(r, c);
    }
  }
}

}  // namespace

GramOperator assemble_gram_baselines(const Polygon& p, const MetricKind& kind,
                                     const QuadratureRule& quad) {
  kind.validate();
  const int n = p.size();
  Mat s = Mat::Zero(n, n);
  const bool mass = kind.include_low_order;
  switch (kind.type) {
    case MetricType::L2:
      s.diagonal() = lumped_mass(p);
      break;
    case MetricType::W12:
      if (mass) s.diagonal() = lumped_mass(p);
      for (int i = 0; i < n; ++i) {
        const int i1 = p.wrap(i + 1);
        const double c = 1.0 / p.edge_length(i);
        s(i, i) += c;
        s(i1, i1) += c;
        s(i, i1) -= c;
        s(i1, i) -= c;
      }
      break;
    case MetricType::W22:
      if (mass) s.diagonal() = lumped_mass(p);
      for (int i = 0; i < n; ++i) {
        const int prev = p.wrap(i - 1), next = p.wrap(i + 1);
        const double la = p.edge_length(i - 1), lb = p.edge_length(i);
        // dual length (la+lb)/2 times the squared second difference quotient
        const double weight = 2.0 / (la + lb);
        const int v[3] = {prev, i, next};
        const double c[3] = {1.0 / la, -(1.0 / la + 1.0 / lb), 1.0 / lb};
        for (int r = 0; r < 3; ++r)
          for (int k = 0; k < 3; ++k) s(v[r], v[k]) += weight * c[r] * c[k];
      }
      break;
    case MetricType::W32Pure:
      add_w32_terms(p, quad, false, kind.cross_edge_low_order, s);
      break;
    case MetricType::W32Geometric:
      fail(ErrorKind::InvalidArgument, "W32Geometric is not a baseline metric");
  }
  if (kind.include_barycenter_term) add_barycenter_term(p, s);
  return GramOperator(0.5 * (s + s.transpose()), p.dim(), kind);
}

GramOperator assemble_gram(const Polygon& p, const MetricKind& kind,
                           const QuadratureRule& quad) {
  kind.validate();
  if (kind.type != MetricType::W32Geometric) return assemble_gram_baselines(p, kind, quad);
  const int n = p.size();
  Mat s = Mat::Zero(n, n);
  add_w32_terms(p, quad, true, kind.cross_edge_low_order, s);
  if (kind.include_barycenter_term) add_barycenter_term(p, s);
  return GramOperator(0.5 * (s + s.transpose()), p.dim(), kind);
}

}  // namespace knotflow
