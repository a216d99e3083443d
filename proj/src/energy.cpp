#include "knotflow/energy.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "knotflow/error.hpp"

namespace knotflow {

namespace {

[[noreturn]] void coincident(int i, int j) {
  fail(ErrorKind::CoincidentPoints, "quadrature points of edges " +
                                        std::to_string(i) + " and " +
                                        std::to_string(j) + " coincide");
}

// With K = ℓ_I ℓ_J + <a,b>, u = <Δ,a>, v = <Δ,b> (a, b the edge vectors)
// the weighted integrand is ℓ_I ℓ_J F = K/|Δ|² - 2uv/|Δ|⁴. The helpers below
// work on that form.
struct PairView {
  const double* x0;
  const double* x1;
  const double* y0;
  const double* y1;
};

PairView view(const Polygon& p, int i, int j) {
  const Mat& x = p.vertices();
  return {x.col(i).data(), x.col(p.wrap(i + 1)).data(), x.col(j).data(),
          x.col(p.wrap(j + 1)).data()};
}

double pair_value(const PairView& pv, int m, const QuadratureRule& quad,
                  double min_r2, int i, int j) {
  double aa = 0, bb = 0, ab = 0;
  for (int k = 0; k < m; ++k) {
    const double a = pv.x1[k] - pv.x0[k];
    const double b = pv.y1[k] - pv.y0[k];
    aa += a * a;
    bb += b * b;
    ab += a * b;
  }
  const double kk = std::sqrt(aa) * std::sqrt(bb) + ab;
  double sum = 0.0;
  const int q = quad.size();
  for (int si = 0; si < q; ++si) {
    const double s = quad.nodes[si];
    for (int tj = 0; tj < q; ++tj) {
      const double t = quad.nodes[tj];
      double r2 = 0, u = 0, v = 0;
      for (int k = 0; k < m; ++k) {
        const double a = pv.x1[k] - pv.x0[k];
        const double b = pv.y1[k] - pv.y0[k];
        const double d = pv.x0[k] + s * a - pv.y0[k] - t * b;
        r2 += d * d;
        u += d * a;
        v += d * b;
      }
      if (r2 < min_r2) coincident(i, j);
      sum += quad.weights[si] * quad.weights[tj] * (kk / r2 - 2.0 * u * v / (r2 * r2));
    }
  }
  return sum;
}

template <typename Visit>
void for_each_pair(int n, Visit&& visit) {
  for (int i = 0; i < n; ++i)
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      visit(i, j);
    }
}

double min_r2_for(const Polygon& p) {
  const double d = kContactRelTol * p.length();
  return d * d;
}

// Second-order forward-mode jet over D variables.
template <int D>
struct Jet {
  using G = Eigen::Matrix<double, D, 1>;
  using H = Eigen::Matrix<double, D, D>;
  double v = 0.0;
  G g;
  H h;

  static Jet constant(double value, int dim) {
    Jet j;
    j.v = value;
    j.g = G::Zero(dim);
    j.h = H::Zero(dim, dim);
    return j;
  }
  static Jet variable(double value, int index, int dim) {
    Jet j = constant(value, dim);
    j.g[index] = 1.0;
    return j;
  }
};

template <int D>
Jet<D> operator+(const Jet<D>& a, const Jet<D>& b) {
  return {a.v + b.v, a.g + b.g, a.h + b.h};
}
template <int D>
Jet<D> operator-(const Jet<D>& a, const Jet<D>& b) {
  return {a.v - b.v, a.g - b.g, a.h - b.h};
}
template <int D>
Jet<D> operator*(double c, const Jet<D>& a) {
  return {c * a.v, c * a.g, c * a.h};
}
template <int D>
Jet<D> operator*(const Jet<D>& a, const Jet<D>& b) {
  Jet<D> r;
  r.v = a.v * b.v;
  r.g = a.v * b.g + b.v * a.g;
  r.h = a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose();
  return r;
}
template <int D>
Jet<D> chain(const Jet<D>& a, double f, double f1, double f2) {
  return {f, f1 * a.g, f1 * a.h + f2 * a.g * a.g.transpose()};
}
template <int D>
Jet<D> reciprocal(const Jet<D>& a) {
  const double inv = 1.0 / a.v;
  return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}
template <int D>
Jet<D> sqrt(const Jet<D>& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

template <int D>
Jet<D> dot(const std::vector<Jet<D>>& x, int ox, const std::vector<Jet<D>>& y,
           int oy, int m) {
  Jet<D> r = x[ox] * y[oy];
  for (int k = 1; k < m; ++k) r = r + x[ox + k] * y[oy + k];
  return r;
}

// Hessian of ℓ_I ℓ_J F(s,t) with respect to (a, b, Δ) stacked (3m).
template <int D>
Mat local_hessian_abd(const double* a, const double* b, const double* d, int m) {
  const int dim = 3 * m;
  std::vector<Jet<D>> z;
  z.reserve(dim);
  for (int k = 0; k < m; ++k) z.push_back(Jet<D>::variable(a[k], k, dim));
  for (int k = 0; k < m; ++k) z.push_back(Jet<D>::variable(b[k], m + k, dim));
  for (int k = 0; k < m; ++k) z.push_back(Jet<D>::variable(d[k], 2 * m + k, dim));
  const Jet<D> aa = dot(z, 0, z, 0, m);
  const Jet<D> bb = dot(z, m, z, m, m);
  const Jet<D> ab = dot(z, 0, z, m, m);
  const Jet<D> r2 = dot(z, 2 * m, z, 2 * m, m);
  const Jet<D> u = dot(z, 2 * m, z, 0, m);
  const Jet<D> v = dot(z, 2 * m, z, m, m);
  const Jet<D> kk = sqrt(aa * bb) + ab;
  const Jet<D> inv_r2 = reciprocal(r2);
  const Jet<D> f = kk * inv_r2 - 2.0 * ((u * v) * (inv_r2 * inv_r2));
  return f.h;
}

Mat local_hessian(const double* a, const double* b, const double* d, int m) {
  switch (m) {
    case 2: return local_hessian_abd<6>(a, b, d, m);
    case 3: return local_hessian_abd<9>(a, b, d, m);
    default: return local_hessian_abd<Eigen::Dynamic>(a, b, d, m);
  }
}

}  // namespace

double in_integrand(const Vec& tail_i, const Vec& head_i, const Vec& tail_j,
                    const Vec& head_j, double s, double t) {
  const auto m = tail_i.size();
  if (head_i.size() != m || tail_j.size() != m || head_j.size() != m)
    fail(ErrorKind::DimensionMismatch, "integrand points differ in dimension");
  const Vec ei = head_i - tail_i;
  const Vec ej = head_j - tail_j;
  const Vec tau_i = ei.normalized();
  const Vec tau_j = ej.normalized();
  const Vec delta = ((1.0 - s) * tail_i + s * head_i) - ((1.0 - t) * tail_j + t * head_j);
  const double r2 = delta.squaredNorm();
  const double scale = kContactRelTol * (ei.norm() + ej.norm());
  if (r2 < scale * scale) fail(ErrorKind::CoincidentPoints, "integrand points coincide");
  return (tau_i - tau_j).squaredNorm() / (2.0 * r2) + 2.0 * tau_i.dot(tau_j) / r2 -
         2.0 * delta.dot(tau_i) * delta.dot(tau_j) / (r2 * r2);
}

double local_contribution(const Polygon& p, int edge_i, int edge_j,
                          const QuadratureRule& quad) {
  if (!p.disjoint(edge_i, edge_j))
    fail(ErrorKind::AdjacentEdges, "local contribution needs disjoint edges");
  const int i = p.wrap(edge_i), j = p.wrap(edge_j);
  return pair_value(view(p, i, j), p.dim(), quad, min_r2_for(p), i, j);
}

EnergyValue energy(const Polygon& p, const QuadratureRule& quad, bool keep_pairs) {
  const int n = p.size();
  const int m = p.dim();
  const double min_r2 = min_r2_for(p);
  EnergyValue out;
  if (keep_pairs) out.pair_table = Mat::Zero(n, n);
  double sum = 0.0;
  for_each_pair(n, [&](int i, int j) {
    const double w = pair_value(view(p, i, j), m, quad, min_r2, i, j);
    sum += w;
    if (keep_pairs) out.pair_table(i, j) = out.pair_table(j, i) = w;
  });
  out.value = 4.0 + 2.0 * sum;
  return out;
}

double energy_value(const Polygon& p, const QuadratureRule& quad) {
  return energy(p, quad).value;
}

double energy_density(const Polygon& p, const QuadPoint& a, const QuadPoint& b) {
  const double r2 = (a.position - b.position).squaredNorm();
  const double tiny = kContactRelTol * p.length();
  if (r2 < tiny * tiny) fail(ErrorKind::CoincidentPoints, "density points coincide");
  const double rho = geodesic_distance(p, a, b);
  return 1.0 / r2 - 1.0 / (rho * rho);
}

double ks_energy(const Polygon& p, KsVariant variant) {
  const double t = variant == KsVariant::Vertex ? 0.0 : 0.5;
  double sum = 0.0;
  for_each_pair(p.size(), [&](int i, int j) {
    sum += p.edge_length(i) * p.edge_length(j) *
           energy_density(p, p.quad_point(i, t), p.quad_point(j, t));
  });
  return 2.0 * sum;
}

Vec d_energy(const Polygon& p, const QuadratureRule& quad) {
  const int n = p.size();
  const int m = p.dim();
  const double min_r2 = min_r2_for(p);
  Vec grad = Vec::Zero(p.dofs());
  Vec a(m), b(m), d(m), fa(m), fb(m), fd(m);
  for_each_pair(n, [&](int i, int j) {
    const PairView pv = view(p, i, j);
    for (int k = 0; k < m; ++k) {
      a[k] = pv.x1[k] - pv.x0[k];
      b[k] = pv.y1[k] - pv.y0[k];
    }
    const double la = a.norm(), lb = b.norm();
    const double kk = la * lb + a.dot(b);
    fa.setZero();
    fb.setZero();
    Vec g_x0 = Vec::Zero(m), g_x1 = Vec::Zero(m), g_y0 = Vec::Zero(m), g_y1 = Vec::Zero(m);
    for (int si = 0; si < quad.size(); ++si) {
      const double s = quad.nodes[si];
      for (int tj = 0; tj < quad.size(); ++tj) {
        const double t = quad.nodes[tj];
        const double w = 2.0 * quad.weights[si] * quad.weights[tj];
        for (int k = 0; k < m; ++k) d[k] = pv.x0[k] + s * a[k] - pv.y0[k] - t * b[k];
        const double r2 = d.squaredNorm();
        if (r2 < min_r2) coincident(i, j);
        const double u = d.dot(a), v = d.dot(b);
        const double ir2 = 1.0 / r2, ir4 = ir2 * ir2;
        fa = ((lb / la) * a + b) * ir2 - (2.0 * v * ir4) * d;
        fb = ((la / lb) * b + a) * ir2 - (2.0 * u * ir4) * d;
        fd = (-2.0 * kk * ir4 + 8.0 * u * v * ir4 * ir2) * d - (2.0 * ir4) * (v * a + u * b);
        g_x0 += w * (-fa + (1.0 - s) * fd);
        g_x1 += w * (fa + s * fd);
        g_y0 += w * (-fb - (1.0 - t) * fd);
        g_y1 += w * (fb - t * fd);
      }
    }
    grad.segment(i * m, m) += g_x0;
    grad.segment(p.wrap(i + 1) * m, m) += g_x1;
    grad.segment(j * m, m) += g_y0;
    grad.segment(p.wrap(j + 1) * m, m) += g_y1;
  });
  return grad;
}

Mat d2_energy(const Polygon& p, const QuadratureRule& quad) {
  const int n = p.size();
  const int m = p.dim();
  const double min_r2 = min_r2_for(p);
  Mat hess = Mat::Zero(p.dofs(), p.dofs());
  Vec a(m), b(m), d(m);
  Mat local(4 * m, 4 * m);
  for_each_pair(n, [&](int i, int j) {
    const PairView pv = view(p, i, j);
    for (int k = 0; k < m; ++k) {
      a[k] = pv.x1[k] - pv.x0[k];
      b[k] = pv.y1[k] - pv.y0[k];
    }
    local.setZero();
    for (int si = 0; si < quad.size(); ++si) {
      const double s = quad.nodes[si];
      for (int tj = 0; tj < quad.size(); ++tj) {
        const double t = quad.nodes[tj];
        const double w = 2.0 * quad.weights[si] * quad.weights[tj];
        for (int k = 0; k < m; ++k) d[k] = pv.x0[k] + s * a[k] - pv.y0[k] - t * b[k];
        if (d.squaredNorm() < min_r2) coincident(i, j);
        const Mat h3 = local_hessian(a.data(), b.data(), d.data(), m);
        // (a, b, Δ) as linear combinations of (x0, x1, y0, y1)
        const double c[3][4] = {{-1.0, 1.0, 0.0, 0.0},
                                {0.0, 0.0, -1.0, 1.0},
                                {1.0 - s, s, -(1.0 - t), -t}};
        for (int vi = 0; vi < 4; ++vi)
          for (int vj = 0; vj < 4; ++vj) {
            auto block = local.block(vi * m, vj * m, m, m);
            for (int pi = 0; pi < 3; ++pi) {
              if (c[pi][vi] == 0.0) continue;
              for (int pj = 0; pj < 3; ++pj) {
                if (c[pj][vj] == 0.0) continue;
                block += (w * c[pi][vi] * c[pj][vj]) * h3.block(pi * m, pj * m, m, m);
              }
            }
          }
      }
    }
    const int verts[4] = {i, p.wrap(i + 1), j, p.wrap(j + 1)};
    for (int vi = 0; vi < 4; ++vi)
      for (int vj = 0; vj < 4; ++vj)
        hess.block(verts[vi] * m, verts[vj] * m, m, m) += local.block(vi * m, vj * m, m, m);
  });
  return 0.5 * (hess + hess.transpose());
}

}  // namespace knotflow
