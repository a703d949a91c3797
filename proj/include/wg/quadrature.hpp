#pragma once

#include <array>
#include <map>
#include <mutex>

#include "wg/geometry.hpp"

namespace wg {

/// Points in physical coordinates; weights carry the measure of the domain.
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  double sum_weights() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }

  template <typename F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) s += weights[i] * f(points[i]);
    return s;
  }

  void append(const QuadratureRule& other) {
    points.insert(points.end(), other.points.begin(), other.points.end());
    weights.insert(weights.end(), other.weights.begin(), other.weights.end());
  }
};

struct Gauss1d {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre nodes by Newton iteration on the Legendre recurrence.
inline const Gauss1d& gauss_legendre(int n) {
  require(n >= 1 && n <= 64, "gauss_legendre: point count out of range");
  static std::map<int, Gauss1d> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Gauss1d g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.weights[i] = w;
    g.nodes[n - 1 - i] = x;
    g.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) g.nodes[n / 2] = 0.0;
  return cache.emplace(n, std::move(g)).first->second;
}

inline QuadratureRule edge_rule(Vec2 a, Vec2 b, int degree) {
  require(degree >= 0, "edge_rule: degree must be >= 0");
  int m = (degree + 2) / 2;  // ceil((degree+1)/2)
  const Gauss1d& g = gauss_legendre(m);
  double len = dist(a, b);
  QuadratureRule r;
  r.exactness_degree = degree;
  r.points.resize(m);
  r.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    double t = 0.5 * (g.nodes[i] + 1.0);
    r.points[i] = a + t * (b - a);
    r.weights[i] = 0.5 * len * g.weights[i];
  }
  return r;
}

/// Edge split into `panels` equal pieces, each carrying a Gauss rule.
inline QuadratureRule edge_panel_rule(Vec2 a, Vec2 b, int panels, int degree) {
  require(panels >= 1, "edge_panel_rule: panels must be >= 1");
  if (panels == 1) return edge_rule(a, b, degree);
  QuadratureRule r;
  r.exactness_degree = degree;
  for (int p = 0; p < panels; ++p) {
    Vec2 pa = a + (static_cast<double>(p) / panels) * (b - a);
    Vec2 pb = a + (static_cast<double>(p + 1) / panels) * (b - a);
    r.append(edge_rule(pa, pb, degree));
  }
  return r;
}

/// Collapsed tensor-product Gauss rule on a triangle: the Duffy map sends the
/// unit square onto the reference simplex; the Jacobian factor keeps all
/// weights positive at any exactness degree.
inline QuadratureRule triangle_rule(const std::array<Vec2, 3>& tri, int degree) {
  require(degree >= 0, "triangle_rule: degree must be >= 0");
  double area2 = cross(tri[1] - tri[0], tri[2] - tri[0]);
  require(area2 > 0.0, "triangle_rule: degenerate triangle");
  int mu = (degree + 3) / 2;  // ceil((degree+2)/2): u-direction picks up the Jacobian
  int mv = (degree + 2) / 2;  // ceil((degree+1)/2)
  const Gauss1d& gu = gauss_legendre(mu);
  const Gauss1d& gv = gauss_legendre(mv);
  QuadratureRule r;
  r.exactness_degree = degree;
  r.points.reserve(static_cast<std::size_t>(mu) * mv);
  r.weights.reserve(static_cast<std::size_t>(mu) * mv);
  for (int i = 0; i < mu; ++i) {
    double u = 0.5 * (gu.nodes[i] + 1.0);
    double wu = 0.5 * gu.weights[i];
    for (int j = 0; j < mv; ++j) {
      double v = 0.5 * (gv.nodes[j] + 1.0);
      double wv = 0.5 * gv.weights[j];
      double xi = u;
      double eta = v * (1.0 - u);
      Vec2 p = tri[0] + xi * (tri[1] - tri[0]) + eta * (tri[2] - tri[0]);
      r.points.push_back(p);
      r.weights.push_back(area2 * wu * wv * (1.0 - u));
    }
  }
  return r;
}

/// Uniform barycentric refinement of a triangle into s^2 congruent children.
inline void subdivide_triangle(const std::array<Vec2, 3>& tri, int s,
                               std::vector<std::array<Vec2, 3>>& out) {
  auto at = [&](int i, int j) {
    double a = static_cast<double>(i) / s;
    double b = static_cast<double>(j) / s;
    return tri[0] + a * (tri[1] - tri[0]) + b * (tri[2] - tri[0]);
  };
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s - i; ++j) {
      out.push_back({at(i, j), at(i + 1, j), at(i, j + 1)});
      if (i + j < s - 1) out.push_back({at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
    }
}

/// Centroid fan triangulation of a simple polygon given counterclockwise.
inline std::vector<std::array<Vec2, 3>> fan_triangles(const std::vector<Vec2>& poly) {
  require(poly.size() >= 3, "fan_triangles: polygon needs >= 3 vertices");
  Vec2 c = polygon_centroid(poly);
  std::vector<std::array<Vec2, 3>> tris;
  tris.reserve(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) {
    std::array<Vec2, 3> t{c, poly[i], poly[(i + 1) % poly.size()]};
    require(cross(t[1] - t[0], t[2] - t[0]) > 0.0,
            "polygon_rule: polygon not star-shaped from its centroid");
    tris.push_back(t);
  }
  return tris;
}

inline QuadratureRule polygon_rule(const std::vector<Vec2>& poly, int degree) {
  QuadratureRule r;
  r.exactness_degree = degree;
  for (const auto& t : fan_triangles(poly)) r.append(triangle_rule(t, degree));
  return r;
}

/// Fan triangles uniformly subdivided before the Gauss rule is applied; used
/// for non-polynomial integrands where exactness degrees do not apply.
inline QuadratureRule neural_rule(const std::vector<Vec2>& poly, int subdivisions, int degree) {
  require(subdivisions >= 1, "neural_rule: subdivisions must be >= 1");
  if (subdivisions == 1) return polygon_rule(poly, degree);
  QuadratureRule r;
  r.exactness_degree = degree;
  std::vector<std::array<Vec2, 3>> sub;
  for (const auto& t : fan_triangles(poly)) subdivide_triangle(t, subdivisions, sub);
  for (const auto& t : sub) r.append(triangle_rule(t, degree));
  return r;
}

}  // namespace wg
