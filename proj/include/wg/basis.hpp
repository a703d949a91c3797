#pragma once

#include "wg/geometry.hpp"

namespace wg {

inline int poly_space_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }

inline double powi(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

/// Index -> (a, b) with monomials ordered by total degree, x-power descending.
inline std::pair<int, int> monomial_exponents(int idx) {
  int t = 0;
  while (idx > t) {
    idx -= t + 1;
    ++t;
  }
  return {t - idx, idx};
}

/// Scaled monomials ((x-x_T)/h_T)^a ((y-y_T)/h_T)^b on a cell; centroid and
/// diameter scaling keeps local Gram matrices well conditioned.
struct CellBasis {
  Vec2 center;
  double scale = 1.0;
  int degree = 0;
  int count = 0;

  CellBasis(Vec2 c, double h, int deg)
      : center(c), scale(h), degree(deg), count(poly_space_dim(deg)) {}

  double eval(int i, Vec2 p) const {
    auto [a, b] = monomial_exponents(i);
    double xi = (p.x - center.x) / scale;
    double eta = (p.y - center.y) / scale;
    return powi(xi, a) * powi(eta, b);
  }

  Vec2 grad(int i, Vec2 p) const {
    auto [a, b] = monomial_exponents(i);
    double xi = (p.x - center.x) / scale;
    double eta = (p.y - center.y) / scale;
    Vec2 g{0.0, 0.0};
    if (a > 0) g.x = a * powi(xi, a - 1) * powi(eta, b) / scale;
    if (b > 0) g.y = b * powi(xi, a) * powi(eta, b - 1) / scale;
    return g;
  }
};

/// Arc-length frame of an edge in its canonical orientation; the basis on
/// P_k(e) is t^j with t in [-1/2, 1/2].
struct EdgeFrame {
  Vec2 a;
  Vec2 b;
  double len = 0.0;
  Vec2 tangent;

  EdgeFrame(Vec2 a_, Vec2 b_) : a(a_), b(b_), len(dist(a_, b_)) {
    require(len > 0.0, "EdgeFrame: zero-length edge");
    tangent = (1.0 / len) * (b - a);
  }

  double param(Vec2 p) const { return dot(p - a, tangent) / len - 0.5; }
};

inline double edge_basis_eval(int j, double t) { return powi(t, j); }

}  // namespace wg
