#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace wg {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// Symmetric 2x2 coefficient matrix.
struct Mat2 {
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;

  Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }

  bool is_spd(double eig_min) const {
    // eigenvalues of [[xx,xy],[xy,yy]]
    double tr = xx + yy;
    double det = xx * yy - xy * xy;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    double lo = tr / 2.0 - disc;
    return lo >= eig_min;
  }

  static Mat2 identity() { return {1.0, 0.0, 1.0}; }
  static Mat2 scaled_identity(double s) { return {s, 0.0, s}; }
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

inline double polygon_area(const std::vector<Vec2>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t j = (i + 1) % v.size();
    a += cross(v[i], v[j]);
  }
  return 0.5 * a;
}

inline Vec2 polygon_centroid(const std::vector<Vec2>& v) {
  double a = 0.0;
  Vec2 c{0.0, 0.0};
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t j = (i + 1) % v.size();
    double w = cross(v[i], v[j]);
    a += w;
    c = c + w * (v[i] + v[j]);
  }
  require(std::abs(a) > 0.0, "polygon_centroid: zero-area polygon");
  return (1.0 / (3.0 * a)) * c;
}

inline double polygon_diameter(const std::vector<Vec2>& v) {
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, dist(v[i], v[j]));
  return d;
}

}  // namespace wg
