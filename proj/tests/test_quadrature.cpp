#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "wg/basis.hpp"
#include "wg/quadrature.hpp"

using namespace wg;
using wg::testing::square_moment;
using wg::testing::triangle_moment;

namespace {

const std::vector<Vec2> kUnitSquare{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
const std::array<Vec2, 3> kUnitTriangle{{{0, 0}, {1, 0}, {0, 1}}};

double monomial_error(const QuadratureRule& r, int a, int b, double exact) {
  double v = r.integrate([&](Vec2 p) { return powi(p.x, a) * powi(p.y, b); });
  return std::abs(v - exact) / std::max(std::abs(exact), 1e-300);
}

}  // namespace

TEST_CASE("edge rules: midpoint, length, analytic cubic") {
  auto mid = edge_rule({0, 0}, {1, 0}, 1);
  CHECK(mid.points.size() == 1);
  CHECK(mid.points[0].x == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mid.weights[0] == doctest::Approx(1.0).epsilon(1e-14));

  auto r = edge_rule({0.3, -0.2}, {1.1, 0.4}, 0);
  CHECK(r.sum_weights() == doctest::Approx(1.0).epsilon(1e-14));  // edge length

  auto r3 = edge_rule({0, 0}, {1, 0}, 3);
  double cubic = r3.integrate([](Vec2 p) { return p.x * p.x * p.x; });
  CHECK(cubic == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("triangle rule: constants and analytic moments") {
  auto r = triangle_rule(kUnitTriangle, 2);
  CHECK(r.sum_weights() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(monomial_error(triangle_rule(kUnitTriangle, 2), 1, 1, 1.0 / 24.0) <= 1e-13);
  CHECK(monomial_error(triangle_rule(kUnitTriangle, 2), 2, 0, 1.0 / 12.0) <= 1e-13);
}

TEST_CASE("triangle rule: degenerate input rejected") {
  std::array<Vec2, 3> flat{{{0, 0}, {1, 0}, {2, 0}}};
  CHECK_THROWS_WITH_AS(triangle_rule(flat, 2), doctest::Contains("degenerate"),
                       std::runtime_error);
}

TEST_CASE("monomial exactness up to the declared degree") {
  for (int degree : {1, 2, 4, 6, 8, 10}) {
    auto tri = triangle_rule(kUnitTriangle, degree);
    auto sq = polygon_rule(kUnitSquare, degree);
    for (double w : tri.weights) CHECK(w > 0.0);
    for (double w : sq.weights) CHECK(w > 0.0);
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        CHECK(monomial_error(tri, a, b, triangle_moment(a, b)) <= 1e-12);
        CHECK(monomial_error(sq, a, b, square_moment(a, b)) <= 1e-12);
      }
  }
}

TEST_CASE("polygon rule: unit square and L-shape") {
  auto sq = polygon_rule(kUnitSquare, 4);
  CHECK(sq.sum_weights() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(monomial_error(sq, 2, 2, 1.0 / 9.0) <= 1e-13);

  std::vector<Vec2> lshape{{-1, -1}, {0, -1}, {0, 0}, {1, 0}, {1, 1}, {-1, 1}};
  auto lr = polygon_rule(lshape, 3);
  CHECK(lr.sum_weights() == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("polygon rule additivity over the centroid fan") {
  std::vector<Vec2> poly{{0, 0}, {2, 0}, {2.5, 1.5}, {1, 2.5}, {-0.5, 1}};
  auto whole = polygon_rule(poly, 5);
  double direct = whole.integrate([](Vec2 p) { return p.x * p.x * p.y; });
  double fanned = 0.0;
  for (const auto& t : fan_triangles(poly))
    fanned += triangle_rule(t, 5).integrate([](Vec2 p) { return p.x * p.x * p.y; });
  CHECK(direct == doctest::Approx(fanned).epsilon(1e-14));
}

TEST_CASE("self-intersecting polygon rejected") {
  std::vector<Vec2> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(polygon_rule(bowtie, 2), std::runtime_error);
}

TEST_CASE("neural rule: subdivisions=1 reduces to polygon rule") {
  auto a = polygon_rule(kUnitSquare, 6);
  auto b = neural_rule(kUnitSquare, 1, 6);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].x == b.points[i].x);
    CHECK(a.points[i].y == b.points[i].y);
    CHECK(a.weights[i] == b.weights[i]);
  }
}

TEST_CASE("neural rule: sin*sin on the unit square") {
  // Analytic antiderivative oracle: integral of sin(pi x) sin(pi y) = 4/pi^2.
  double exact = 4.0 / (M_PI * M_PI);
  auto r = neural_rule(kUnitSquare, 2, 10);
  double v = r.integrate([](Vec2 p) { return std::sin(M_PI * p.x) * std::sin(M_PI * p.y); });
  CHECK(std::abs(v - exact) / exact <= 1e-8);
}

TEST_CASE("neural rule: refinement shrinks the error monotonically") {
  auto integrand = [](Vec2 p) { return std::exp(3.0 * p.x) * std::cos(4.0 * p.y); };
  // Antiderivative oracle: (e^3-1)/3 * sin(4)/4.
  double exact = (std::exp(3.0) - 1.0) / 3.0 * std::sin(4.0) / 4.0;
  double prev = 1e300;
  for (int s : {1, 2, 4}) {
    double v = neural_rule(kUnitSquare, s, 4).integrate(integrand);
    double err = std::abs(v - exact);
    CHECK(err < prev);
    prev = err;
  }
}
