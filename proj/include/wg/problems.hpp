#pragma once

#include "wg/expr.hpp"
#include "wg/neural.hpp"
#include "wg/system.hpp"

namespace wg {

enum class Regularity { smooth, singular, interface_aligned };

/// Benchmark instance: coefficient builder, data f and g, and (when known)
/// the exact solution for error reporting.
struct Problem {
  std::string name;
  std::string domain;  // "square" | "lshape"
  std::function<Mat2(Vec2)> coeff_at;
  ScalarField f;
  ScalarField g;
  ScalarField u;       // empty when no exact solution is known
  VectorField grad_u;  // optional
  Regularity regularity = Regularity::smooth;

  bool has_exact() const { return static_cast<bool>(u); }

  CoefficientField coefficients(const Mesh& mesh) const {
    if (regularity == Regularity::interface_aligned) check_interface_alignment(mesh);
    return CoefficientField::from_function(mesh, coeff_at);
  }

  Mesh make_mesh(int n, CellKind kind) const {
    return domain == "lshape" ? generate_lshape_mesh(n, kind) : generate_square_mesh(n, kind);
  }

  void check_interface_alignment(const Mesh& mesh) const {
    for (int c = 0; c < mesh.n_cells(); ++c) {
      bool left = false, right = false;
      for (int v : mesh.cells[c]) {
        if (mesh.vertices[v].x < 0.5 - 1e-12) left = true;
        if (mesh.vertices[v].x > 0.5 + 1e-12) right = true;
      }
      require(!(left && right), "problem '" + name + "': mesh not aligned with the interface");
    }
  }
};

inline double lshape_theta(Vec2 p) {
  double th = std::atan2(p.y, p.x);
  if (th < 0.0) th += 2.0 * M_PI;
  return th;
}

inline double lshape_singular_value(Vec2 p) {
  double r2 = p.x * p.x + p.y * p.y;
  if (r2 == 0.0) return 0.0;
  return std::cbrt(r2) * std::sin(2.0 * lshape_theta(p) / 3.0);
}

inline Vec2 lshape_singular_gradient(Vec2 p) {
  double r = std::hypot(p.x, p.y);
  if (r == 0.0) return {0.0, 0.0};
  double th = lshape_theta(p);
  double s = std::sin(2.0 * th / 3.0), c = std::cos(2.0 * th / 3.0);
  double f = (2.0 / 3.0) / std::cbrt(r);
  double ct = p.x / r, st = p.y / r;
  return {f * (s * ct - c * st), f * (s * st + c * ct)};
}

inline Problem problem_smooth_square() {
  Problem p;
  p.name = "smooth_square";
  p.domain = "square";
  p.coeff_at = [](Vec2) { return Mat2::identity(); };
  p.u = [](Vec2 q) { return std::sin(M_PI * q.x) * std::sin(M_PI * q.y); };
  p.grad_u = [](Vec2 q) {
    return Vec2{M_PI * std::cos(M_PI * q.x) * std::sin(M_PI * q.y),
                M_PI * std::sin(M_PI * q.x) * std::cos(M_PI * q.y)};
  };
  p.f = [](Vec2 q) { return 2.0 * M_PI * M_PI * std::sin(M_PI * q.x) * std::sin(M_PI * q.y); };
  p.g = [](Vec2) { return 0.0; };
  p.regularity = Regularity::smooth;
  return p;
}

/// Pure corner mode r^(2/3) sin(2 theta / 3) on the L-shape; harmonic, with
/// its own trace as Dirichlet data.
inline Problem problem_lshape_singular() {
  Problem p;
  p.name = "lshape_singular";
  p.domain = "lshape";
  p.coeff_at = [](Vec2) { return Mat2::identity(); };
  p.u = lshape_singular_value;
  p.grad_u = lshape_singular_gradient;
  p.f = [](Vec2) { return 0.0; };
  p.g = lshape_singular_value;
  p.regularity = Regularity::singular;
  return p;
}

/// Piecewise-constant coefficient 1 | beta across x = 1/2 with the 1D exact
/// solution continuous in value and flux.
inline Problem problem_interface_strip(double beta) {
  require(beta > 0.0, "problem_interface_strip: beta must be positive");
  Problem p;
  p.name = "interface_strip";
  p.domain = "square";
  double c1 = 2.0 * beta / (1.0 + beta);
  double c2 = 2.0 / (1.0 + beta);
  double d = (beta - 1.0) / (1.0 + beta);
  p.coeff_at = [beta](Vec2 q) {
    return q.x < 0.5 ? Mat2::identity() : Mat2::scaled_identity(beta);
  };
  p.u = [c1, c2, d](Vec2 q) { return q.x < 0.5 ? c1 * q.x : c2 * q.x + d; };
  p.grad_u = [c1, c2](Vec2 q) { return Vec2{q.x < 0.5 ? c1 : c2, 0.0}; };
  p.f = [](Vec2) { return 0.0; };
  p.g = p.u;
  p.regularity = Regularity::interface_aligned;
  return p;
}

/// Hand-crafted enrichment direction for the L-shape: cutoff times the
/// singular mode.
inline std::function<double(Vec2)> oracle_singular_candidate() {
  CutoffFunction phi = cutoff("lshape");
  return [phi](Vec2 p) { return phi(p) * lshape_singular_value(p); };
}

/// Custom problem from expression strings; the coefficient is the identity.
inline Problem problem_from_expressions(const std::string& domain, const std::string& f_expr,
                                        const std::string& g_expr, const std::string& u_expr) {
  Problem p;
  p.name = "custom";
  p.domain = domain;
  require(domain == "square" || domain == "lshape",
          "problem_from_expressions: domain must be 'square' or 'lshape'");
  p.coeff_at = [](Vec2) { return Mat2::identity(); };
  require(!f_expr.empty(), "custom problem: source expression 'f' is required");
  p.f = Expression::parse(f_expr).as_function();
  p.g = g_expr.empty() ? ScalarField([](Vec2) { return 0.0; })
                       : Expression::parse(g_expr).as_function();
  if (!u_expr.empty()) p.u = Expression::parse(u_expr).as_function();
  p.regularity = Regularity::smooth;
  return p;
}

/// Finite-difference guard: -div(a grad u) = f at sampled interior points,
/// away from boundaries, interfaces, and the singular corner. The analytic
/// forms stay authoritative; this only catches transcription slips.
inline void check_pde_consistency(const Problem& p, int samples = 50, std::uint64_t seed = 2024,
                                  double tol = 1e-6) {
  if (!p.has_exact()) return;
  detail::SplitMix64 rng(seed);
  double fd_h = 1e-4;
  int accepted = 0;
  while (accepted < samples) {
    Vec2 q;
    if (p.domain == "lshape") {
      q = {rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
      if (q.x > -0.1 && q.y < 0.1) continue;           // removed quadrant + margin
      if (q.x * q.x + q.y * q.y < 0.25 * 0.25) continue;  // singular corner
    } else {
      q = {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
      if (p.regularity == Regularity::interface_aligned && std::abs(q.x - 0.5) < 0.1) continue;
    }
    ++accepted;
    auto u = [&](double x, double y) { return p.u({x, y}); };
    double uxx = (u(q.x + fd_h, q.y) - 2.0 * u(q.x, q.y) + u(q.x - fd_h, q.y)) / (fd_h * fd_h);
    double uyy = (u(q.x, q.y + fd_h) - 2.0 * u(q.x, q.y) + u(q.x, q.y - fd_h)) / (fd_h * fd_h);
    double uxy = (u(q.x + fd_h, q.y + fd_h) - u(q.x + fd_h, q.y - fd_h) -
                  u(q.x - fd_h, q.y + fd_h) + u(q.x - fd_h, q.y - fd_h)) /
                 (4.0 * fd_h * fd_h);
    Mat2 a = p.coeff_at(q);
    double lhs = -(a.xx * uxx + 2.0 * a.xy * uxy + a.yy * uyy);
    double rhs = p.f(q);
    require(std::abs(lhs - rhs) <= tol * (1.0 + std::abs(rhs)),
            "check_pde_consistency: residual too large for problem '" + p.name + "'");
  }
}

struct ErrorReport {
  double err_aw = 0.0;
  double err_l2 = 0.0;
};

/// Energy and interior-L2 errors of a plain WG solution against the exact
/// solution; projections and the L2 integral run at an elevated quadrature.
inline ErrorReport compute_errors(const WgSystem& sys, const Problem& problem,
                                  const std::vector<double>& u_full, ProjectionQuad err_quad) {
  require(problem.has_exact(), "compute_errors: problem has no exact solution");
  ErrorReport rep;
  auto q = project_Qh(sys, problem.u, err_quad);
  std::vector<double> e(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) e[i] = q[i] - u_full[i];
  rep.err_aw = norm_aw(sys, e);

  const Mesh& mesh = *sys.mesh;
  const WgSpace& space = *sys.space;
  int degree = err_quad.degree < 0 ? sys.quad_degree + 2 : err_quad.degree;
  double l2 = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CellBasis basis(mesh.cell_centroid[c], mesh.cell_diameter[c], space.k);
    auto rule = neural_rule(mesh.cell_polygon(c), err_quad.subdivisions, degree);
    for (std::size_t p = 0; p < rule.points.size(); ++p) {
      double uh = 0.0;
      for (int i = 0; i < space.n_cell_basis; ++i)
        uh += u_full[space.cell_offset(c) + i] * basis.eval(i, rule.points[p]);
      double diff = problem.u(rule.points[p]) - uh;
      l2 += rule.weights[p] * diff * diff;
    }
  }
  rep.err_l2 = std::sqrt(l2);
  return rep;
}

struct RateRow {
  double h = 0.0;
  int dofs = 0;
  double err_aw = 0.0;
  double err_l2 = 0.0;
  double eoc_aw = 0.0;  // 0 in the first row
  double eoc_l2 = 0.0;
};

inline double eoc(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

/// Baseline rate study over n = base_n * 2^level.
inline std::vector<RateRow> convergence_study(const Problem& problem, int k, int base_n,
                                              int levels, CellKind kind,
                                              SolverConfig solver = {},
                                              ProjectionQuad err_quad = {-1, 2, 2},
                                              int quad_degree = -1) {
  std::vector<RateRow> rows;
  for (int lvl = 0; lvl < levels; ++lvl) {
    int n = base_n << lvl;
    Mesh mesh = problem.make_mesh(n, kind);
    WgSpace space(mesh, k);
    auto sys = assemble_system(mesh, space, problem.coefficients(mesh), problem.f, quad_degree);
    auto red = apply_dirichlet(sys, problem.g, err_quad);
    auto sol = wg_solve(sys, red, solver);
    auto err = compute_errors(sys, problem, sol.u.coeffs, err_quad);
    RateRow row;
    row.h = mesh.h;
    row.dofs = space.n_dofs;
    row.err_aw = err.err_aw;
    row.err_l2 = err.err_l2;
    if (!rows.empty()) {
      row.eoc_aw = eoc(rows.back().err_aw, row.err_aw, rows.back().h, row.h);
      row.eoc_l2 = eoc(rows.back().err_l2, row.err_l2, rows.back().h, row.h);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace wg
