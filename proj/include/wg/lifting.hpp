#pragma once

#include "wg/neural.hpp"
#include "wg/system.hpp"

namespace wg {

enum class LiftMode { projected, generalized };

inline const char* to_string(LiftMode m) {
  return m == LiftMode::projected ? "projected" : "generalized";
}

struct NeuralQuadConfig {
  int degree = 10;
  int subdivisions = 2;
};

/// Everything needed to take a point-evaluable candidate into the discrete
/// system under a fixed quadrature: cached rules, the per-cell map from
/// point values to weak-gradient coefficients (generalized mode), and the
/// per-cell/per-edge L2 projection maps (projected mode).
struct LiftContext {
  const WgSystem* sys = nullptr;
  NeuralQuadConfig cfg;

  std::vector<Vec2> points;  // cell volume points, then edge points
  std::vector<double> point_weights;
  std::vector<int> cell_pt_offset;  // into points, per cell
  std::vector<int> cell_pt_count;
  std::vector<int> edge_pt_offset;  // into points, per edge
  std::vector<int> edge_pt_count;
  int n_volume_points = 0;

  std::vector<std::vector<int>> cell_point_ids;  // volume ids, then segment edge ids
  std::vector<DenseMatrix> grad_map;             // 2*nvb x |cell_point_ids[c]|
  std::vector<DenseMatrix> q0_map;               // ncb x n_volume_points(c)
  std::vector<DenseMatrix> qb_map;               // neb x n_edge_points(e)
};

inline LiftContext make_lift_context(const WgSystem& sys, NeuralQuadConfig cfg) {
  const Mesh& mesh = *sys.mesh;
  const WgSpace& space = *sys.space;
  LiftContext ctx;
  ctx.sys = &sys;
  ctx.cfg = cfg;

  std::vector<QuadratureRule> cell_rules(mesh.n_cells());
  std::vector<QuadratureRule> edge_rules(mesh.n_edges());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    cell_rules[c] = neural_rule(mesh.cell_polygon(c), cfg.subdivisions, cfg.degree);
    ctx.cell_pt_offset.push_back(static_cast<int>(ctx.points.size()));
    ctx.cell_pt_count.push_back(static_cast<int>(cell_rules[c].points.size()));
    for (std::size_t q = 0; q < cell_rules[c].points.size(); ++q) {
      ctx.points.push_back(cell_rules[c].points[q]);
      ctx.point_weights.push_back(cell_rules[c].weights[q]);
    }
  }
  ctx.n_volume_points = static_cast<int>(ctx.points.size());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    edge_rules[e] = edge_panel_rule(mesh.vertices[edge.v0], mesh.vertices[edge.v1],
                                    cfg.subdivisions, cfg.degree);
    ctx.edge_pt_offset.push_back(static_cast<int>(ctx.points.size()));
    ctx.edge_pt_count.push_back(static_cast<int>(edge_rules[e].points.size()));
    for (std::size_t q = 0; q < edge_rules[e].points.size(); ++q) {
      ctx.points.push_back(edge_rules[e].points[q]);
      ctx.point_weights.push_back(edge_rules[e].weights[q]);
    }
  }

  ctx.cell_point_ids.resize(mesh.n_cells());
  ctx.grad_map.resize(mesh.n_cells());
  ctx.q0_map.resize(mesh.n_cells());
  ctx.qb_map.resize(mesh.n_edges());

  for (int c = 0; c < mesh.n_cells(); ++c) {
    CellBasis cell_basis(mesh.cell_centroid[c], mesh.cell_diameter[c], space.k);
    CellBasis grad_basis(mesh.cell_centroid[c], mesh.cell_diameter[c], space.k - 1);
    int nvb = grad_basis.count;
    int nvol = ctx.cell_pt_count[c];
    const auto& cell = mesh.cells[c];
    int n_seg = static_cast<int>(cell.size());

    auto& ids = ctx.cell_point_ids[c];
    for (int q = 0; q < nvol; ++q) ids.push_back(ctx.cell_pt_offset[c] + q);
    for (int s = 0; s < n_seg; ++s) {
      int e = mesh.cell_edges[c][s];
      for (int q = 0; q < ctx.edge_pt_count[e]; ++q) ids.push_back(ctx.edge_pt_offset[e] + q);
    }

    // Weak gradient of a point-valued weak function {n|_T, n|_e}: the moment
    // matrix against -(., div q)_T and <., q.n>_dT, premultiplied by the
    // inverse vector mass.
    DenseMatrix b(2 * nvb, static_cast<int>(ids.size()));
    for (int q = 0; q < nvol; ++q) {
      Vec2 p = ctx.points[ctx.cell_pt_offset[c] + q];
      double w = ctx.point_weights[ctx.cell_pt_offset[c] + q];
      for (int i = 0; i < nvb; ++i) {
        Vec2 dg = grad_basis.grad(i, p);
        b(i, q) -= w * dg.x;
        b(i + nvb, q) -= w * dg.y;
      }
    }
    int col = nvol;
    for (int s = 0; s < n_seg; ++s) {
      Vec2 pa = mesh.vertices[cell[s]];
      Vec2 pb = mesh.vertices[cell[(s + 1) % n_seg]];
      Vec2 tang = pb - pa;
      double len = norm(tang);
      Vec2 nrm{tang.y / len, -tang.x / len};
      int e = mesh.cell_edges[c][s];
      for (int q = 0; q < ctx.edge_pt_count[e]; ++q, ++col) {
        Vec2 p = ctx.points[ctx.edge_pt_offset[e] + q];
        double w = ctx.point_weights[ctx.edge_pt_offset[e] + q];
        for (int i = 0; i < nvb; ++i) {
          double mi = grad_basis.eval(i, p);
          b(i, col) += w * mi * nrm.x;
          b(i + nvb, col) += w * mi * nrm.y;
        }
      }
    }
    CholeskyFactor mass(sys.local[c].mass_km1);
    DenseMatrix g(2 * nvb, b.cols);
    std::vector<double> rhs(nvb);
    for (int j = 0; j < b.cols; ++j)
      for (int blk = 0; blk < 2; ++blk) {
        for (int i = 0; i < nvb; ++i) rhs[i] = b(i + blk * nvb, j);
        auto sol = mass.solve(rhs);
        for (int i = 0; i < nvb; ++i) g(i + blk * nvb, j) = sol[i];
      }
    ctx.grad_map[c] = std::move(g);

    // Q0 projection map: M_k^{-1} diag(w) [m_i(x_q)].
    DenseMatrix p0(space.n_cell_basis, nvol);
    for (int q = 0; q < nvol; ++q) {
      Vec2 p = ctx.points[ctx.cell_pt_offset[c] + q];
      double w = ctx.point_weights[ctx.cell_pt_offset[c] + q];
      for (int i = 0; i < space.n_cell_basis; ++i) p0(i, q) = w * cell_basis.eval(i, p);
    }
    CholeskyFactor mass_k(sys.local[c].mass_k);
    ctx.q0_map[c] = mass_k.solve_matrix(p0);
  }

  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    EdgeFrame frame(mesh.vertices[edge.v0], mesh.vertices[edge.v1]);
    int neb = space.n_edge_basis;
    int npts = ctx.edge_pt_count[e];
    DenseMatrix mass(neb, neb), moments(neb, npts);
    for (int q = 0; q < npts; ++q) {
      Vec2 p = ctx.points[ctx.edge_pt_offset[e] + q];
      double w = ctx.point_weights[ctx.edge_pt_offset[e] + q];
      double t = frame.param(p);
      for (int i = 0; i < neb; ++i) {
        moments(i, q) = w * edge_basis_eval(i, t);
        for (int j = 0; j <= i; ++j)
          mass(i, j) += w * edge_basis_eval(i, t) * edge_basis_eval(j, t);
      }
    }
    for (int i = 0; i < neb; ++i)
      for (int j = i + 1; j < neb; ++j) mass(i, j) = mass(j, i);
    ctx.qb_map[e] = CholeskyFactor(mass).solve_matrix(moments);
  }
  return ctx;
}

/// A candidate carried into the discrete system. Projected mode stores the
/// WG coefficient pair {Q_0 n, Q_b n}; generalized mode keeps the function
/// itself (its values at the context points) together with the per-cell
/// weak-gradient coefficients. Both are a_w-normalized on construction.
struct LiftedNeuralFunction {
  LiftMode mode = LiftMode::projected;
  double raw_aw_norm = 0.0;
  double scale = 1.0;  // 1 / raw_aw_norm
  std::function<double(Vec2)> evaluator;  // unscaled candidate

  std::vector<double> coeffs;                     // projected: full dof vector
  std::vector<std::vector<double>> grad_coeffs;   // generalized: per cell, 2*nvb
  std::vector<double> point_values;               // generalized: scaled values

  double eval_scaled(Vec2 p) const { return scale * evaluator(p); }
};

inline std::vector<double> gather_local(const LiftContext& ctx, int c,
                                        const std::vector<double>& y) {
  const auto& ids = ctx.cell_point_ids[c];
  std::vector<double> loc(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) loc[i] = y[ids[i]];
  return loc;
}

inline LiftedNeuralFunction lift(const LiftContext& ctx, const std::function<double(Vec2)>& n,
                                 LiftMode mode, double delta_norm = 1e-10) {
  const WgSystem& sys = *ctx.sys;
  const Mesh& mesh = *sys.mesh;
  const WgSpace& space = *sys.space;

  LiftedNeuralFunction lifted;
  lifted.mode = mode;
  lifted.evaluator = n;

  std::vector<double> y(ctx.points.size());
  for (std::size_t i = 0; i < ctx.points.size(); ++i) y[i] = n(ctx.points[i]);

  if (mode == LiftMode::projected) {
    std::vector<double> c_full(space.n_dofs, 0.0);
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const DenseMatrix& p0 = ctx.q0_map[c];
      for (int i = 0; i < p0.rows; ++i) {
        double s = 0.0;
        for (int q = 0; q < p0.cols; ++q) s += p0(i, q) * y[ctx.cell_pt_offset[c] + q];
        c_full[space.cell_offset(c) + i] = s;
      }
    }
    for (int e = 0; e < mesh.n_edges(); ++e) {
      if (mesh.edges[e].boundary) continue;  // membership in V_h^0
      const DenseMatrix& pb = ctx.qb_map[e];
      for (int i = 0; i < pb.rows; ++i) {
        double s = 0.0;
        for (int q = 0; q < pb.cols; ++q) s += pb(i, q) * y[ctx.edge_pt_offset[e] + q];
        c_full[space.edge_offset(e) + i] = s;
      }
    }
    lifted.raw_aw_norm = norm_aw(sys, c_full);
    require(lifted.raw_aw_norm > delta_norm, "lift: zero-energy candidate");
    lifted.scale = 1.0 / lifted.raw_aw_norm;
    for (double& v : c_full) v *= lifted.scale;
    lifted.coeffs = std::move(c_full);
    return lifted;
  }

  double energy = 0.0;
  lifted.grad_coeffs.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    auto loc = gather_local(ctx, c, y);
    auto g = matvec(ctx.grad_map[c], loc);
    auto wg = matvec(sys.local[c].weighted_vec_mass, g);
    for (std::size_t i = 0; i < g.size(); ++i) energy += g[i] * wg[i];
    lifted.grad_coeffs[c] = std::move(g);
  }
  // The interior trace and the edge value of the lifted function coincide by
  // construction, so no stabilizer energy appears here.
  lifted.raw_aw_norm = std::sqrt(std::max(0.0, energy));
  require(lifted.raw_aw_norm > delta_norm, "lift: zero-energy candidate");
  lifted.scale = 1.0 / lifted.raw_aw_norm;
  for (auto& g : lifted.grad_coeffs)
    for (double& v : g) v *= lifted.scale;
  lifted.point_values = std::move(y);
  for (double& v : lifted.point_values) v *= lifted.scale;
  return lifted;
}

/// Column of a_w(n-hat, basis_i) over all dofs. In generalized mode only the
/// gradient part contributes: the stabilizer couplings vanish identically.
inline std::vector<double> aw_column(const LiftContext& ctx, const LiftedNeuralFunction& lifted) {
  const WgSystem& sys = *ctx.sys;
  if (lifted.mode == LiftMode::projected) return sys.a_full.apply(lifted.coeffs);
  const WgSpace& space = *sys.space;
  std::vector<double> col(space.n_dofs, 0.0);
  for (int c = 0; c < sys.mesh->n_cells(); ++c) {
    auto wg = matvec(sys.local[c].weighted_vec_mass, lifted.grad_coeffs[c]);
    auto dofs = space.cell_dofs(c);
    const DenseMatrix& g = sys.local[c].g;
    for (int j = 0; j < g.cols; ++j) {
      double s = 0.0;
      for (int i = 0; i < g.rows; ++i) s += g(i, j) * wg[i];
      col[dofs[j]] += s;
    }
  }
  return col;
}

inline double aw_pair(const LiftContext& ctx, const LiftedNeuralFunction& a,
                      const LiftedNeuralFunction& b) {
  const WgSystem& sys = *ctx.sys;
  require(a.mode == b.mode, "aw_pair: mixed lifting modes");
  if (a.mode == LiftMode::projected) return dot(a.coeffs, sys.a_full.apply(b.coeffs));
  double s = 0.0;
  for (int c = 0; c < sys.mesh->n_cells(); ++c) {
    auto wg = matvec(sys.local[c].weighted_vec_mass, b.grad_coeffs[c]);
    for (std::size_t i = 0; i < wg.size(); ++i) s += a.grad_coeffs[c][i] * wg[i];
  }
  return s;
}

/// (f, n-hat_0): against Q_0 n under the assembly quadrature in projected
/// mode, against n itself under the context quadrature in generalized mode.
inline double f_moment(const LiftContext& ctx, const LiftedNeuralFunction& lifted,
                       const ScalarField& f) {
  const WgSystem& sys = *ctx.sys;
  if (lifted.mode == LiftMode::projected) return dot(sys.load, lifted.coeffs);
  double s = 0.0;
  for (int q = 0; q < ctx.n_volume_points; ++q)
    s += ctx.point_weights[q] * f(ctx.points[q]) * lifted.point_values[q];
  return s;
}

}  // namespace wg
