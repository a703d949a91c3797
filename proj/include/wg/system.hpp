#pragma once

#include <functional>

#include "wg/local_ops.hpp"
#include "wg/sparse.hpp"

namespace wg {

using ScalarField = std::function<double(Vec2)>;

struct SolverConfig {
  double rel_tol = 1e-10;
  int max_iter_factor = 10;
  Preconditioner precond = Preconditioner::jacobi;
};

/// Assembled WG discretization: cached element operators, the full symmetric
/// matrix of a_w over all dofs (boundary included), and the load vector
/// b_i = (f, (basis_i)_0) supported on interior dofs.
struct WgSystem {
  const Mesh* mesh = nullptr;
  const WgSpace* space = nullptr;
  CoefficientField coeff;
  int quad_degree = 0;
  std::vector<LocalOperator> local;
  SparseSymMatrix a_full;
  std::vector<double> load;

  int n_dofs() const { return space->n_dofs; }
};

inline WgSystem assemble_system(const Mesh& mesh, const WgSpace& space,
                                const CoefficientField& coeff, const ScalarField& f,
                                int quad_degree = -1) {
  require(space.mesh == &mesh, "assemble_system: space/mesh mismatch");
  require(static_cast<int>(coeff.cell_coeff.size()) == mesh.n_cells(),
          "assemble_system: coefficient field size mismatch");
  coeff.validate();

  WgSystem sys;
  sys.mesh = &mesh;
  sys.space = &space;
  sys.coeff = coeff;
  sys.quad_degree = quad_degree < 0 ? 2 * space.k + 2 : quad_degree;

  sys.local.reserve(mesh.n_cells());
  std::vector<Triplet> trip;
  sys.load.assign(space.n_dofs, 0.0);
  // Fixed cell order keeps repeated assemblies bit-stable.
  for (int c = 0; c < mesh.n_cells(); ++c) {
    sys.local.push_back(local_stiffness(mesh, space, c, coeff.cell_coeff[c], sys.quad_degree));
    const LocalOperator& op = sys.local.back();
    auto dofs = space.cell_dofs(c);
    int nloc = static_cast<int>(dofs.size());
    for (int i = 0; i < nloc; ++i)
      for (int j = 0; j < nloc; ++j) {
        double v = op.k(i, j) + op.s(i, j);
        if (v != 0.0) trip.push_back({dofs[i], dofs[j], v});
      }
    if (f) {
      CellBasis basis(mesh.cell_centroid[c], mesh.cell_diameter[c], space.k);
      auto vol = polygon_rule(mesh.cell_polygon(c), sys.quad_degree);
      for (std::size_t q = 0; q < vol.points.size(); ++q) {
        double wf = vol.weights[q] * f(vol.points[q]);
        for (int i = 0; i < space.n_cell_basis; ++i)
          sys.load[dofs[i]] += wf * basis.eval(i, vol.points[q]);
      }
    }
  }
  sys.a_full = SparseSymMatrix::from_triplets(space.n_dofs, std::move(trip));
  return sys;
}

/// a_w(u, v) accumulated termwise from the element operators. Passing an
/// override coefficient evaluates the same quadratic form under a different
/// a; norm_1h is exactly this with the identity.
inline double energy_product(const WgSystem& sys, const std::vector<double>& u,
                             const std::vector<double>& v,
                             const CoefficientField* override_coeff = nullptr) {
  const Mesh& mesh = *sys.mesh;
  const WgSpace& space = *sys.space;
  double total = 0.0;
  std::vector<double> ul, vl, gu, gv;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const LocalOperator& op = sys.local[c];
    auto dofs = space.cell_dofs(c);
    int nloc = static_cast<int>(dofs.size());
    ul.resize(nloc);
    vl.resize(nloc);
    for (int i = 0; i < nloc; ++i) {
      ul[i] = u[dofs[i]];
      vl[i] = v[dofs[i]];
    }
    gu = matvec(op.g, ul);
    gv = matvec(op.g, vl);
    const DenseMatrix& w = override_coeff
                               ? weighted_vector_mass(op.mass_km1, override_coeff->cell_coeff[c])
                               : op.weighted_vec_mass;
    auto wgv = matvec(w, gv);
    for (std::size_t i = 0; i < gu.size(); ++i) total += gu[i] * wgv[i];
    auto sv = matvec(op.s, vl);
    for (int i = 0; i < nloc; ++i) total += ul[i] * sv[i];
  }
  return total;
}

inline double norm_aw(const WgSystem& sys, const std::vector<double>& v) {
  return std::sqrt(std::max(0.0, energy_product(sys, v, v)));
}

inline double norm_1h(const WgSystem& sys, const std::vector<double>& v) {
  CoefficientField id = CoefficientField::identity(*sys.mesh);
  return std::sqrt(std::max(0.0, energy_product(sys, v, v, &id)));
}

inline double inner_aw(const WgSystem& sys, const std::vector<double>& u,
                       const std::vector<double>& v) {
  return energy_product(sys, u, v);
}

inline double l2_norm_interior(const WgSystem& sys, const std::vector<double>& v) {
  const WgSpace& space = *sys.space;
  double total = 0.0;
  int ncb = space.n_cell_basis;
  std::vector<double> vl(ncb);
  for (int c = 0; c < sys.mesh->n_cells(); ++c) {
    for (int i = 0; i < ncb; ++i) vl[i] = v[space.cell_offset(c) + i];
    auto mv = matvec(sys.local[c].mass_k, vl);
    for (int i = 0; i < ncb; ++i) total += vl[i] * mv[i];
  }
  return std::sqrt(std::max(0.0, total));
}

struct ProjectionQuad {
  int degree = -1;       // -1: 2k+2
  int subdivisions = 1;  // volume fan subdivisions for non-smooth integrands
  int edge_panels = 1;
};

/// L2 projections Q_h u = {Q_0 u, Q_b u} over every cell and edge.
inline std::vector<double> project_Qh(const WgSystem& sys, const ScalarField& u,
                                      ProjectionQuad quad = {}) {
  const Mesh& mesh = *sys.mesh;
  const WgSpace& space = *sys.space;
  int degree = quad.degree < 0 ? sys.quad_degree : quad.degree;
  std::vector<double> out(space.n_dofs, 0.0);

  for (int c = 0; c < mesh.n_cells(); ++c) {
    CellBasis basis(mesh.cell_centroid[c], mesh.cell_diameter[c], space.k);
    auto rule = neural_rule(mesh.cell_polygon(c), quad.subdivisions, degree);
    std::vector<double> rhs(space.n_cell_basis, 0.0);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      double wu = rule.weights[q] * u(rule.points[q]);
      for (int i = 0; i < space.n_cell_basis; ++i) rhs[i] += wu * basis.eval(i, rule.points[q]);
    }
    auto c_mass = quad.subdivisions == 1 && degree == sys.quad_degree
                      ? sys.local[c].mass_k
                      : cell_mass_matrix(basis, polygon_rule(mesh.cell_polygon(c), degree));
    auto sol = CholeskyFactor(c_mass).solve(rhs);
    for (int i = 0; i < space.n_cell_basis; ++i) out[space.cell_offset(c) + i] = sol[i];
  }

  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    EdgeFrame frame(mesh.vertices[edge.v0], mesh.vertices[edge.v1]);
    auto rule = edge_panel_rule(frame.a, frame.b, quad.edge_panels, degree);
    int neb = space.n_edge_basis;
    DenseMatrix mass(neb, neb);
    std::vector<double> rhs(neb, 0.0);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      double t = frame.param(rule.points[q]);
      double w = rule.weights[q];
      double wu = w * u(rule.points[q]);
      for (int i = 0; i < neb; ++i) {
        rhs[i] += wu * edge_basis_eval(i, t);
        for (int j = 0; j <= i; ++j)
          mass(i, j) += w * edge_basis_eval(i, t) * edge_basis_eval(j, t);
      }
    }
    for (int i = 0; i < neb; ++i)
      for (int j = i + 1; j < neb; ++j) mass(i, j) = mass(j, i);
    auto sol = CholeskyFactor(mass).solve(rhs);
    for (int i = 0; i < neb; ++i) out[space.edge_offset(e) + i] = sol[i];
  }
  return out;
}

using VectorField = std::function<Vec2(Vec2)>;

/// Componentwise L2 projection onto [P_{k-1}(T)]^2; coefficients in the
/// scaled-monomial basis, x-block first.
inline std::vector<double> project_Qh_vec(const WgSystem& sys, int c, const VectorField& grad,
                                          ProjectionQuad quad = {}) {
  const Mesh& mesh = *sys.mesh;
  int degree = quad.degree < 0 ? sys.quad_degree : quad.degree;
  CellBasis basis(mesh.cell_centroid[c], mesh.cell_diameter[c], sys.space->k - 1);
  auto rule = neural_rule(mesh.cell_polygon(c), quad.subdivisions, degree);
  int nvb = basis.count;
  std::vector<double> rx(nvb, 0.0), ry(nvb, 0.0);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    Vec2 gv = grad(rule.points[q]);
    double w = rule.weights[q];
    for (int i = 0; i < nvb; ++i) {
      double m = basis.eval(i, rule.points[q]);
      rx[i] += w * gv.x * m;
      ry[i] += w * gv.y * m;
    }
  }
  CholeskyFactor mass(sys.local[c].mass_km1);
  auto cx = mass.solve(rx);
  auto cy = mass.solve(ry);
  std::vector<double> out(2 * nvb);
  for (int i = 0; i < nvb; ++i) {
    out[i] = cx[i];
    out[i + nvb] = cy[i];
  }
  return out;
}

/// Homogeneous-boundary reduction with the boundary edge dofs pinned to
/// Q_b g and eliminated from the system.
struct DirichletReduction {
  std::vector<int> free_dofs;
  std::vector<int> full_to_reduced;  // -1 for constrained dofs
  std::vector<double> bc_values;     // full length, zero on free dofs
  SparseSymMatrix a_reduced;
  std::vector<double> b_reduced;

  std::vector<double> embed(const std::vector<double>& x_red) const {
    std::vector<double> full = bc_values;
    for (std::size_t i = 0; i < free_dofs.size(); ++i) full[free_dofs[i]] = x_red[i];
    return full;
  }

  std::vector<double> restrict_to_free(const std::vector<double>& full) const {
    std::vector<double> r(free_dofs.size());
    for (std::size_t i = 0; i < free_dofs.size(); ++i) r[i] = full[free_dofs[i]];
    return r;
  }
};

inline DirichletReduction apply_dirichlet(const WgSystem& sys, const ScalarField& g,
                                          ProjectionQuad quad = {}) {
  const Mesh& mesh = *sys.mesh;
  const WgSpace& space = *sys.space;
  DirichletReduction red;
  red.bc_values.assign(space.n_dofs, 0.0);
  auto boundary = space.boundary_dof_mask();

  if (g) {
    int degree = quad.degree < 0 ? sys.quad_degree : quad.degree;
    for (int e = 0; e < mesh.n_edges(); ++e) {
      if (!mesh.edges[e].boundary) continue;
      const Edge& edge = mesh.edges[e];
      EdgeFrame frame(mesh.vertices[edge.v0], mesh.vertices[edge.v1]);
      auto rule = edge_panel_rule(frame.a, frame.b, quad.edge_panels, degree);
      int neb = space.n_edge_basis;
      DenseMatrix mass(neb, neb);
      std::vector<double> rhs(neb, 0.0);
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        double t = frame.param(rule.points[q]);
        double w = rule.weights[q];
        double wg = w * g(rule.points[q]);
        for (int i = 0; i < neb; ++i) {
          rhs[i] += wg * edge_basis_eval(i, t);
          for (int j = 0; j <= i; ++j)
            mass(i, j) += w * edge_basis_eval(i, t) * edge_basis_eval(j, t);
        }
      }
      for (int i = 0; i < neb; ++i)
        for (int j = i + 1; j < neb; ++j) mass(i, j) = mass(j, i);
      auto sol = CholeskyFactor(mass).solve(rhs);
      for (int i = 0; i < neb; ++i) red.bc_values[space.edge_offset(e) + i] = sol[i];
    }
  }

  red.full_to_reduced.assign(space.n_dofs, -1);
  for (int i = 0; i < space.n_dofs; ++i)
    if (!boundary[i]) {
      red.full_to_reduced[i] = static_cast<int>(red.free_dofs.size());
      red.free_dofs.push_back(i);
    }

  std::vector<Triplet> trip;
  const SparseSymMatrix& a = sys.a_full;
  red.b_reduced.resize(red.free_dofs.size());
  for (std::size_t i = 0; i < red.free_dofs.size(); ++i) {
    int row = red.free_dofs[i];
    double b = sys.load[row];
    for (int p = a.row_ptr[row]; p < a.row_ptr[row + 1]; ++p) {
      int col = a.col_idx[p];
      int rc = red.full_to_reduced[col];
      if (rc >= 0)
        trip.push_back({static_cast<int>(i), rc, a.vals[p]});
      else
        b -= a.vals[p] * red.bc_values[col];
    }
    red.b_reduced[i] = b;
  }
  red.a_reduced = SparseSymMatrix::from_triplets(static_cast<int>(red.free_dofs.size()),
                                                 std::move(trip));
  return red;
}

struct WgSolveResult {
  WeakFunction u;  // full coefficient vector, boundary data embedded
  CgResult cg;
};

inline WgSolveResult wg_solve(const WgSystem&, const DirichletReduction& red,
                              SolverConfig solver = {}) {
  WgSolveResult out;
  out.cg = cg_solve(red.a_reduced, red.b_reduced, solver.rel_tol,
                    solver.max_iter_factor * red.a_reduced.n + 50, solver.precond);
  out.u = WeakFunction(red.embed(out.cg.x));
  return out;
}

/// Consistency functional of the error analysis: ell_u(v) = a_w(Q_h u, v) - (f, v0)
/// for v in V_h^0, returned as a vector over the free dofs.
inline std::vector<double> consistency_vector(const WgSystem& sys, const DirichletReduction& red,
                                              const std::vector<double>& q_coeffs) {
  auto aq = sys.a_full.apply(q_coeffs);
  std::vector<double> ell(red.free_dofs.size());
  for (std::size_t i = 0; i < red.free_dofs.size(); ++i) {
    int d = red.free_dofs[i];
    ell[i] = aq[d] - sys.load[d];
  }
  return ell;
}

inline double consistency_functional(const WgSystem& sys, const std::vector<double>& q_coeffs,
                                     const std::vector<double>& v_full) {
  auto aq = sys.a_full.apply(q_coeffs);
  double s = 0.0;
  for (int i = 0; i < sys.n_dofs(); ++i) s += (aq[i] - sys.load[i]) * v_full[i];
  return s;
}

/// Riesz dual norm sqrt(ell^T A^{-1} ell) over the reduced space.
inline double dual_norm_consistency(const WgSystem& sys, const DirichletReduction& red,
                                    const std::vector<double>& q_coeffs,
                                    SolverConfig solver = {}) {
  auto ell = consistency_vector(sys, red, q_coeffs);
  if (norm2(ell) == 0.0) return 0.0;
  auto sol = cg_solve(red.a_reduced, ell, solver.rel_tol,
                      solver.max_iter_factor * red.a_reduced.n + 50, solver.precond);
  return std::sqrt(std::max(0.0, dot(ell, sol.x)));
}

}  // namespace wg
