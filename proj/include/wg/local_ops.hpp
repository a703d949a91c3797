#pragma once

#include "wg/dense.hpp"
#include "wg/quadrature.hpp"
#include "wg/space.hpp"

namespace wg {

/// Per-cell constant symmetric coefficient, one 2x2 SPD matrix per cell.
struct CoefficientField {
  std::vector<Mat2> cell_coeff;

  static CoefficientField identity(const Mesh& m) {
    CoefficientField f;
    f.cell_coeff.assign(m.n_cells(), Mat2::identity());
    return f;
  }

  template <typename F>
  static CoefficientField from_function(const Mesh& m, F&& at_centroid) {
    CoefficientField f;
    f.cell_coeff.reserve(m.n_cells());
    for (int c = 0; c < m.n_cells(); ++c) f.cell_coeff.push_back(at_centroid(m.cell_centroid[c]));
    return f;
  }

  void validate(double eig_min = 1e-12) const {
    for (const auto& a : cell_coeff)
      require(a.is_spd(eig_min), "CoefficientField: cell coefficient not SPD");
  }
};

/// Element matrices of one cell: the weak-gradient map G (local dofs to
/// [P_{k-1}]^2 coefficients), the stabilizer S, the gradient part K = G^T W G
/// with W the a-weighted vector mass, and the interior P_k mass for
/// projections and L2 norms.
struct LocalOperator {
  DenseMatrix g;
  DenseMatrix s;
  DenseMatrix k;
  DenseMatrix weighted_vec_mass;  // 2*nvb x 2*nvb
  DenseMatrix mass_km1;           // nvb x nvb
  DenseMatrix mass_k;             // ncb x ncb
};

inline DenseMatrix cell_mass_matrix(const CellBasis& basis, const QuadratureRule& rule) {
  DenseMatrix m(basis.count, basis.count);
  std::vector<double> vals(basis.count);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    for (int i = 0; i < basis.count; ++i) vals[i] = basis.eval(i, rule.points[q]);
    for (int i = 0; i < basis.count; ++i)
      for (int j = 0; j <= i; ++j) m(i, j) += rule.weights[q] * vals[i] * vals[j];
  }
  for (int i = 0; i < basis.count; ++i)
    for (int j = i + 1; j < basis.count; ++j) m(i, j) = m(j, i);
  return m;
}

inline DenseMatrix weighted_vector_mass(const DenseMatrix& mass_km1, Mat2 a) {
  int nvb = mass_km1.rows;
  DenseMatrix w(2 * nvb, 2 * nvb);
  for (int i = 0; i < nvb; ++i)
    for (int j = 0; j < nvb; ++j) {
      double m = mass_km1(i, j);
      w(i, j) = a.xx * m;
      w(i, j + nvb) = a.xy * m;
      w(i + nvb, j) = a.xy * m;
      w(i + nvb, j + nvb) = a.yy * m;
    }
  return w;
}

/// The defining relation of the discrete weak gradient,
///   (grad_w v, q)_T = -(v0, div q)_T + <vb, q.n>_{dT},
/// assembled as B and solved against the [P_{k-1}]^2 mass.
inline DenseMatrix weak_gradient_matrix(const Mesh& mesh, const WgSpace& space, int c,
                                        const CellBasis& cell_basis, const CellBasis& grad_basis,
                                        const DenseMatrix& mass_km1, int quad_degree) {
  int nvb = grad_basis.count;
  int ncb = space.n_cell_basis;
  int neb = space.n_edge_basis;
  int n_seg = static_cast<int>(mesh.cells[c].size());
  int nloc = space.n_local(c);

  DenseMatrix b(2 * nvb, nloc);

  // Interior dofs: -(m_j, div q)_T.
  auto vol = polygon_rule(mesh.cell_polygon(c), quad_degree);
  for (std::size_t q = 0; q < vol.points.size(); ++q) {
    Vec2 p = vol.points[q];
    double w = vol.weights[q];
    for (int i = 0; i < nvb; ++i) {
      Vec2 dg = grad_basis.grad(i, p);
      for (int j = 0; j < ncb; ++j) {
        double mj = cell_basis.eval(j, p);
        b(i, j) -= w * mj * dg.x;          // q = (m_i, 0), div q = dx m_i
        b(i + nvb, j) -= w * mj * dg.y;    // q = (0, m_i), div q = dy m_i
      }
    }
  }

  // Edge dofs: <t^l, q.n>_e with the outward normal of the cell traversal.
  const auto& cell = mesh.cells[c];
  for (int s = 0; s < n_seg; ++s) {
    Vec2 pa = mesh.vertices[cell[s]];
    Vec2 pb = mesh.vertices[cell[(s + 1) % n_seg]];
    Vec2 tangent = pb - pa;
    double len = norm(tangent);
    Vec2 nrm{tangent.y / len, -tangent.x / len};
    const Edge& edge = mesh.edges[mesh.cell_edges[c][s]];
    EdgeFrame frame(mesh.vertices[edge.v0], mesh.vertices[edge.v1]);
    auto er = edge_rule(pa, pb, quad_degree);
    int col0 = ncb + s * neb;
    for (std::size_t q = 0; q < er.points.size(); ++q) {
      Vec2 p = er.points[q];
      double w = er.weights[q];
      double t = frame.param(p);
      for (int i = 0; i < nvb; ++i) {
        double mi = grad_basis.eval(i, p);
        for (int l = 0; l < neb; ++l) {
          double tb = edge_basis_eval(l, t);
          b(i, col0 + l) += w * tb * mi * nrm.x;
          b(i + nvb, col0 + l) += w * tb * mi * nrm.y;
        }
      }
    }
  }

  CholeskyFactor mass(mass_km1);
  DenseMatrix g(2 * nvb, nloc);
  std::vector<double> rhs(nvb);
  for (int j = 0; j < nloc; ++j) {
    for (int blk = 0; blk < 2; ++blk) {
      for (int i = 0; i < nvb; ++i) rhs[i] = b(i + blk * nvb, j);
      auto sol = mass.solve(rhs);
      for (int i = 0; i < nvb; ++i) g(i + blk * nvb, j) = sol[i];
    }
  }
  return g;
}

/// Stabilizer s_T(u, v) = h_T^{-1} <u0 - ub, v0 - vb>_{dT}.
inline DenseMatrix stabilizer_matrix(const Mesh& mesh, const WgSpace& space, int c,
                                     const CellBasis& cell_basis, int quad_degree) {
  int ncb = space.n_cell_basis;
  int neb = space.n_edge_basis;
  int n_seg = static_cast<int>(mesh.cells[c].size());
  int nloc = space.n_local(c);
  double inv_h = 1.0 / mesh.cell_diameter[c];

  DenseMatrix s(nloc, nloc);
  const auto& cell = mesh.cells[c];
  std::vector<double> jump(nloc);
  for (int seg = 0; seg < n_seg; ++seg) {
    Vec2 pa = mesh.vertices[cell[seg]];
    Vec2 pb = mesh.vertices[cell[(seg + 1) % n_seg]];
    const Edge& edge = mesh.edges[mesh.cell_edges[c][seg]];
    EdgeFrame frame(mesh.vertices[edge.v0], mesh.vertices[edge.v1]);
    auto er = edge_rule(pa, pb, quad_degree);
    int col0 = ncb + seg * neb;
    for (std::size_t q = 0; q < er.points.size(); ++q) {
      Vec2 p = er.points[q];
      double w = er.weights[q] * inv_h;
      double t = frame.param(p);
      std::fill(jump.begin(), jump.end(), 0.0);
      for (int j = 0; j < ncb; ++j) jump[j] = cell_basis.eval(j, p);
      for (int l = 0; l < neb; ++l) jump[col0 + l] = -edge_basis_eval(l, t);
      for (int i = 0; i < nloc; ++i) {
        if (jump[i] == 0.0) continue;
        for (int j = 0; j <= i; ++j) s(i, j) += w * jump[i] * jump[j];
      }
    }
  }
  for (int i = 0; i < nloc; ++i)
    for (int j = i + 1; j < nloc; ++j) s(i, j) = s(j, i);
  return s;
}

inline LocalOperator local_stiffness(const Mesh& mesh, const WgSpace& space, int c, Mat2 a_cell,
                                     int quad_degree) {
  LocalOperator op;
  CellBasis cell_basis(mesh.cell_centroid[c], mesh.cell_diameter[c], space.k);
  CellBasis grad_basis(mesh.cell_centroid[c], mesh.cell_diameter[c], space.k - 1);
  auto vol = polygon_rule(mesh.cell_polygon(c), quad_degree);
  op.mass_k = cell_mass_matrix(cell_basis, vol);
  op.mass_km1 = cell_mass_matrix(grad_basis, vol);
  op.weighted_vec_mass = weighted_vector_mass(op.mass_km1, a_cell);
  op.g = weak_gradient_matrix(mesh, space, c, cell_basis, grad_basis, op.mass_km1, quad_degree);
  op.s = stabilizer_matrix(mesh, space, c, cell_basis, quad_degree);
  op.k = matmul(op.g.transposed(), matmul(op.weighted_vec_mass, op.g));
  return op;
}

}  // namespace wg
