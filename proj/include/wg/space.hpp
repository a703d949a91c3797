#pragma once

#include "wg/basis.hpp"
#include "wg/mesh.hpp"

namespace wg {

/// Dof layout of the weak Galerkin space V_h: one P_k block per cell interior
/// followed by one P_k block per edge. Order k is restricted to {1, 2}; the
/// discrete weak gradient lives in [P_{k-1}]^2 and degenerates at k = 0.
struct WgSpace {
  const Mesh* mesh = nullptr;
  int k = 1;
  int n_cell_basis = 0;  // (k+1)(k+2)/2
  int n_edge_basis = 0;  // k+1
  int n_dofs = 0;

  WgSpace() = default;
  WgSpace(const Mesh& m, int order) : mesh(&m), k(order) {
    require(k >= 1 && k <= 2, "WgSpace: k must be 1 or 2");
    n_cell_basis = poly_space_dim(k);
    n_edge_basis = k + 1;
    n_dofs = m.n_cells() * n_cell_basis + m.n_edges() * n_edge_basis;
  }

  int cell_offset(int c) const { return c * n_cell_basis; }
  int edge_offset(int e) const { return mesh->n_cells() * n_cell_basis + e * n_edge_basis; }

  int n_local(int c) const {
    return n_cell_basis + static_cast<int>(mesh->cells[c].size()) * n_edge_basis;
  }

  /// Local-to-global map: interior block, then the edge blocks in cell
  /// traversal order.
  std::vector<int> cell_dofs(int c) const {
    std::vector<int> dofs;
    dofs.reserve(n_local(c));
    for (int i = 0; i < n_cell_basis; ++i) dofs.push_back(cell_offset(c) + i);
    for (int e : mesh->cell_edges[c])
      for (int j = 0; j < n_edge_basis; ++j) dofs.push_back(edge_offset(e) + j);
    return dofs;
  }

  std::vector<char> boundary_dof_mask() const {
    std::vector<char> mask(n_dofs, 0);
    for (int e = 0; e < mesh->n_edges(); ++e)
      if (mesh->edges[e].boundary)
        for (int j = 0; j < n_edge_basis; ++j) mask[edge_offset(e) + j] = 1;
    return mask;
  }
};

/// Coefficient vector over the WgSpace dofs; the semantic pair v = {v0, vb}.
struct WeakFunction {
  std::vector<double> coeffs;

  WeakFunction() = default;
  explicit WeakFunction(int n) : coeffs(n, 0.0) {}
  explicit WeakFunction(std::vector<double> c) : coeffs(std::move(c)) {}

  int size() const { return static_cast<int>(coeffs.size()); }
  double& operator[](int i) { return coeffs[i]; }
  double operator[](int i) const { return coeffs[i]; }
};

}  // namespace wg
