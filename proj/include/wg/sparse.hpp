#pragma once

#include <algorithm>
#include <tuple>

#include "wg/dense.hpp"

namespace wg {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row storage of a symmetric matrix; both triangles are
/// stored so the row-wise matvec needs no special casing.
struct SparseSymMatrix {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> vals;

  static SparseSymMatrix from_triplets(int n, std::vector<Triplet> trip) {
    std::sort(trip.begin(), trip.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    SparseSymMatrix m;
    m.n = n;
    m.row_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < trip.size();) {
      std::size_t j = i;
      double s = 0.0;
      while (j < trip.size() && trip[j].row == trip[i].row && trip[j].col == trip[i].col)
        s += trip[j++].value;
      require(trip[i].row >= 0 && trip[i].row < n && trip[i].col >= 0 && trip[i].col < n,
              "sparse: index out of range");
      m.col_idx.push_back(trip[i].col);
      m.vals.push_back(s);
      m.row_ptr[trip[i].row + 1]++;
      i = j;
    }
    for (int r = 0; r < n; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
  }

  double entry(int i, int j) const {
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
      if (col_idx[p] == j) return vals[p];
    return 0.0;
  }

  void matvec(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += vals[p] * x[col_idx[p]];
      y[i] = s;
    }
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y;
    matvec(x, y);
    return y;
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(n, 0.0);
    for (int i = 0; i < n; ++i) d[i] = entry(i, i);
    return d;
  }

  DenseMatrix to_dense() const {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) m(i, col_idx[p]) = vals[p];
    return m;
  }
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

enum class Preconditioner { none, jacobi };

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradients for SPD systems. Throws on non-finite
/// values; a failure to converge reports the achieved residual.
inline CgResult cg_solve(const SparseSymMatrix& a, const std::vector<double>& b,
                         double rel_tol = 1e-10, int max_iter = -1,
                         Preconditioner precond = Preconditioner::jacobi,
                         bool throw_on_maxiter = true) {
  int n = a.n;
  require(static_cast<int>(b.size()) == n, "cg_solve: size mismatch");
  if (max_iter < 0) max_iter = 10 * n + 50;
  CgResult res;
  res.x.assign(n, 0.0);
  double bnorm = norm2(b);
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  std::vector<double> inv_diag;
  if (precond == Preconditioner::jacobi) {
    inv_diag = a.diagonal();
    for (double& d : inv_diag) {
      require(d > 0.0, "cg_solve: non-positive diagonal entry");
      d = 1.0 / d;
    }
  }
  std::vector<double> r = b;
  std::vector<double> z(n), p(n), ap(n);
  auto apply_precond = [&](const std::vector<double>& v, std::vector<double>& out) {
    if (precond == Preconditioner::jacobi) {
      out.resize(n);
      for (int i = 0; i < n; ++i) out[i] = inv_diag[i] * v[i];
    } else {
      out = v;
    }
  };
  apply_precond(r, z);
  p = z;
  double rz = dot(r, z);
  double rnorm = norm2(r);
  for (int it = 0; it < max_iter; ++it) {
    if (rnorm / bnorm <= rel_tol) break;
    a.matvec(p, ap);
    double pap = dot(p, ap);
    require(std::isfinite(pap), "cg_solve: non-finite value encountered");
    require(pap > 0.0, "cg_solve: matrix not positive definite");
    double alpha = rz / pap;
    axpy(alpha, p, res.x);
    axpy(-alpha, ap, r);
    apply_precond(r, z);
    double rz_new = dot(r, z);
    double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = norm2(r);
    res.iterations = it + 1;
  }
  res.rel_residual = rnorm / bnorm;
  res.converged = res.rel_residual <= rel_tol;
  require(std::isfinite(res.rel_residual), "cg_solve: non-finite residual");
  if (!res.converged && throw_on_maxiter)
    throw std::runtime_error("cg_solve: max iterations exceeded, residual " +
                             std::to_string(res.rel_residual));
  return res;
}

/// Base SPD system bordered by a few dense enrichment columns:
/// [A B; B^T D] [x; alpha] = [b; g].
struct BorderedSystem {
  const SparseSymMatrix* a = nullptr;
  DenseMatrix b_cols;  // n x m
  DenseMatrix d;       // m x m
  std::vector<double> rhs;    // length n
  std::vector<double> g_rhs;  // length m

  int m() const { return d.rows; }
};

constexpr int kMaxBorderColumns = 16;

struct BorderedResult {
  std::vector<double> x;
  std::vector<double> alpha;        // zero for dropped columns
  std::vector<char> redundant;      // per column
  std::vector<double> schur_pivots; // pivot per column in elimination order
  double rel_residual = 0.0;        // full bordered system, kept columns
  int cg_iterations = 0;
};

/// Schur-complement solve: S = D - B^T A^{-1} B is formed with one tightly
/// converged CG solve per column. Columns whose pivot falls below
/// eps_factor * trace(D)/m lie in the span of the base space and are dropped.
inline BorderedResult bordered_solve(const BorderedSystem& sys, double rel_tol = 1e-10,
                                     double eps_factor = 1e-10) {
  const SparseSymMatrix& a = *sys.a;
  int n = a.n;
  int m = sys.m();
  require(m <= kMaxBorderColumns, "bordered_solve: too many enrichment columns");

  BorderedResult res;
  res.redundant.assign(m, 0);
  res.alpha.assign(m, 0.0);
  res.schur_pivots.assign(m, 0.0);

  auto x0_res = cg_solve(a, sys.rhs, rel_tol);
  res.cg_iterations += x0_res.iterations;
  if (m == 0) {
    res.x = std::move(x0_res.x);
    res.rel_residual = x0_res.rel_residual;
    return res;
  }

  // Inner solves are pushed well below the redundancy threshold so that the
  // Schur pivots reflect the columns, not the solver.
  double inner_tol = std::min(rel_tol, 1e-13);
  DenseMatrix y(n, m);
  std::vector<double> col(n);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) col[i] = sys.b_cols(i, j);
    auto yj = cg_solve(a, col, inner_tol, 40 * n + 50, Preconditioner::jacobi, false);
    res.cg_iterations += yj.iterations;
    for (int i = 0; i < n; ++i) y(i, j) = yj.x[i];
  }

  DenseMatrix schur(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      double s = sys.d(i, j);
      for (int r = 0; r < n; ++r) s -= sys.b_cols(r, i) * y(r, j);
      schur(i, j) = s;
      schur(j, i) = s;
    }

  double trace_d = 0.0;
  for (int i = 0; i < m; ++i) trace_d += sys.d(i, i);
  double eps_schur = eps_factor * trace_d / m;

  // Diagonally pivoted Cholesky on the Schur complement; a vanishing pivot
  // flags the corresponding column as redundant.
  std::vector<int> order;
  {
    DenseMatrix s = schur;
    std::vector<char> used(m, 0);
    for (int step = 0; step < m; ++step) {
      int piv = -1;
      double best = -1.0;
      for (int j = 0; j < m; ++j)
        if (!used[j] && s(j, j) > best) {
          best = s(j, j);
          piv = j;
        }
      res.schur_pivots[step] = best;
      if (best < eps_schur) {
        for (int j = 0; j < m; ++j)
          if (!used[j]) res.redundant[j] = 1;
        break;
      }
      used[piv] = 1;
      order.push_back(piv);
      for (int i = 0; i < m; ++i)
        if (!used[i])
          for (int j = 0; j < m; ++j)
            if (!used[j]) s(i, j) -= s(i, piv) * s(piv, j) / best;
    }
  }

  int kept = static_cast<int>(order.size());
  if (kept == 0) {
    res.x = std::move(x0_res.x);
    res.rel_residual = x0_res.rel_residual;
    return res;
  }

  DenseMatrix schur_kept(kept, kept);
  std::vector<double> rhs_kept(kept);
  for (int i = 0; i < kept; ++i) {
    double s = sys.g_rhs[order[i]];
    for (int r = 0; r < n; ++r) s -= sys.b_cols(r, order[i]) * x0_res.x[r];
    rhs_kept[i] = s;
    for (int j = 0; j < kept; ++j) schur_kept(i, j) = schur(order[i], order[j]);
  }
  auto alpha_kept = dense_spd_solve(schur_kept, rhs_kept);
  for (int i = 0; i < kept; ++i) res.alpha[order[i]] = alpha_kept[i];

  res.x = x0_res.x;
  for (int j = 0; j < m; ++j)
    if (res.alpha[j] != 0.0)
      for (int i = 0; i < n; ++i) res.x[i] -= y(i, j) * res.alpha[j];

  // Residual of the kept bordered system.
  std::vector<double> ax = a.apply(res.x);
  double rr = 0.0, scale = dot(sys.rhs, sys.rhs);
  for (int i = 0; i < n; ++i) {
    double ri = sys.rhs[i] - ax[i];
    for (int j = 0; j < m; ++j) ri -= sys.b_cols(i, j) * res.alpha[j];
    rr += ri * ri;
  }
  for (int i = 0; i < kept; ++i) {
    int jc = order[i];
    double ri = sys.g_rhs[jc];
    for (int r = 0; r < n; ++r) ri -= sys.b_cols(r, jc) * res.x[r];
    for (int j = 0; j < m; ++j) ri -= sys.d(jc, j) * res.alpha[j];
    rr += ri * ri;
    scale += sys.g_rhs[jc] * sys.g_rhs[jc];
  }
  res.rel_residual = std::sqrt(rr) / std::max(std::sqrt(scale), 1e-300);
  return res;
}

}  // namespace wg
