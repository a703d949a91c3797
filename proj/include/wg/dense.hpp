#pragma once

#include <cstddef>
#include <vector>

#include "wg/geometry.hpp"

namespace wg {

/// Row-major dense matrix; used for local element matrices and small
/// bordered/Schur blocks, never for global systems.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  DenseMatrix transposed() const {
    DenseMatrix t(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
};

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols == b.rows, "matmul: dimension mismatch");
  DenseMatrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline std::vector<double> matvec(const DenseMatrix& a, const std::vector<double>& x) {
  require(a.cols == static_cast<int>(x.size()), "matvec: dimension mismatch");
  std::vector<double> y(a.rows, 0.0);
  for (int i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

/// In-place Cholesky A = L L^T. Throws "matrix not SPD" on a non-positive pivot.
struct CholeskyFactor {
  DenseMatrix l;

  explicit CholeskyFactor(DenseMatrix m) : l(std::move(m)) {
    require(l.rows == l.cols, "cholesky: matrix not square");
    int n = l.rows;
    for (int j = 0; j < n; ++j) {
      double d = l(j, j);
      for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
      require(d > 0.0, "matrix not SPD");
      double lj = std::sqrt(d);
      l(j, j) = lj;
      for (int i = j + 1; i < n; ++i) {
        double s = l(i, j);
        for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
        l(i, j) = s / lj;
      }
    }
  }

  std::vector<double> solve(std::vector<double> b) const {
    int n = l.rows;
    require(static_cast<int>(b.size()) == n, "cholesky solve: size mismatch");
    for (int i = 0; i < n; ++i) {
      double s = b[i];
      for (int k = 0; k < i; ++k) s -= l(i, k) * b[k];
      b[i] = s / l(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = b[i];
      for (int k = i + 1; k < n; ++k) s -= l(k, i) * b[k];
      b[i] = s / l(i, i);
    }
    return b;
  }

  DenseMatrix solve_matrix(const DenseMatrix& b) const {
    DenseMatrix x(b.rows, b.cols);
    std::vector<double> col(b.rows);
    for (int j = 0; j < b.cols; ++j) {
      for (int i = 0; i < b.rows; ++i) col[i] = b(i, j);
      auto y = solve(col);
      for (int i = 0; i < b.rows; ++i) x(i, j) = y[i];
    }
    return x;
  }
};

constexpr int kDenseSolveCap = 4096;

inline std::vector<double> dense_spd_solve(const DenseMatrix& m, const std::vector<double>& rhs,
                                           int cap = kDenseSolveCap) {
  require(m.rows <= cap, "dense_spd_solve: dimension exceeds cap");
  return CholeskyFactor(m).solve(rhs);
}

}  // namespace wg
