// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <vector>

namespace paragse {

using Vector = std::vector<double>;

// Dense row-major matrix. Deliberately minimal: the numeric paths in this
// project are small dense products and one symmetric eigensolve.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(size_t r, size_t c) { return data[r * cols + c]; }
  double at(size_t r, size_t c) const { return data[r * cols + c]; }
  double* row(size_t r) { return data.data() + r * cols; }
  const double* row(size_t r) const { return data.data() + r * cols; }
  bool empty() const { return data.empty(); }
};

inline double dot(const double* a, const double* b, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

// y = A * x
inline void matvec(const Matrix& a, const double* x, double* y) {
  for (size_t r = 0; r < a.rows; ++r) y[r] = dot(a.row(r), x, a.cols);
}

// y = A^T * x  (x has a.rows entries, y has a.cols entries)
inline void matvec_transposed(const Matrix& a, const double* x, double* y) {
  for (size_t c = 0; c < a.cols; ++c) y[c] = 0.0;
  for (size_t r = 0; r < a.rows; ++r) {
    const double* row = a.row(r);
    double xr = x[r];
    for (size_t c = 0; c < a.cols; ++c) y[c] += row[c] * xr;
  }
}

// A += alpha * u * v^T
inline void rank1_update(Matrix& a, double alpha, const double* u,
                         const double* v) {
  for (size_t r = 0; r < a.rows; ++r) {
    double* row = a.row(r);
    double au = alpha * u[r];
    for (size_t c = 0; c < a.cols; ++c) row[c] += au * v[c];
  }
}

inline double squared_distance(const double* a, const double* b, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// out = A * B^T, i.e. out[i][j] = dot(a.row(i), b.row(j)). Blocked over
// rows of A (and over the shared dimension) so the B rows are re-streamed
// once per block instead of once per row of A; per-entry results are
// bitwise independent of the blocking.
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Returns eigenvalues sorted descending with matching eigenvectors as the
// ROWS of `eigvecs`. Deterministic: fixed sweep order, sign convention
// fixed by making the largest-magnitude component of each vector positive.
void jacobi_eigen_symmetric(Matrix s, Vector& eigvals, Matrix& eigvecs,
                            int max_sweeps = 50);

}  // namespace paragse
