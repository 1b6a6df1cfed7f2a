// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"

namespace paragse {

namespace {

double off_diagonal_norm(const Matrix& s) {
  double acc = 0.0;
  for (size_t r = 0; r < s.rows; ++r) {
    for (size_t c = r + 1; c < s.cols; ++c) acc += s.at(r, c) * s.at(r, c);
  }
  return std::sqrt(2.0 * acc);
}

}  // namespace

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.cols != b.cols) {
    throw InvalidInputError("matmul_nt: inner dimensions differ");
  }
  if (out.rows != a.rows || out.cols != b.rows) {
    out = Matrix(a.rows, b.rows);
  } else {
    std::fill(out.data.begin(), out.data.end(), 0.0);
  }

  constexpr size_t kRowBlock = 16;
  constexpr size_t kInnerTile = 2048;
  for (size_t ib = 0; ib < a.rows; ib += kRowBlock) {
    const size_t ie = std::min(a.rows, ib + kRowBlock);
    for (size_t kb = 0; kb < a.cols; kb += kInnerTile) {
      const size_t ke = std::min(a.cols, kb + kInnerTile);
      const size_t span = ke - kb;
      for (size_t j = 0; j < b.rows; ++j) {
        const double* brow = b.row(j) + kb;
        for (size_t i = ib; i < ie; ++i) {
          const double* arow = a.row(i) + kb;
          // Four independent accumulators; the fixed summation tree keeps
          // results identical for every caller while letting the loop
          // vectorize.
          double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
          size_t k = 0;
          for (; k + 4 <= span; k += 4) {
            acc0 += arow[k] * brow[k];
            acc1 += arow[k + 1] * brow[k + 1];
            acc2 += arow[k + 2] * brow[k + 2];
            acc3 += arow[k + 3] * brow[k + 3];
          }
          double acc = (acc0 + acc1) + (acc2 + acc3);
          for (; k < span; ++k) acc += arow[k] * brow[k];
          out.at(i, j) += acc;
        }
      }
    }
  }
}

void jacobi_eigen_symmetric(Matrix s, Vector& eigvals, Matrix& eigvecs,
                            int max_sweeps) {
  if (s.rows != s.cols || s.rows == 0) {
    throw InvalidInputError("jacobi: matrix must be square and non-empty");
  }
  const size_t n = s.rows;

  // V accumulates rotations; columns of V are eigenvectors of the input.
  Matrix v(n, n);
  for (size_t i = 0; i < n; ++i) v.at(i, i) = 1.0;

  const double stop = 1e-14 * std::max(1.0, off_diagonal_norm(s));
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_diagonal_norm(s) <= stop) break;
    for (size_t p = 0; p + 1 < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        double apq = s.at(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        double app = s.at(p, p);
        double aqq = s.at(q, q);
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double sn = t * c;

        for (size_t k = 0; k < n; ++k) {
          double skp = s.at(k, p);
          double skq = s.at(k, q);
          s.at(k, p) = c * skp - sn * skq;
          s.at(k, q) = sn * skp + c * skq;
        }
        for (size_t k = 0; k < n; ++k) {
          double spk = s.at(p, k);
          double sqk = s.at(q, k);
          s.at(p, k) = c * spk - sn * sqk;
          s.at(q, k) = sn * spk + c * sqk;
        }
        for (size_t k = 0; k < n; ++k) {
          double vkp = v.at(k, p);
          double vkq = v.at(k, q);
          v.at(k, p) = c * vkp - sn * vkq;
          v.at(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return s.at(a, a) > s.at(b, b);
  });

  eigvals.assign(n, 0.0);
  eigvecs = Matrix(n, n);
  for (size_t i = 0; i < n; ++i) {
    size_t col = order[i];
    eigvals[i] = s.at(col, col);
    // Fix the sign so decompositions are byte-reproducible.
    size_t arg = 0;
    double best = 0.0;
    for (size_t k = 0; k < n; ++k) {
      double m = std::fabs(v.at(k, col));
      if (m > best) {
        best = m;
        arg = k;
      }
    }
    double sign = v.at(arg, col) < 0.0 ? -1.0 : 1.0;
    for (size_t k = 0; k < n; ++k) eigvecs.at(i, k) = sign * v.at(k, col);
  }
}

}  // namespace paragse
