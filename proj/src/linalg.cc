// Copyright 2026  The sastk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "sastk/linalg.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "sastk/error.h"

namespace sastk {

Matrix Matrix::from_rows(const std::vector<std::vector<double>> &rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols())
      throw DataError(fmt::format("row {} has {} columns, expected {}", i,
                                  rows[i].size(), m.cols()));
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

namespace {

double off_diagonal_norm(const Matrix &a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) sum += a(i, j) * a(i, j);
  return std::sqrt(2.0 * sum);
}

}  // namespace

EigenDecomposition jacobi_eigen(Matrix a, double off_tolerance, int max_sweeps) {
  const std::size_t n = a.rows();
  if (a.cols() != n)
    throw ConfigError(fmt::format("eigensolver needs a square matrix, got {}x{}",
                                  a.rows(), a.cols()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a(i, j) - a(j, i)) > 1e-12 * (1.0 + std::abs(a(i, j))))
        throw ConfigError(
            fmt::format("eigensolver needs a symmetric matrix ({},{})", i, j));

  // Row p of `w` accumulates the p-th eigenvector (w = V^T).
  Matrix w = Matrix::identity(n);
  EigenDecomposition result;
  // Entries below `negligible` are left alone: even all of them together stay
  // under the tolerance.
  const double negligible = off_tolerance / (4.0 * static_cast<double>(n + 1));
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off < off_tolerance) break;
    // Early sweeps only chase the large entries.
    const double threshold =
        sweep < 3 ? std::max(negligible, 0.2 * off / static_cast<double>(n * n)) : negligible;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= threshold) continue;
        const double app = a(p, p), aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        double *row_p = a.row(p).data();
        double *row_q = a.row(q).data();
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = row_p[k], akq = row_q[k];
          row_p[k] = c * akp - s * akq;
          row_q[k] = s * akp + c * akq;
        }
        row_p[p] = app - t * apq;
        row_q[q] = aqq + t * apq;
        row_p[q] = 0.0;
        row_q[p] = 0.0;
        // Column q must be current for the next rotation; column p is only
        // read through row p until this p-loop ends.
        double *data = a.data().data();
        for (std::size_t k = 0; k < n; ++k) data[k * n + q] = row_q[k];

        double *wp = w.row(p).data();
        double *wq = w.row(q).data();
        for (std::size_t k = 0; k < n; ++k) {
          const double vp = wp[k], vq = wq[k];
          wp[k] = c * vp - s * vq;
          wq[k] = s * vp + c * vq;
        }
      }
      double *data = a.data().data();
      for (std::size_t k = 0; k < n; ++k) data[k * n + p] = data[p * n + k];
    }
  }
  if (off_diagonal_norm(a) >= off_tolerance)
    throw DataError(fmt::format("Jacobi eigensolver did not converge in {} sweeps",
                                max_sweeps));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  result.values.resize(n);
  result.vectors = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    result.values[r] = a(order[r], order[r]);
    auto src = w.row(order[r]);
    std::copy(src.begin(), src.end(), result.vectors.row(r).begin());
  }
  result.sweeps = sweep;
  return result;
}

}  // namespace sastk
