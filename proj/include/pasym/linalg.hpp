#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "pasym/errors.hpp"

namespace pasym::linalg {

using Matrix = std::vector<std::vector<double>>;

struct SymmetricEigen {
  std::vector<double> values;  // unsorted, paired with vectors columns
  Matrix vectors;              // vectors[i][k] = component i of eigenvector k
};

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix.
/// Off-diagonal is driven below tol * frobenius_norm; at most max_sweeps
/// full sweeps.
inline SymmetricEigen jacobi_eigen(Matrix a, double tol = 1e-12, int max_sweeps = 100) {
  const std::size_t n = a.size();
  Matrix v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  double fro = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) fro += a[i][j] * a[i][j];
  fro = std::sqrt(fro);
  const double thresh = tol * (fro > 0.0 ? fro : 1.0);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a[i][j] * a[i][j];
    if (std::sqrt(off) <= thresh) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) <= thresh / (n * n)) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  SymmetricEigen out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a[i][i];
  out.vectors = std::move(v);
  return out;
}

/// Minimum-norm least-squares solution of A x = b (A is rows x cols) via the
/// eigendecomposition of A^T A. Small systems only.
inline std::vector<double> min_norm_least_squares(const Matrix& a,
                                                  const std::vector<double>& b) {
  if (a.empty()) return {};
  const std::size_t m = a.size(), n = a[0].size();
  Matrix ata(n, std::vector<double>(n, 0.0));
  std::vector<double> atb(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      atb[i] += a[r][i] * b[r];
      for (std::size_t j = 0; j < n; ++j) ata[i][j] += a[r][i] * a[r][j];
    }
  }
  const auto eig = jacobi_eigen(ata);
  double max_ev = 0.0;
  for (double ev : eig.values) max_ev = std::max(max_ev, std::abs(ev));
  const double cutoff = 1e-12 * (max_ev > 0.0 ? max_ev : 1.0);
  // x = V diag(1/lambda on the nonzero part) V^T atb
  std::vector<double> x(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(eig.values[k]) <= cutoff) continue;
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += eig.vectors[i][k] * atb[i];
    proj /= eig.values[k];
    for (std::size_t i = 0; i < n; ++i) x[i] += proj * eig.vectors[i][k];
  }
  return x;
}

}  // namespace pasym::linalg
