// Test-only oracles, independent of the library implementation paths they
// check.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "kdebench/common.hpp"

namespace kdebench::testing {

// Cyclic Jacobi eigensolver for symmetric matrices. Rotations sweep all
// (p, q) pairs until every off-diagonal entry is below tol. Returns
// eigenvalues sorted descending; eigvecs columns are the matching
// eigenvectors.
inline void jacobi_eigensolve(Matrix A, Vector& eigvals, Matrix& eigvecs,
                              double tol = 1e-12) {
  const auto n = static_cast<int>(A.rows());
  eigvecs = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double offmax = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) offmax = std::max(offmax, std::abs(A(p, q)));
    if (offmax <= tol) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (std::abs(apq) <= tol * 1e-3) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t =
            (theta >= 0 ? 1.0 : -1.0) /
            (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = A(p, p), aqq = A(q, q);
        A(p, p) = app - t * apq;
        A(q, q) = aqq + t * apq;
        A(p, q) = A(q, p) = 0.0;
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = A(i, p), aiq = A(i, q);
          A(i, p) = A(p, i) = aip - s * (aiq + tau * aip);
          A(i, q) = A(q, i) = aiq + s * (aip - tau * aiq);
        }
        for (int i = 0; i < n; ++i) {
          const double vip = eigvecs(i, p), viq = eigvecs(i, q);
          eigvecs(i, p) = vip - s * (viq + tau * vip);
          eigvecs(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
  }

  eigvals = A.diagonal();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return eigvals[a] > eigvals[b]; });
  Vector sorted_vals(n);
  Matrix sorted_vecs(n, n);
  for (int i = 0; i < n; ++i) {
    sorted_vals[i] = eigvals[idx[i]];
    sorted_vecs.col(i) = eigvecs.col(idx[i]);
  }
  eigvals = sorted_vals;
  eigvecs = sorted_vecs;
}

// Composite trapezoid quadratures.
template <typename F>
double quadrature_1d(F&& f, double lo, double hi, int m) {
  const double h = (hi - lo) / (m - 1);
  double total = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < m - 1; ++i) total += f(lo + h * i);
  return total * h;
}

template <typename F>
double quadrature_2d(F&& f, double lo0, double hi0, double lo1, double hi1,
                     int m) {
  const double h0 = (hi0 - lo0) / (m - 1);
  const double h1 = (hi1 - lo1) / (m - 1);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    const double wi = (i == 0 || i == m - 1) ? 0.5 : 1.0;
    const double x0 = lo0 + h0 * i;
    double row = 0.0;
    for (int j = 0; j < m; ++j) {
      const double wj = (j == 0 || j == m - 1) ? 0.5 : 1.0;
      row += wj * f(x0, lo1 + h1 * j);
    }
    total += wi * row;
  }
  return total * h0 * h1;
}

inline double pearson_correlation(const std::vector<double>& a,
                                  const std::vector<double>& b) {
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace kdebench::testing
