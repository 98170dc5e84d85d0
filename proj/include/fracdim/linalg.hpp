#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fracdim/common.hpp"

namespace fracdim {

/// Dense row-major matrix, just large enough for the small design matrices
/// and covariance factors used here.
struct Matrix {
  size_t rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(size_t r, size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
  double& operator()(size_t i, size_t j) { return a[i * cols + j]; }
  double operator()(size_t i, size_t j) const { return a[i * cols + j]; }
};

/// Least squares via Householder QR (no pivoting); throws NumericError when
/// the triangular factor signals rank deficiency.
inline std::vector<double> qr_least_squares(Matrix A, std::vector<double> b) {
  const size_t m = A.rows, n = A.cols;
  if (b.size() != m || m < n) throw NumericError("least squares: bad system size");
  for (size_t k = 0; k < n; ++k) {
    double norm = 0.0;
    for (size_t i = k; i < m; ++i) norm = std::hypot(norm, A(i, k));
    if (norm == 0.0) throw NumericError("least squares: design-matrix rank deficiency");
    if (A(k, k) > 0) norm = -norm;
    for (size_t i = k; i < m; ++i) A(i, k) /= norm;
    A(k, k) -= 1.0;
    for (size_t j = k + 1; j < n; ++j) {
      double s = 0.0;
      for (size_t i = k; i < m; ++i) s += A(i, k) * A(i, j);
      s /= A(k, k);
      for (size_t i = k; i < m; ++i) A(i, j) += s * A(i, k);
    }
    double s = 0.0;
    for (size_t i = k; i < m; ++i) s += A(i, k) * b[i];
    s /= A(k, k);
    for (size_t i = k; i < m; ++i) b[i] += s * A(i, k);
    A(k, k) = norm;  // diagonal of R
  }
  // back substitution; rank check against the largest diagonal magnitude
  double dmax = 0.0;
  for (size_t k = 0; k < n; ++k) dmax = std::max(dmax, std::abs(A(k, k)));
  std::vector<double> x(n, 0.0);
  for (size_t kk = n; kk-- > 0;) {
    if (std::abs(A(kk, kk)) < 1e-12 * dmax)
      throw NumericError("least squares: design-matrix rank deficiency");
    double s = b[kk];
    for (size_t j = kk + 1; j < n; ++j) s -= A(kk, j) * x[j];
    x[kk] = s / A(kk, kk);
  }
  return x;
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
inline Matrix cholesky(const Matrix& q) {
  if (q.rows != q.cols) throw NumericError("cholesky: matrix not square");
  const size_t n = q.rows;
  Matrix l(n, n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j <= i; ++j) {
      double s = q(i, j);
      for (size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0) throw NumericError("cholesky: covariance not positive definite");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
inline double max_eigenvalue(const Matrix& q, int iters = 200) {
  const size_t n = q.rows;
  std::vector<double> v(n, 1.0 / std::sqrt(double(n))), w(n);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    for (size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (size_t j = 0; j < n; ++j) s += q(i, j) * v[j];
      w[i] = s;
    }
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    for (size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    lambda = norm;
  }
  return lambda;
}

/// Solve a small SPD or general square system by Gaussian elimination with
/// partial pivoting (used for (X^T X)^{-1} t in the normality statistic).
inline std::vector<double> solve_square(Matrix a, std::vector<double> b) {
  const size_t n = a.rows;
  if (a.cols != n || b.size() != n) throw NumericError("solve: bad system size");
  for (size_t k = 0; k < n; ++k) {
    size_t piv = k;
    for (size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (a(piv, k) == 0.0) throw NumericError("solve: singular matrix");
    if (piv != k) {
      for (size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (size_t kk = n; kk-- > 0;) {
    double s = b[kk];
    for (size_t j = kk + 1; j < n; ++j) s -= a(kk, j) * x[j];
    x[kk] = s / a(kk, kk);
  }
  return x;
}

}  // namespace fracdim
