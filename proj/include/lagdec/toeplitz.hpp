#pragma once

#include <cmath>
#include <stdexcept>

#include "lagdec/types.hpp"

namespace lagdec {

/// Truncated lower-triangular Toeplitz matrix, stored as its first column:
/// entry (i,j) = col[i-j] for i >= j, 0 above the diagonal. The dense matrix
/// is only materialised inside norm computations.
struct LowerToeplitz {
  Vector first_col;

  LowerToeplitz() = default;
  explicit LowerToeplitz(Vector col) : first_col(std::move(col)) {
    if (first_col.size() == 0) throw std::invalid_argument("LowerToeplitz: empty column");
    if (!first_col.allFinite()) throw std::invalid_argument("LowerToeplitz: non-finite entries");
  }

  Index size() const { return first_col.size(); }

  static LowerToeplitz identity(Index n) {
    Vector c = Vector::Zero(n);
    c[0] = 1.0;
    return LowerToeplitz(std::move(c));
  }

  Matrix dense() const {
    const Index n = size();
    Matrix m = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j <= i; ++j) m(i, j) = first_col[i - j];
    return m;
  }
};

/// Truncated Cauchy product of the first columns; equals the matrix product
/// in either order.
inline LowerToeplitz multiply(const LowerToeplitz& A, const LowerToeplitz& B) {
  if (A.size() != B.size()) throw std::invalid_argument("multiply: size mismatch");
  const Index n = A.size();
  Vector c = Vector::Zero(n);
  for (Index k = 0; k < n; ++k) {
    double acc = 0.0;
    for (Index j = 0; j <= k; ++j) acc += A.first_col[j] * B.first_col[k - j];
    c[k] = acc;
  }
  return LowerToeplitz(std::move(c));
}

/// (A v)_i = sum_{j<=i} col[i-j] v_j.
inline Vector apply(const LowerToeplitz& A, const Vector& v) {
  if (A.size() != v.size()) throw std::invalid_argument("apply: length mismatch");
  const Index n = A.size();
  Vector out(n);
  for (Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Index j = 0; j <= i; ++j) acc += A.first_col[i - j] * v[j];
    out[i] = acc;
  }
  return out;
}

/// Power-series reciprocal of the first column:
/// gamma_0 = 1/c_0, gamma_k = -(1/c_0) sum_{j=1..k} c_j gamma_{k-j},
/// so that T(c) T(gamma) is the identity truncation.
inline Vector invert_series(const Vector& c) {
  if (c.size() == 0) throw std::invalid_argument("invert_series: empty column");
  if (c[0] == 0.0)
    throw std::domain_error("invert_series: leading coefficient is zero (singular Galerkin matrix)");
  const Index n = c.size();
  Vector g(n);
  g[0] = 1.0 / c[0];
  for (Index k = 1; k < n; ++k) {
    double acc = 0.0;
    for (Index j = 1; j <= k; ++j) acc += c[j] * g[k - j];
    g[k] = -acc / c[0];
  }
  return g;
}

inline LowerToeplitz inverse(const LowerToeplitz& A) {
  return LowerToeplitz(invert_series(A.first_col));
}

/// Spectral norm: SVD of the dense materialisation for the sizes this
/// artifact uses; power iteration on A^T A past 512.
inline double op_norm(const LowerToeplitz& A) {
  const Index n = A.size();
  if (n == 1) return std::abs(A.first_col[0]);
  const Matrix m = A.dense();
  if (n <= 512) {
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues()[0];
  }
  Vector v = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vector w = m.transpose() * (m * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double next = norm;
    if (std::abs(next - lambda) <= 1e-12 * std::max(1.0, next)) {
      lambda = next;
      break;
    }
    lambda = next;
    v = std::move(w);
  }
  return std::sqrt(lambda);
}

/// Hilbert-Schmidt (Frobenius) norm via the closed triangular-Toeplitz form
/// sqrt(sum_k (n-k) c_k^2).
inline double hs_norm(const LowerToeplitz& A) {
  const Index n = A.size();
  double acc = 0.0;
  for (Index k = 0; k < n; ++k)
    acc += static_cast<double>(n - k) * A.first_col[k] * A.first_col[k];
  return std::sqrt(acc);
}

/// l1 bound on the spectral norm: ||T(a)||_op <= sum |a_k|.
inline double circ_norm_bound(const Vector& c) { return c.cwiseAbs().sum(); }

} // namespace lagdec
