#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lagdec/laguerre.hpp"
#include "lagdec/rng.hpp"
#include "lagdec/toeplitz.hpp"

namespace lagdec {

/// Observation times 0 <= t_1 <= ... <= t_n <= T_n.
struct DesignGrid {
  Vector times;
  double horizon = 0.0;

  DesignGrid() = default;
  DesignGrid(Vector t, double T) : times(std::move(t)), horizon(T) {
    if (times.size() < 2) throw std::invalid_argument("DesignGrid: need at least two points");
    if (!(horizon > 0.0)) throw std::invalid_argument("DesignGrid: horizon must be positive");
    if (times[0] < 0.0) throw std::invalid_argument("DesignGrid: negative time");
    for (Index i = 1; i < times.size(); ++i)
      if (times[i] < times[i - 1]) throw std::invalid_argument("DesignGrid: times must be nondecreasing");
    if (times[times.size() - 1] > horizon * (1.0 + 1e-12))
      throw std::invalid_argument("DesignGrid: time beyond horizon");
  }

  Index n() const { return times.size(); }

  /// n equispaced points on [0, T] at cell midpoints, t_i = T (i - 1/2) / n.
  /// A shared t = 0 node would make every phi_l collinear there and skew the
  /// Gram matrix at coarse spacings, so the grid stays strictly inside.
  static DesignGrid equispaced(Index n, double T) {
    Vector t(n);
    for (Index i = 0; i < n; ++i)
      t[i] = T * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    return DesignGrid(std::move(t), T);
  }

  /// t_i = sum_{j<=i} (step + |X_j|) with X_j ~ N(0, jitter_sd^2).
  static DesignGrid cumulative_step(double step, double jitter_sd, Index n, Rng& rng) {
    Vector t(n);
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      acc += step + std::abs(jitter_sd * rng.normal());
      t[i] = acc;
    }
    return DesignGrid(std::move(t), acc);
  }
};

/// sigma is the per-observation noise, delta the operator noise; in the
/// regression model epsilon = sigma sqrt(T_n / n), in the sequence model it
/// is set directly.
struct NoiseLevels {
  double sigma = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;

  static NoiseLevels sequence(double eps, double delta) {
    if (eps < 0.0 || delta < 0.0) throw std::invalid_argument("NoiseLevels: negative level");
    return NoiseLevels{0.0, delta, eps};
  }
  static NoiseLevels regression(double sigma, double delta, double horizon, Index n) {
    if (sigma < 0.0 || delta < 0.0) throw std::invalid_argument("NoiseLevels: negative level");
    return NoiseLevels{sigma, delta, sigma * std::sqrt(horizon / static_cast<double>(n))};
  }
};

/// Sequence-model data: observed coefficients y^l, the noisy operator column
/// g_dot_delta, noise levels, and optionally the design norms ||Omega_l||.
struct Observations {
  Vector y_coeffs;
  Vector g_dot_noisy;
  NoiseLevels noise;
  std::optional<Vector> omega_op_norms;

  Observations() = default;
  Observations(Vector y, Vector gd, NoiseLevels nl, std::optional<Vector> norms = std::nullopt)
      : y_coeffs(std::move(y)), g_dot_noisy(std::move(gd)), noise(nl),
        omega_op_norms(std::move(norms)) {
    if (y_coeffs.size() != g_dot_noisy.size())
      throw std::invalid_argument("Observations: y and g_dot lengths differ");
  }

  Index levels() const { return y_coeffs.size() - 1; }
};

/// Differenced kernel coefficients: gdot_0 = g_0, gdot_l = g_l - g_{l-1}.
inline Vector dot_g(const Vector& g_coeffs) {
  if (g_coeffs.size() == 0) throw std::invalid_argument("dot_g: empty input");
  Vector out(g_coeffs.size());
  out[0] = g_coeffs[0];
  for (Index l = 1; l < g_coeffs.size(); ++l) out[l] = g_coeffs[l] - g_coeffs[l - 1];
  return out;
}

/// Galerkin matrix K^L = T_L(g_dot).
inline LowerToeplitz build_galerkin(const Vector& g_dot, Index L) {
  if (g_dot.size() < L + 1) throw std::invalid_argument("build_galerkin: column too short");
  return LowerToeplitz(g_dot.head(L + 1));
}

/// q^l = K^l f^l.
inline Vector forward(const Vector& f_coeffs, const Vector& g_dot) {
  if (f_coeffs.size() != g_dot.size()) throw std::invalid_argument("forward: length mismatch");
  return apply(LowerToeplitz(g_dot), f_coeffs);
}

/// (Phi_L)_{k,i} = phi_k(t_i), an (L+1) x n matrix.
inline Matrix design_matrix(const DesignGrid& design, Index L, const LaguerreBasis& basis = {}) {
  const Index n = design.n();
  Matrix phi(L + 1, n);
  Vector row(L + 1);
  for (Index i = 0; i < n; ++i) {
    eval_function_row(design.times[i], basis, row);
    phi.col(i) = row;
  }
  return phi;
}

/// Omega_l = n T_n^{-1} (Phi_l Phi_l^t)^{-1} for l = 0..L, plus spectral norms.
struct OmegaSet {
  std::vector<Matrix> matrices;
  Vector op_norms;
};

inline OmegaSet omega(const DesignGrid& design, Index L, const LaguerreBasis& basis = {}) {
  const Matrix phi = design_matrix(design, L, basis);
  const Matrix gram_full = phi * phi.transpose();
  const double scale = static_cast<double>(design.n()) / design.horizon;

  OmegaSet out;
  out.matrices.reserve(L + 1);
  out.op_norms.resize(L + 1);
  for (Index l = 0; l <= L; ++l) {
    const Matrix gram = gram_full.topLeftCorner(l + 1, l + 1);
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    const double lmax = es.eigenvalues().maxCoeff();
    const double lmin = es.eigenvalues().minCoeff();
    if (!(lmin > lmax * 1e-13))
      throw std::runtime_error("omega: singular Gram matrix at level " + std::to_string(l));
    const Matrix omega_l =
        scale * (es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                 es.eigenvectors().transpose());
    out.op_norms[l] = scale / lmin;
    out.matrices.push_back(omega_l);
  }
  return out;
}

/// Sequence-model synthesis
///   y = K f + eps * xi,   g_dot_delta = g_dot + delta * b,
/// with xi ~ N(0, Omega) (identity when omitted) drawn through a symmetric
/// square root of Omega at the maximal level, and b i.i.d. standard normal.
/// The draw order (xi then b) is part of the determinism contract.
inline Observations synthesize_sequence(const Vector& f_coeffs, const Vector& g_dot,
                                        const NoiseLevels& noise,
                                        const std::optional<Matrix>& omega_max,
                                        std::uint64_t seed,
                                        std::optional<Vector> omega_norms = std::nullopt) {
  const Index n = f_coeffs.size();
  if (g_dot.size() != n) throw std::invalid_argument("synthesize_sequence: length mismatch");
  Rng rng(seed);
  Vector z = rng.normal_vector(n);
  Vector xi;
  if (omega_max) {
    if (omega_max->rows() != n || omega_max->cols() != n)
      throw std::invalid_argument("synthesize_sequence: Omega size mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> es(*omega_max);
    if (es.eigenvalues().minCoeff() < -1e-10)
      throw std::invalid_argument("synthesize_sequence: Omega not positive semidefinite");
    xi = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         (es.eigenvectors().transpose() * z);
  } else {
    xi = std::move(z);
  }
  Vector b = rng.normal_vector(n);
  Vector y = forward(f_coeffs, g_dot) + noise.epsilon * xi;
  Vector gd = g_dot + noise.delta * b;
  return Observations(std::move(y), std::move(gd), noise, std::move(omega_norms));
}

/// Regression-model samples y(t_i) = int_0^{t_i} g(t_i - tau) f(tau) dtau
/// + sigma eta_i, the convolution integral by panel-doubling quadrature to
/// 1e-8 relative tolerance.
inline Vector synthesize_regression(const std::function<double(double)>& f,
                                    const std::function<double(double)>& g,
                                    const DesignGrid& design, double sigma, std::uint64_t seed) {
  Rng rng(seed);
  Vector out(design.n());
  for (Index i = 0; i < design.n(); ++i) {
    const double t = design.times[i];
    double q;
    try {
      q = integrate_adaptive([&](double x) { return g(t - x) * f(x); }, 0.0, t, 1e-8, 8, 14, 12);
    } catch (const std::exception& e) {
      throw std::runtime_error("synthesize_regression: quadrature failed at t = " +
                               std::to_string(t) + ": " + e.what());
    }
    out[i] = q + sigma * rng.normal();
  }
  return out;
}

/// Coefficients of (1-z)^{-nu}: c_0 = 1, c_{k+1} = c_k (k+nu)/(k+1).
inline Vector binomial_series(double nu, Index L) {
  if (L < 0) throw std::invalid_argument("binomial_series: negative length");
  Vector c(L + 1);
  c[0] = 1.0;
  for (Index k = 0; k < L; ++k) c[k + 1] = c[k] * (k + nu) / (k + 1.0);
  return c;
}

/// Kernel description: either explicit g_dot coefficients or the
/// decomposition g_dot(z) = C w(z) (mu - z)^nu with w(z) = prod (z - mu_i),
/// |mu_i| > 1.
struct KernelSpec {
  Vector explicit_g_dot;
  bool is_decomposition = false;
  double C = 1.0;
  std::vector<std::complex<double>> w_roots;
  double mu = 1.0;
  double nu = 1.0;

  static KernelSpec explicit_coeffs(Vector g_dot) {
    KernelSpec s;
    s.explicit_g_dot = std::move(g_dot);
    s.is_decomposition = false;
    return s;
  }
  static KernelSpec decomposition(double C, std::vector<std::complex<double>> roots, double mu,
                                  double nu) {
    KernelSpec s;
    s.is_decomposition = true;
    s.C = C;
    s.w_roots = std::move(roots);
    s.mu = mu;
    s.nu = nu;
    return s;
  }
};

/// Truncated power-series coefficients of C w(z) (mu - z)^nu via
/// (mu - z)^nu = mu^nu (1 - z/mu)^nu and polynomial multiplication.
inline Vector kernel_from_decomposition(const KernelSpec& spec, Index L) {
  if (!spec.is_decomposition) {
    Vector out = Vector::Zero(L + 1);
    const Index m = std::min<Index>(L + 1, spec.explicit_g_dot.size());
    out.head(m) = spec.explicit_g_dot.head(m);
    return out;
  }
  if (spec.C == 0.0) throw std::invalid_argument("kernel_from_decomposition: C must be nonzero");
  if (!(spec.mu >= 1.0)) throw std::invalid_argument("kernel_from_decomposition: need mu >= 1");
  for (const auto& r : spec.w_roots)
    if (!(std::abs(r) > 1.0))
      throw std::invalid_argument("kernel_from_decomposition: roots must lie outside the unit disc");

  // (1 - z/mu)^nu = (1-u)^{-(-nu)} at u = z/mu
  Vector c = binomial_series(-spec.nu, L);
  double mu_pow = std::pow(spec.mu, spec.nu);
  for (Index k = 0; k <= L; ++k) {
    c[k] *= mu_pow;
    mu_pow /= spec.mu;
  }

  // multiply by w(z) = prod (z - mu_i), conjugate-closed roots give real output
  std::vector<std::complex<double>> poly(L + 1, 0.0);
  for (Index k = 0; k <= L; ++k) poly[k] = c[k];
  for (const auto& root : spec.w_roots) {
    std::vector<std::complex<double>> next(L + 1, 0.0);
    for (Index k = 0; k <= L; ++k) {
      next[k] += -root * poly[k];
      if (k + 1 <= L) next[k + 1] += poly[k];
    }
    poly = std::move(next);
  }
  Vector out(L + 1);
  for (Index k = 0; k <= L; ++k) {
    if (std::abs(poly[k].imag()) > 1e-9 * (1.0 + std::abs(poly[k])))
      throw std::invalid_argument("kernel_from_decomposition: roots must close under conjugation");
    out[k] = spec.C * poly[k].real();
  }
  return out;
}

/// Diagnostic degree-of-ill-posedness fit over levels [l_lo, l_hi]:
/// nu is the log-log slope of ||(K^l)^{-1}||_op, nu_hs half the slope of the
/// cumulative-reciprocal quantity sum_{k<=l} sum_{n<=k} gamma_n^2 (the
/// squared HS norm), Q the intercept of the op-norm fit.
struct DipEstimate {
  double nu = 0.0;
  double Q = 0.0;
  double nu_hs = 0.0;
};

inline DipEstimate estimate_dip(const Vector& g_dot, Index l_lo, Index l_hi) {
  if (l_hi >= g_dot.size()) throw std::invalid_argument("estimate_dip: range beyond data");
  if (l_lo < 1 || l_hi - l_lo + 1 < 3)
    throw std::invalid_argument("estimate_dip: need at least three levels from l >= 1");
  const Vector gamma = invert_series(g_dot.head(l_hi + 1));

  std::vector<double> lx, ly_op, ly_hs;
  double cum = 0.0, cumcum = 0.0;
  for (Index l = 0; l <= l_hi; ++l) {
    cum += gamma[l] * gamma[l];
    cumcum += cum;
    if (l < l_lo) continue;
    lx.push_back(std::log(static_cast<double>(l)));
    ly_op.push_back(std::log(op_norm(LowerToeplitz(gamma.head(l + 1)))));
    ly_hs.push_back(std::log(cumcum));
  }
  auto fit = [&](const std::vector<double>& y) {
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += y[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    return std::pair<double, double>(slope, intercept);
  };
  const auto [slope_op, intercept_op] = fit(ly_op);
  const auto [slope_hs, intercept_hs] = fit(ly_hs);
  (void)intercept_hs;
  return DipEstimate{slope_op, std::exp(intercept_op), 0.5 * slope_hs};
}

} // namespace lagdec
