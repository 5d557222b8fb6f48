#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "lagdec/types.hpp"

namespace lagdec {

/// Composite quadrature controls for projections onto the Laguerre basis.
/// upper_limit truncates [0,inf); the integrands decay like exp(-a t), so a
/// generous cutoff keeps the truncation error below the stabilisation
/// tolerance. Node counts double until two successive refinements agree.
struct QuadratureSpec {
  double upper_limit = 80.0; // default 40/a at a = 1/2
  int initial_panels = 32;
  int points_per_panel = 16;
  double tolerance = 1e-10;
  int max_doublings = 6;
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1,1], given per point count.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p0 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

} // namespace detail

/// Composite Gauss-Legendre integral of f over [lo, hi] with `panels` panels.
template <class F>
double integrate_panels(F&& f, double lo, double hi, int panels, int points_per_panel = 16) {
  std::vector<double> x, w;
  detail::gauss_legendre(points_per_panel, x, w);
  const double h = (hi - lo) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    const double mid = a + 0.5 * h;
    double acc = 0.0;
    for (int i = 0; i < points_per_panel; ++i) acc += w[i] * f(mid + 0.5 * h * x[i]);
    total += 0.5 * h * acc;
  }
  return total;
}

/// Integral of f over [lo, hi], doubling the panel count until two successive
/// answers agree within rel_tol (relative to max(1,|I|)). Throws when the
/// refinement never settles.
template <class F>
double integrate_adaptive(F&& f, double lo, double hi, double rel_tol = 1e-8,
                          int initial_panels = 8, int max_doublings = 12,
                          int points_per_panel = 8) {
  if (!(hi >= lo)) throw std::invalid_argument("integrate_adaptive: bad interval");
  if (hi == lo) return 0.0;
  double prev = integrate_panels(f, lo, hi, initial_panels, points_per_panel);
  int panels = initial_panels;
  for (int d = 0; d < max_doublings; ++d) {
    panels *= 2;
    const double cur = integrate_panels(f, lo, hi, panels, points_per_panel);
    if (std::abs(cur - prev) <= rel_tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw std::runtime_error("integrate_adaptive: quadrature did not converge");
}

} // namespace lagdec
