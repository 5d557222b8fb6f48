#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "lagdec/quadrature.hpp"
#include "lagdec/types.hpp"

namespace lagdec {

/// Laguerre function basis phi_l(t) = sqrt(2a) exp(-a t) L_l(2 a t) on
/// L^2(R+). The scale a defaults to 1/2, where phi_l(t) = exp(-t/2) L_l(t).
struct LaguerreBasis {
  double a = 0.5;
  Index max_degree = 0;

  LaguerreBasis() = default;
  LaguerreBasis(double scale, Index degree) : a(scale), max_degree(degree) {
    if (!(a > 0.0)) throw std::invalid_argument("LaguerreBasis: a must be positive");
    if (max_degree < 0) throw std::invalid_argument("LaguerreBasis: negative degree");
  }
};

/// Finite expansion sum_l coeffs[l] phi_l in a given basis.
struct LaguerreSeries {
  Vector coeffs;
  LaguerreBasis basis;

  LaguerreSeries() = default;
  LaguerreSeries(Vector c, double a = 0.5)
      : coeffs(std::move(c)), basis(a, coeffs.size() > 0 ? coeffs.size() - 1 : 0) {
    if (coeffs.size() == 0) throw std::invalid_argument("LaguerreSeries: empty coefficients");
    if (!coeffs.allFinite()) throw std::invalid_argument("LaguerreSeries: non-finite coefficients");
  }

  Index degree() const { return coeffs.size() - 1; }
};

/// Laguerre polynomial L_l(t) by the three-term recurrence
/// L_{l+1} = ((2l+1-t) L_l - l L_{l-1}) / (l+1).
inline double eval_polynomial(Index l, double t) {
  if (l < 0) throw std::invalid_argument("eval_polynomial: negative degree");
  double prev = 1.0;
  if (l == 0) return prev;
  double cur = 1.0 - t;
  for (Index k = 1; k < l; ++k) {
    const double next = ((2.0 * k + 1.0 - t) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Fills values[0..L] with phi_l(t). The exponential weight rides inside the
/// recurrence so intermediate values never overflow for large l*t.
inline void eval_function_row(double t, const LaguerreBasis& basis, Vector& values) {
  const Index count = values.size();
  if (count == 0) return;
  const double a = basis.a;
  const double x = 2.0 * a * t;
  const double scale = std::sqrt(2.0 * a) * std::exp(-a * t);
  values[0] = scale;
  if (count == 1) return;
  values[1] = scale * (1.0 - x);
  for (Index k = 1; k + 1 < count; ++k)
    values[k + 1] = ((2.0 * k + 1.0 - x) * values[k] - k * values[k - 1]) / (k + 1.0);
}

/// phi_l(t) = sqrt(2a) exp(-a t) L_l(2 a t).
inline double eval_function(Index l, double t, const LaguerreBasis& basis = {}) {
  Vector row(l + 1);
  eval_function_row(t, basis, row);
  return row[l];
}

/// Pointwise series values sum_l coeffs[l] phi_l(t_i).
inline Vector eval_series(const LaguerreSeries& s, const Vector& grid) {
  Vector out(grid.size());
  Vector row(s.coeffs.size());
  for (Index i = 0; i < grid.size(); ++i) {
    eval_function_row(grid[i], s.basis, row);
    out[i] = row.dot(s.coeffs);
  }
  return out;
}

inline double eval_series_at(const LaguerreSeries& s, double t) {
  Vector g(1);
  g[0] = t;
  return eval_series(s, g)[0];
}

/// Projection coefficients <f, phi_l> for l = 0..L by composite
/// Gauss-Legendre panels on [0, spec.upper_limit], doubling the panel count
/// until every coefficient moves by less than spec.tolerance.
inline LaguerreSeries project(const std::function<double(double)>& f, Index L,
                              const LaguerreBasis& basis = {}, QuadratureSpec spec = {}) {
  if (L < 0) throw std::invalid_argument("project: negative degree");
  auto pass = [&](int panels) {
    std::vector<double> x, w;
    detail::gauss_legendre(spec.points_per_panel, x, w);
    Vector acc = Vector::Zero(L + 1);
    Vector row(L + 1);
    const double h = spec.upper_limit / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = p * h + 0.5 * h;
      for (int i = 0; i < spec.points_per_panel; ++i) {
        const double t = mid + 0.5 * h * x[i];
        eval_function_row(t, basis, row);
        acc += (0.5 * h * w[i] * f(t)) * row;
      }
    }
    return acc;
  };
  int panels = spec.initial_panels;
  Vector prev = pass(panels);
  for (int d = 0; d < spec.max_doublings; ++d) {
    panels *= 2;
    Vector cur = pass(panels);
    if ((cur - prev).cwiseAbs().maxCoeff() <= spec.tolerance) return LaguerreSeries(cur, basis.a);
    prev = std::move(cur);
  }
  throw std::runtime_error("project: quadrature did not stabilise; raise panel budget");
}

/// Trapezoid-sum coefficients from irregular samples:
/// sum_i (y_i phi_l(t_i) + y_{i+1} phi_l(t_{i+1}))/2 * (t_{i+1} - t_i).
inline LaguerreSeries trapezoid_coeffs(const Vector& times, const Vector& samples, Index L,
                                       const LaguerreBasis& basis = {}) {
  const Index n = times.size();
  if (n < 2) throw std::invalid_argument("trapezoid_coeffs: need at least two samples");
  if (samples.size() != n) throw std::invalid_argument("trapezoid_coeffs: size mismatch");
  for (Index i = 1; i < n; ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("trapezoid_coeffs: times must be strictly increasing");

  Vector acc = Vector::Zero(L + 1);
  Vector row_lo(L + 1), row_hi(L + 1);
  eval_function_row(times[0], basis, row_lo);
  for (Index i = 0; i + 1 < n; ++i) {
    eval_function_row(times[i + 1], basis, row_hi);
    const double dt = times[i + 1] - times[i];
    acc += 0.5 * dt * (samples[i] * row_lo + samples[i + 1] * row_hi);
    row_lo.swap(row_hi);
  }
  return LaguerreSeries(acc, basis.a);
}

/// Sobolev-Laguerre quantity sum_l ((l+1/2)^s coeffs[l])^2, as displayed;
/// no square root is taken.
inline double sobolev_norm(double s_exponent, const LaguerreSeries& series) {
  if (s_exponent < 0.0) throw std::invalid_argument("sobolev_norm: negative exponent");
  double total = 0.0;
  for (Index l = 0; l < series.coeffs.size(); ++l)
    total += std::pow(l + 0.5, 2.0 * s_exponent) * series.coeffs[l] * series.coeffs[l];
  return total;
}

/// Squared L^2 distance by Parseval over the union of index ranges.
inline double l2_distance_sq(const LaguerreSeries& u, const LaguerreSeries& v) {
  if (u.basis.a != v.basis.a)
    throw std::invalid_argument("l2_distance_sq: mismatched basis scale");
  const Index n = std::max(u.coeffs.size(), v.coeffs.size());
  double total = 0.0;
  for (Index l = 0; l < n; ++l) {
    const double a = l < u.coeffs.size() ? u.coeffs[l] : 0.0;
    const double b = l < v.coeffs.size() ? v.coeffs[l] : 0.0;
    total += (a - b) * (a - b);
  }
  return total;
}

inline double l2_norm_sq(const LaguerreSeries& u) { return u.coeffs.squaredNorm(); }

} // namespace lagdec
