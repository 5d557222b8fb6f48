#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lagdec/model.hpp"

namespace lagdec {

enum class Algorithm { I, II };

/// Tuning constants of the two procedures. Defaults follow the calibrated
/// benchmark values: lambda = 1, kappa = 0.3, tau_op = 0.1, and
/// tau_sig = 0.5 (Algorithm I) / 1.0 (Algorithm II). nu is only read by
/// Algorithm I. l_max is a hard cap on the maximal level; alpha gates the
/// design-adjusted level N.
struct EstimatorConfig {
  double lambda = 1.0;
  double kappa = 0.3;
  double tau_sig = 0.5;
  double tau_op = 0.1;
  double nu = 1.0;
  Algorithm variant = Algorithm::I;
  Index l_max = 50;
  double alpha = 1.5;
  double basis_a = 0.5;

  void validate() const {
    if (!(lambda > 0.0) || !(kappa > 0.0) || !(tau_sig > 0.0) || !(tau_op > 0.0))
      throw std::invalid_argument("EstimatorConfig: constants must be positive");
    if (nu < 0.0) throw std::invalid_argument("EstimatorConfig: negative nu");
    if (l_max < 0) throw std::invalid_argument("EstimatorConfig: negative l_max");
    if (!(alpha > 0.0)) throw std::invalid_argument("EstimatorConfig: alpha must be positive");
  }

  static EstimatorConfig algorithm_one(double nu_dip = 1.0) {
    EstimatorConfig c;
    c.variant = Algorithm::I;
    c.tau_sig = 0.5;
    c.nu = nu_dip;
    return c;
  }
  static EstimatorConfig algorithm_two() {
    EstimatorConfig c;
    c.variant = Algorithm::II;
    c.tau_sig = 1.0;
    return c;
  }
};

struct EstimateReport {
  LaguerreSeries estimate;
  std::vector<Index> kept_levels;
  std::vector<Index> gate_failures;
  Index level_formula = 0; // L from the noise-level formula
  Index level_used = 0;    // N after the design adjustment (equals L without one)
};

// x sqrt(|log x|) and x |log x|, continued by 0 at x = 0.
inline double sig_term(double x) { return x == 0.0 ? 0.0 : x * std::sqrt(std::abs(std::log(x))); }
inline double op_term(double x) { return x == 0.0 ? 0.0 : x * std::abs(std::log(x)); }

/// L^I = floor(lambda (eps sqrt|log eps| v delta |log delta|)^{-1/(nu+1)}),
/// capped at l_max; both levels zero means the noiseless convention L = l_max.
inline Index max_level_one(double eps, double delta, double lambda, double nu,
                           Index l_max = 50) {
  if (eps < 0.0 || delta < 0.0) throw std::invalid_argument("max_level_one: negative level");
  const double m = std::max(sig_term(eps), op_term(delta));
  if (m == 0.0) return l_max;
  const double level = lambda * std::pow(m, -1.0 / (nu + 1.0));
  if (!(level < static_cast<double>(l_max))) return l_max;
  return std::max<Index>(0, static_cast<Index>(std::floor(level)));
}

/// L^II: same with exponent -1.
inline Index max_level_two(double eps, double delta, double lambda, Index l_max = 50) {
  if (eps < 0.0 || delta < 0.0) throw std::invalid_argument("max_level_two: negative level");
  const double m = std::max(sig_term(eps), op_term(delta));
  if (m == 0.0) return l_max;
  const double level = lambda / m;
  if (!(level < static_cast<double>(l_max))) return l_max;
  return std::max<Index>(0, static_cast<Index>(std::floor(level)));
}

/// O_{l,delta} = kappa ((l v 1) log(l v 2))^{1/2} delta sqrt|log delta|;
/// zero at delta = 0, where the gate never trips.
inline double operator_threshold(Index l, double delta, double kappa) {
  if (delta == 0.0) return 0.0;
  const double lv1 = static_cast<double>(std::max<Index>(l, 1));
  const double lv2 = static_cast<double>(std::max<Index>(l, 2));
  return kappa * std::sqrt(lv1 * std::log(lv2)) * sig_term(delta);
}

/// S^I_l = (l v 1)^nu (tau_sig eps sqrt|log eps| v tau_op delta |log delta|).
inline double signal_threshold_one(Index l, const NoiseLevels& noise, const EstimatorConfig& cfg) {
  const double lv1 = static_cast<double>(std::max<Index>(l, 1));
  return std::pow(lv1, cfg.nu) *
         std::max(cfg.tau_sig * sig_term(noise.epsilon), cfg.tau_op * op_term(noise.delta));
}

/// S^II_l = ||(K_delta^l)^{-1}||_HS (l v 1)^{-1/2} (tau_sig eps sqrt|log eps|
/// v tau_op delta |log delta|), and +infinity when the operator gate is shut.
inline double signal_threshold_two(Index l, const LowerToeplitz& k_delta_inv, bool gate_open,
                                   const NoiseLevels& noise, const EstimatorConfig& cfg) {
  if (!gate_open) return std::numeric_limits<double>::infinity();
  const double lv1 = static_cast<double>(std::max<Index>(l, 1));
  return hs_norm(k_delta_inv) / std::sqrt(lv1) *
         std::max(cfg.tau_sig * sig_term(noise.epsilon), cfg.tau_op * op_term(noise.delta));
}

/// N = L ^ max{l >= 0 : ||Omega_l||_op <= alpha}. Levels past the provided
/// norms count as failing the gate; an empty qualifying set degrades to 0.
inline Index design_adjusted_level(Index L, const Vector& norms, double alpha) {
  Index best = -1;
  for (Index l = 0; l < norms.size(); ++l)
    if (norms[l] <= alpha) best = l;
  return std::min(L, std::max<Index>(best, 0));
}

struct ZetaResult {
  Vector zeta;
  std::vector<bool> gate_open;
  Vector gamma_delta; // reciprocal series of the noisy operator (zeros if singular)
};

/// Reciprocal column of the noisy operator and the per-level operator gates.
/// Both are left in the all-shut / all-zero state when the leading
/// coefficient vanishes or the reciprocal overflows. Per-level spectral
/// norms come from the dense truncations (skipped at delta = 0, where the
/// gate never trips).
inline ZetaResult noisy_inverse_gates(const Vector& g_dot_noisy, Index L, double delta,
                                      double kappa) {
  if (g_dot_noisy.size() < L + 1)
    throw std::invalid_argument("noisy_inverse_gates: operator column too short");
  ZetaResult res;
  res.zeta = Vector::Zero(L + 1);
  res.gate_open.assign(L + 1, false);
  res.gamma_delta = Vector::Zero(L + 1);

  if (g_dot_noisy[0] == 0.0) return res; // singular noisy operator: all gates shut
  const Vector gamma = invert_series(g_dot_noisy.head(L + 1));
  res.gamma_delta = gamma;
  for (Index l = 0; l <= L; ++l) {
    bool open = true;
    if (!gamma.head(l + 1).allFinite()) {
      open = false; // overflowed reciprocal: inverse norm beyond any gate
    } else if (delta > 0.0) {
      const double gate_cap = 1.0 / operator_threshold(l, delta, kappa);
      open = op_norm(LowerToeplitz(gamma.head(l + 1))) < gate_cap;
    }
    res.gate_open[l] = open;
  }
  return res;
}

/// zeta_l = <(K_delta^l)^{-1} y^l, phi_l> when the operator gate is open at
/// level l, else 0. One series reciprocal at the top level is reused for all
/// prefixes.
inline ZetaResult zeta_coefficients(const Observations& obs, Index L, const EstimatorConfig& cfg) {
  if (obs.levels() < L) throw std::invalid_argument("zeta_coefficients: observations too short");
  ZetaResult res = noisy_inverse_gates(obs.g_dot_noisy, L, obs.noise.delta, cfg.kappa);
  for (Index l = 0; l <= L; ++l) {
    if (!res.gate_open[l]) continue;
    double acc = 0.0;
    for (Index k = 0; k <= l; ++k) acc += res.gamma_delta[l - k] * obs.y_coeffs[k];
    res.zeta[l] = acc;
  }
  return res;
}

/// Thresholding pass shared by every observation route: keeps the zeta
/// coefficients at levels <= level_used that clear their signal threshold.
inline EstimateReport assemble_estimate(const ZetaResult& zr, const NoiseLevels& noise,
                                        const EstimatorConfig& cfg, Index level_formula,
                                        Index level_used) {
  const Index N = level_used;
  Vector out = Vector::Zero(N + 1);
  EstimateReport report{LaguerreSeries(out, cfg.basis_a), {}, {}, level_formula, N};
  for (Index l = 0; l <= N; ++l) {
    if (!zr.gate_open[l]) report.gate_failures.push_back(l);
    double threshold;
    if (cfg.variant == Algorithm::I) {
      threshold = zr.gate_open[l] ? signal_threshold_one(l, noise, cfg)
                                  : std::numeric_limits<double>::infinity();
    } else {
      // the HS factor only matters on the open branch, where gamma is finite
      const LowerToeplitz inv(zr.gate_open[l] ? Vector(zr.gamma_delta.head(l + 1))
                                              : Vector(Vector::Zero(l + 1)));
      threshold = signal_threshold_two(l, inv, zr.gate_open[l], noise, cfg);
    }
    if (std::abs(zr.zeta[l]) > threshold) {
      out[l] = zr.zeta[l];
      report.kept_levels.push_back(l);
    }
  }
  report.estimate = LaguerreSeries(out, cfg.basis_a);
  return report;
}

/// Hard-threshold estimate of f from sequence-model observations. The level
/// is the formula level of the chosen variant; when design norms are given,
/// it is lowered to N = L ^ max{l >= 0 : ||Omega_l||_op <= alpha}.
inline EstimateReport estimate(const Observations& obs, const EstimatorConfig& cfg,
                               const std::optional<Vector>& design_norms = std::nullopt) {
  cfg.validate();
  const double eps = obs.noise.epsilon;
  const double delta = obs.noise.delta;

  const Index L = cfg.variant == Algorithm::I
                      ? max_level_one(eps, delta, cfg.lambda, cfg.nu, cfg.l_max)
                      : max_level_two(eps, delta, cfg.lambda, cfg.l_max);
  if (obs.levels() < L)
    throw std::invalid_argument("estimate: observations cover " + std::to_string(obs.levels()) +
                                " levels, formula needs " + std::to_string(L));

  const Index N = design_norms ? design_adjusted_level(L, *design_norms, cfg.alpha) : L;
  return assemble_estimate(zeta_coefficients(obs, N, cfg), obs.noise, cfg, L, N);
}

} // namespace lagdec
