#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lagdec/estimator.hpp"

namespace lagdec {

/// Trace of a benchmark calibration: one (candidate, average surviving
/// count) pair per candidate tried, and the selected value.
struct CalibrationResult {
  std::string constant_name;
  double value = 0.0;
  std::vector<std::pair<double, double>> trace;
};

struct CalibrationFailure : std::runtime_error {
  std::vector<std::pair<double, double>> trace;
  explicit CalibrationFailure(const std::string& what,
                              std::vector<std::pair<double, double>> tr)
      : std::runtime_error(what), trace(std::move(tr)) {}
};

namespace detail {

// Selection takes the smallest candidate whose average count rounds to zero,
// matching the integer entries of the benchmark tables.
inline bool counts_as_zero(double avg) { return avg < 0.5; }

constexpr Index kBenchmarkLevels = 10; // survivors are counted for l <= 10

} // namespace detail

/// Benchmark for the operator gate constant: the kernel is g = 0, so the
/// noisy column is pure noise delta*b and every level should be rejected.
/// Returns the smallest grid value whose average number of open gates at
/// levels l <= 10 (over `reps` draws) rounds to zero.
inline CalibrationResult calibrate_kappa(double delta, int reps, const std::vector<double>& grid,
                                         std::uint64_t seed) {
  if (reps < 1) throw std::invalid_argument("calibrate_kappa: reps must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("calibrate_kappa: delta must be positive");
  if (grid.empty()) throw std::invalid_argument("calibrate_kappa: empty grid");
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("calibrate_kappa: grid not increasing");

  const Index L = detail::kBenchmarkLevels;
  // Common random numbers: the per-level inverse norms are drawn once per
  // replication and shared across candidates, so the trace is monotone.
  std::vector<Vector> inv_norms(reps);
  for (int r = 0; r < reps; ++r) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
    const Vector b = rng.normal_vector(L + 1);
    Vector norms = Vector::Constant(L + 1, std::numeric_limits<double>::infinity());
    const Vector g_delta = delta * b;
    if (g_delta[0] != 0.0) {
      const Vector gamma = invert_series(g_delta);
      for (Index l = 0; l <= L; ++l)
        if (gamma.head(l + 1).allFinite()) norms[l] = op_norm(LowerToeplitz(gamma.head(l + 1)));
    }
    inv_norms[r] = std::move(norms);
  }

  CalibrationResult result;
  result.constant_name = "kappa";
  for (double kappa : grid) {
    double total = 0.0;
    for (int r = 0; r < reps; ++r)
      for (Index l = 0; l <= L; ++l)
        if (inv_norms[r][l] < 1.0 / operator_threshold(l, delta, kappa)) total += 1.0;
    const double avg = total / reps;
    result.trace.emplace_back(kappa, avg);
    if (detail::counts_as_zero(avg)) {
      result.value = kappa;
      return result;
    }
  }
  throw CalibrationFailure("calibrate_kappa: no grid value closes every gate", result.trace);
}

enum class TauKind { sig, op };

/// Benchmark for the signal-threshold constants: f = 0, kernel g = phi_0,
/// noise pair (eps, delta) = (1e-1, 1e-2) for tau_sig and (1e-2, 1e-1) for
/// tau_op. Candidates increase until the full estimator kills every
/// coefficient at levels l <= 10 on average.
inline CalibrationResult calibrate_tau(Algorithm variant, TauKind which, int reps,
                                       const std::vector<double>& grid, std::uint64_t seed,
                                       double kappa = 0.3, double tau_sig_fixed = 0.0) {
  if (reps < 1) throw std::invalid_argument("calibrate_tau: reps must be positive");
  if (grid.empty()) throw std::invalid_argument("calibrate_tau: empty grid");
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("calibrate_tau: grid not increasing");

  const double eps = which == TauKind::sig ? 1e-1 : 1e-2;
  const double delta = which == TauKind::sig ? 1e-2 : 1e-1;
  const Index L = detail::kBenchmarkLevels;

  Vector g_dot = Vector::Zero(L + 1);
  g_dot[0] = 1.0;
  g_dot[1] = -1.0;
  const Vector f_zero = Vector::Zero(L + 1);
  const NoiseLevels noise = NoiseLevels::sequence(eps, delta);

  std::vector<Observations> obs;
  obs.reserve(reps);
  for (int r = 0; r < reps; ++r)
    obs.push_back(synthesize_sequence(f_zero, g_dot, noise, std::nullopt,
                                      mix_seed(seed, static_cast<std::uint64_t>(r))));

  EstimatorConfig base =
      variant == Algorithm::I ? EstimatorConfig::algorithm_one() : EstimatorConfig::algorithm_two();
  base.kappa = kappa;
  base.l_max = L; // the benchmark counts levels l <= 10 only
  if (tau_sig_fixed > 0.0) base.tau_sig = tau_sig_fixed;

  CalibrationResult result;
  result.constant_name = which == TauKind::sig ? "tau_sig" : "tau_op";
  for (double tau : grid) {
    EstimatorConfig cfg = base;
    (which == TauKind::sig ? cfg.tau_sig : cfg.tau_op) = tau;
    double total = 0.0;
    for (int r = 0; r < reps; ++r) total += static_cast<double>(estimate(obs[r], cfg).kept_levels.size());
    const double avg = total / reps;
    result.trace.emplace_back(tau, avg);
    if (detail::counts_as_zero(avg)) {
      result.value = tau;
      return result;
    }
  }
  throw CalibrationFailure("calibrate_tau: no grid value kills every coefficient", result.trace);
}

} // namespace lagdec
