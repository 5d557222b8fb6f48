#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lagdec/calibrate.hpp"
#include "lagdec/csv.hpp"
#include "lagdec/estimator.hpp"
#include "lagdec/model.hpp"

namespace lagdec {

// ---------------------------------------------------------------------------
// benchmark targets

inline double target_f1(double t) { return (t * t - t) * std::exp(-t); }
inline double target_f2(double t) { return (std::sqrt(t) - t) * std::exp(-t); }

/// Laguerre coefficients of the named target up to `degree`, at a = 1/2.
/// f1 is projected by quadrature; f2 likewise but through t = u^2, which
/// removes the sqrt kink at the origin; f3 is defined by its coefficient
/// series (1-z)^{1/2}.
inline LaguerreSeries truth_series(const std::string& target, Index degree,
                                   const std::vector<double>& custom = {}) {
  const LaguerreBasis basis(0.5, degree);
  if (target == "f1") {
    QuadratureSpec spec;
    spec.initial_panels = 64;
    spec.max_doublings = 7;
    spec.tolerance = 1e-11;
    return project(target_f1, degree, basis, spec);
  }
  if (target == "f2") {
    const double upper = std::sqrt(80.0);
    auto pass = [&](int panels) {
      std::vector<double> x, w;
      detail::gauss_legendre(16, x, w);
      Vector acc = Vector::Zero(degree + 1);
      Vector row(degree + 1);
      const double h = upper / panels;
      for (int p = 0; p < panels; ++p) {
        const double mid = p * h + 0.5 * h;
        for (int i = 0; i < 16; ++i) {
          const double u = mid + 0.5 * h * x[i];
          eval_function_row(u * u, basis, row);
          acc += (0.5 * h * w[i] * (u - u * u) * std::exp(-u * u) * 2.0 * u) * row;
        }
      }
      return acc;
    };
    int panels = 64;
    Vector prev = pass(panels);
    for (int d = 0; d < 7; ++d) {
      panels *= 2;
      Vector cur = pass(panels);
      if ((cur - prev).cwiseAbs().maxCoeff() <= 1e-11) return LaguerreSeries(cur, 0.5);
      prev = std::move(cur);
    }
    throw std::runtime_error("truth_series: f2 quadrature did not stabilise");
  }
  if (target == "f3") return LaguerreSeries(binomial_series(-0.5, degree), 0.5);
  if (target == "custom") {
    if (custom.empty()) throw std::invalid_argument("truth_series: custom target without coefficients");
    Vector c(static_cast<Index>(custom.size()));
    for (size_t i = 0; i < custom.size(); ++i) c[static_cast<Index>(i)] = custom[i];
    return LaguerreSeries(std::move(c), 0.5);
  }
  throw std::invalid_argument("truth_series: unknown target '" + target + "'");
}

/// ||estimate - truth||^2 / ||truth||^2 by Parseval.
inline double normalized_mse(const LaguerreSeries& estimate, const LaguerreSeries& truth) {
  const double denom = l2_norm_sq(truth);
  if (denom == 0.0) throw std::invalid_argument("normalized_mse: truth is identically zero");
  return l2_distance_sq(estimate, truth) / denom;
}

// ---------------------------------------------------------------------------
// shared pieces

struct ThresholdConstants {
  double lambda = 1.0;
  double kappa = 0.3;
  double tau_sig_one = 0.5;
  double tau_sig_two = 1.0;
  double tau_op = 0.1;
};

inline EstimatorConfig make_config(Algorithm alg, const ThresholdConstants& c, double nu,
                                   Index l_max, double alpha = 1.5) {
  EstimatorConfig cfg =
      alg == Algorithm::I ? EstimatorConfig::algorithm_one(nu) : EstimatorConfig::algorithm_two();
  cfg.lambda = c.lambda;
  cfg.kappa = c.kappa;
  cfg.tau_sig = alg == Algorithm::I ? c.tau_sig_one : c.tau_sig_two;
  cfg.tau_op = c.tau_op;
  cfg.l_max = l_max;
  cfg.alpha = alpha;
  return cfg;
}

inline const char* algorithm_name(Algorithm a) { return a == Algorithm::I ? "I" : "II"; }

namespace detail {

// Runs fn(i) for i in [0, count) over `threads` workers; each index writes
// only its own output slots, so results do not depend on the schedule.
inline void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += threads) fn(i);
    });
  for (auto& th : pool) th.join();
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_and_se(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

} // namespace detail

// ---------------------------------------------------------------------------
// benchmark MSE grid: (epsilon, delta) cells in the ideal sequence model

struct MseGridSpec {
  std::string name = "table3";
  std::string target = "f1";
  std::vector<double> custom_coeffs;
  std::vector<double> kernel_g_dot = {1.0, -1.0};
  std::vector<double> epsilons = {0.0, 1e-3, 1e-2, 3e-2};
  std::vector<double> deltas = {0.0, 1e-3, 1e-2, 3e-2};
  int reps = 500;
  bool run_alg_one = true;
  bool run_alg_two = true;
  double nu = 1.0;
  Index l_max = 50;
  ThresholdConstants constants;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct MseRow {
  double epsilon = 0.0;
  double delta = 0.0;
  Algorithm alg = Algorithm::I;
  double mse = 0.0;
  double stderr_ = 0.0;
  int reps = 0;
};

struct MseTable {
  std::vector<MseRow> rows;

  const MseRow& cell(double eps, double delta, Algorithm alg) const {
    for (const auto& r : rows)
      if (r.epsilon == eps && r.delta == delta && r.alg == alg) return r;
    throw std::out_of_range("MseTable: no such cell");
  }
};

inline Vector to_vector(const std::vector<double>& xs, Index pad_to = -1) {
  const Index n = pad_to < 0 ? static_cast<Index>(xs.size()) : pad_to;
  Vector out = Vector::Zero(n);
  for (Index i = 0; i < std::min<Index>(n, static_cast<Index>(xs.size())); ++i) out[i] = xs[i];
  return out;
}

/// One replication per (rep) of noise draws shared across every grid cell
/// and estimator (common random numbers); each cell scales the same draws by
/// its own (eps, delta).
inline MseTable run_mse_grid(const MseGridSpec& spec) {
  if (spec.reps < 1) throw std::invalid_argument("run_mse_grid: reps must be positive");
  if (spec.epsilons.empty() || spec.deltas.empty())
    throw std::invalid_argument("run_mse_grid: empty noise grid");

  const LaguerreSeries truth = truth_series(spec.target, 2 * spec.l_max, spec.custom_coeffs);
  const Vector f = truth.coeffs.head(spec.l_max + 1);
  const Vector g_dot = to_vector(spec.kernel_g_dot, spec.l_max + 1);
  const Vector q = forward(f, g_dot);

  std::vector<Algorithm> algs;
  if (spec.run_alg_one) algs.push_back(Algorithm::I);
  if (spec.run_alg_two) algs.push_back(Algorithm::II);
  if (algs.empty()) throw std::invalid_argument("run_mse_grid: no estimator selected");

  const size_t cells = spec.epsilons.size() * spec.deltas.size() * algs.size();
  std::vector<std::vector<double>> mse(cells, std::vector<double>(spec.reps, 0.0));

  detail::parallel_for(spec.reps, spec.threads, [&](int rep) {
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(rep)));
    const Vector z_xi = rng.normal_vector(spec.l_max + 1);
    const Vector z_b = rng.normal_vector(spec.l_max + 1);
    size_t cell = 0;
    for (double delta : spec.deltas) {
      for (double eps : spec.epsilons) {
        const Observations obs(q + eps * z_xi, g_dot + delta * z_b,
                               NoiseLevels::sequence(eps, delta));
        for (Algorithm alg : algs) {
          const EstimatorConfig cfg = make_config(alg, spec.constants, spec.nu, spec.l_max);
          mse[cell++][rep] = normalized_mse(estimate(obs, cfg).estimate, truth);
        }
      }
    }
  });

  MseTable table;
  size_t cell = 0;
  for (double delta : spec.deltas)
    for (double eps : spec.epsilons)
      for (Algorithm alg : algs) {
        const auto [mean, se] = detail::mean_and_se(mse[cell++]);
        table.rows.push_back(MseRow{eps, delta, alg, mean, se, spec.reps});
      }
  return table;
}

inline void write_csv(const MseTable& table, const std::string& path) {
  CsvWriter csv(path);
  csv.row({"epsilon", "delta", "estimator", "mse", "stderr", "reps"});
  for (const auto& r : table.rows)
    csv.row({format_number(r.epsilon), format_number(r.delta), algorithm_name(r.alg),
             format_number(r.mse), format_number(r.stderr_),
             format_number(static_cast<std::int64_t>(r.reps))});
}

// ---------------------------------------------------------------------------
// design experiment: formula level vs design-adjusted level on equispaced grids

struct DesignExperimentSpec {
  std::string name = "table4";
  std::string target = "f2";
  std::vector<double> custom_coeffs;
  std::vector<double> kernel_g_dot = {1.0, -1.0};
  double sigma = 1e-2;
  double delta = 1e-2;
  double horizon = 100.0;
  std::vector<Index> n_values = {200, 250, 500, 750};
  int reps = 500;
  bool run_alg_one = true;
  bool run_alg_two = true;
  double nu = 1.0;
  Index l_max = 50;
  double alpha = 1.5;
  ThresholdConstants constants;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct DesignRow {
  Index n = 0;
  Algorithm alg = Algorithm::I;
  Index level_formula = 0; // L
  Index level_design = 0;  // N
  double mse_formula = 0.0;
  double se_formula = 0.0;
  double mse_design = 0.0;
  double se_design = 0.0;
  int reps = 0;
};

namespace detail {

/// Per-design statics for the design experiment. Observations follow the
/// regression model on the equispaced grid: noisy samples of q projected
/// level by level, y^l = (Phi_l Phi_l^t)^{-1} Phi_l y, so the coefficient
/// noise at level l carries its own covariance eps^2 Omega_l, exactly as in
/// the discretised model. The norms ||Omega_l|| drive the adjusted level N.
struct DesignContext {
  DesignGrid design;
  NoiseLevels noise;
  Index l_draw = 0;
  Vector omega_norms;
  Matrix phi;      // (l_draw+1) x n
  Vector q_values; // noiseless q(t_i)
  Vector g_dot;    // true operator column, length l_draw+1
  std::vector<Eigen::LLT<Matrix>> gram;
};

inline DesignContext make_design_context(const DesignExperimentSpec& spec, Index n,
                                         const LaguerreSeries& truth) {
  DesignContext ctx;
  ctx.design = DesignGrid::equispaced(n, spec.horizon);
  ctx.noise = NoiseLevels::regression(spec.sigma, spec.delta, spec.horizon, n);

  Index l_draw = 0;
  if (spec.run_alg_one)
    l_draw = std::max(l_draw, max_level_one(ctx.noise.epsilon, ctx.noise.delta,
                                            spec.constants.lambda, spec.nu, spec.l_max));
  if (spec.run_alg_two)
    l_draw = std::max(l_draw, max_level_two(ctx.noise.epsilon, ctx.noise.delta,
                                            spec.constants.lambda, spec.l_max));
  ctx.l_draw = l_draw;

  ctx.omega_norms = omega(ctx.design, l_draw).op_norms;
  ctx.phi = design_matrix(ctx.design, l_draw);
  ctx.gram.reserve(l_draw + 1);
  for (Index l = 0; l <= l_draw; ++l) {
    ctx.gram.emplace_back(Matrix(ctx.phi.topRows(l + 1) * ctx.phi.topRows(l + 1).transpose()));
    if (ctx.gram.back().info() != Eigen::Success)
      throw std::runtime_error("design experiment: singular Gram matrix at level " +
                               std::to_string(l));
  }

  const Vector q_full = forward(truth.coeffs, to_vector(spec.kernel_g_dot, truth.coeffs.size()));
  ctx.q_values = eval_series(LaguerreSeries(q_full, 0.5), ctx.design.times);
  ctx.g_dot = to_vector(spec.kernel_g_dot, l_draw + 1);
  return ctx;
}

/// One replication: noisy samples, per-level projected coefficients, zeta
/// and gates. Shared by the Monte-Carlo loop and the plot emission.
inline ZetaResult design_zeta(const DesignContext& ctx, double kappa, std::uint64_t rep_seed) {
  Rng rng(rep_seed);
  Vector y = ctx.q_values;
  for (Index i = 0; i < y.size(); ++i) y[i] += ctx.noise.sigma * rng.normal();
  const Vector g_noisy = ctx.g_dot + ctx.noise.delta * rng.normal_vector(ctx.l_draw + 1);

  ZetaResult zr = noisy_inverse_gates(g_noisy, ctx.l_draw, ctx.noise.delta, kappa);
  for (Index l = 0; l <= ctx.l_draw; ++l) {
    if (!zr.gate_open[l]) continue;
    const Vector coeffs = ctx.gram[l].solve(ctx.phi.topRows(l + 1) * y);
    double acc = 0.0;
    for (Index k = 0; k <= l; ++k) acc += zr.gamma_delta[l - k] * coeffs[k];
    zr.zeta[l] = acc;
  }
  return zr;
}

inline Index design_level_formula(const DesignContext& ctx, Algorithm alg,
                                  const DesignExperimentSpec& spec) {
  return alg == Algorithm::I
             ? max_level_one(ctx.noise.epsilon, ctx.noise.delta, spec.constants.lambda, spec.nu,
                             spec.l_max)
             : max_level_two(ctx.noise.epsilon, ctx.noise.delta, spec.constants.lambda,
                             spec.l_max);
}

} // namespace detail

inline std::vector<DesignRow> run_design_experiment(const DesignExperimentSpec& spec) {
  if (spec.reps < 1) throw std::invalid_argument("run_design_experiment: reps must be positive");
  const LaguerreSeries truth = truth_series(spec.target, 2 * spec.l_max, spec.custom_coeffs);

  std::vector<Algorithm> algs;
  if (spec.run_alg_one) algs.push_back(Algorithm::I);
  if (spec.run_alg_two) algs.push_back(Algorithm::II);
  if (algs.empty()) throw std::invalid_argument("run_design_experiment: no estimator selected");

  std::vector<DesignRow> rows;
  for (size_t ni = 0; ni < spec.n_values.size(); ++ni) {
    const Index n = spec.n_values[ni];
    const detail::DesignContext ctx = detail::make_design_context(spec, n, truth);

    std::vector<std::vector<double>> mse_l(algs.size(), std::vector<double>(spec.reps, 0.0));
    std::vector<std::vector<double>> mse_n(algs.size(), std::vector<double>(spec.reps, 0.0));

    detail::parallel_for(spec.reps, spec.threads, [&](int rep) {
      const std::uint64_t rep_seed =
          mix_seed(spec.seed, (static_cast<std::uint64_t>(ni) << 32) + static_cast<std::uint64_t>(rep));
      const ZetaResult zr = detail::design_zeta(ctx, spec.constants.kappa, rep_seed);
      for (size_t a = 0; a < algs.size(); ++a) {
        const EstimatorConfig cfg =
            make_config(algs[a], spec.constants, spec.nu, spec.l_max, spec.alpha);
        const Index level_formula = detail::design_level_formula(ctx, algs[a], spec);
        const Index level_design =
            design_adjusted_level(level_formula, ctx.omega_norms, spec.alpha);
        mse_l[a][rep] = normalized_mse(
            assemble_estimate(zr, ctx.noise, cfg, level_formula, level_formula).estimate, truth);
        mse_n[a][rep] = normalized_mse(
            assemble_estimate(zr, ctx.noise, cfg, level_formula, level_design).estimate, truth);
      }
    });

    for (size_t a = 0; a < algs.size(); ++a) {
      const Index level_formula = detail::design_level_formula(ctx, algs[a], spec);
      const Index level_design = design_adjusted_level(level_formula, ctx.omega_norms, spec.alpha);
      const auto [m_l, s_l] = detail::mean_and_se(mse_l[a]);
      const auto [m_n, s_n] = detail::mean_and_se(mse_n[a]);
      rows.push_back(
          DesignRow{n, algs[a], level_formula, level_design, m_l, s_l, m_n, s_n, spec.reps});
    }
  }
  return rows;
}

inline void write_csv(const std::vector<DesignRow>& rows, const std::string& path) {
  CsvWriter csv(path);
  csv.row({"n", "estimator", "level_formula", "level_design", "mse_formula_level",
           "stderr_formula_level", "mse_design_level", "stderr_design_level", "reps"});
  for (const auto& r : rows)
    csv.row({format_number(static_cast<std::int64_t>(r.n)), algorithm_name(r.alg),
             format_number(static_cast<std::int64_t>(r.level_formula)),
             format_number(static_cast<std::int64_t>(r.level_design)), format_number(r.mse_formula),
             format_number(r.se_formula), format_number(r.mse_design), format_number(r.se_design),
             format_number(static_cast<std::int64_t>(r.reps))});
}

// ---------------------------------------------------------------------------
// regression experiment: the sampled model on a cumulative-step design

struct RegressionSpec {
  std::string name = "figure4";
  double step = 0.1;
  double jitter_sd = 0.1; // X_j ~ N(0, jitter_sd^2)
  Index n = 100;
  double sigma = 5e-2;
  double delta = 5e-2;
  int reps = 500;
  double nu = 1.0;
  Index l_max = 50;
  ThresholdConstants constants;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct RegressionResult {
  double mse_one = 0.0;
  double se_one = 0.0;
  double mse_two = 0.0;
  double se_two = 0.0;
  int reps = 0;
};

/// Synthesizes y(t_i) = q(t_i) + sigma eta_i from the series-defined
/// q(z) = (1-z)^{3/2}, recovers the q coefficients by the trapezoid sum, and
/// runs both algorithms with the noisy operator column.
inline RegressionResult run_regression_experiment(const RegressionSpec& spec) {
  if (spec.reps < 1) throw std::invalid_argument("run_regression_experiment: reps must be positive");
  const LaguerreSeries truth(binomial_series(-0.5, 2 * spec.l_max), 0.5);
  const LaguerreSeries q_series(binomial_series(-1.5, 2 * spec.l_max), 0.5);
  Vector g_dot = Vector::Zero(spec.l_max + 1);
  g_dot[0] = 1.0;
  g_dot[1] = -1.0;

  std::vector<double> mse_one(spec.reps, 0.0), mse_two(spec.reps, 0.0);
  detail::parallel_for(spec.reps, spec.threads, [&](int rep) {
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(rep)));
    const DesignGrid design = DesignGrid::cumulative_step(spec.step, spec.jitter_sd, spec.n, rng);
    const NoiseLevels noise =
        NoiseLevels::regression(spec.sigma, spec.delta, design.horizon, spec.n);

    Vector y = eval_series(q_series, design.times);
    for (Index i = 0; i < y.size(); ++i) y[i] += spec.sigma * rng.normal();
    const Vector q_hat = trapezoid_coeffs(design.times, y, spec.l_max).coeffs;
    const Vector g_noisy = g_dot + noise.delta * rng.normal_vector(spec.l_max + 1);
    const Observations obs(q_hat, g_noisy, noise);

    mse_one[rep] = normalized_mse(
        estimate(obs, make_config(Algorithm::I, spec.constants, spec.nu, spec.l_max)).estimate,
        truth);
    mse_two[rep] = normalized_mse(
        estimate(obs, make_config(Algorithm::II, spec.constants, spec.nu, spec.l_max)).estimate,
        truth);
  });

  const auto [m1, s1] = detail::mean_and_se(mse_one);
  const auto [m2, s2] = detail::mean_and_se(mse_two);
  return RegressionResult{m1, s1, m2, s2, spec.reps};
}

inline void write_csv(const RegressionSpec& spec, const RegressionResult& res,
                      const std::string& path) {
  CsvWriter csv(path);
  csv.row({"step", "n", "sigma", "delta", "estimator", "mse", "stderr", "reps"});
  csv.row({format_number(spec.step), format_number(static_cast<std::int64_t>(spec.n)),
           format_number(spec.sigma), format_number(spec.delta), "I", format_number(res.mse_one),
           format_number(res.se_one), format_number(static_cast<std::int64_t>(res.reps))});
  csv.row({format_number(spec.step), format_number(static_cast<std::int64_t>(spec.n)),
           format_number(spec.sigma), format_number(spec.delta), "II", format_number(res.mse_two),
           format_number(res.se_two), format_number(static_cast<std::int64_t>(res.reps))});
}

} // namespace lagdec
