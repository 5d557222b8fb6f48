#pragma once

// Plot-data emission: each curve is a two-column (t, value) CSV, and a
// manifest JSON names the curves of an experiment. Files are data only;
// rendering is out of scope.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lagdec/harness.hpp"

namespace lagdec {

struct CurveFile {
  std::string name;
  std::string file;
};

inline void write_curve(const std::string& path, const Vector& t, const Vector& v) {
  CsvWriter csv(path);
  csv.row({"t", "value"});
  for (Index i = 0; i < t.size(); ++i) csv.row({format_number(t[i]), format_number(v[i])});
}

inline void write_manifest(const std::string& path, const std::string& experiment,
                           const std::vector<CurveFile>& curves) {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["curves"] = nlohmann::json::array();
  for (const auto& c : curves) j["curves"].push_back({{"name", c.name}, {"file", c.file}});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << j.dump(2) << '\n';
}

inline Vector linspace(double lo, double hi, Index count) {
  Vector t(count);
  for (Index i = 0; i < count; ++i)
    t[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return t;
}

/// One-realization curves for a grid cell: truth and both estimates.
inline void emit_mse_grid_plots(const MseGridSpec& spec, double eps, double delta,
                                const std::string& out_dir) {
  const LaguerreSeries truth = truth_series(spec.target, 2 * spec.l_max, spec.custom_coeffs);
  const Vector f = truth.coeffs.head(spec.l_max + 1);
  const Vector g_dot = to_vector(spec.kernel_g_dot, spec.l_max + 1);
  const Observations obs = synthesize_sequence(f, g_dot, NoiseLevels::sequence(eps, delta),
                                               std::nullopt, mix_seed(spec.seed, 0));
  const Vector t = linspace(0.0, 15.0, 400);
  std::vector<CurveFile> curves;
  auto emit = [&](const std::string& label, const LaguerreSeries& s) {
    const std::string file = spec.name + "_" + label + ".csv";
    write_curve(out_dir + "/" + file, t, eval_series(s, t));
    curves.push_back({label, file});
  };
  emit("truth", truth);
  emit("estimate_I",
       estimate(obs, make_config(Algorithm::I, spec.constants, spec.nu, spec.l_max)).estimate);
  emit("estimate_II",
       estimate(obs, make_config(Algorithm::II, spec.constants, spec.nu, spec.l_max)).estimate);
  write_manifest(out_dir + "/" + spec.name + "_manifest.json", spec.name, curves);
}

/// One-realization curves for the first design size: truth and, per
/// algorithm, the formula-level and design-level estimates.
inline void emit_design_plots(const DesignExperimentSpec& spec, const std::string& out_dir) {
  const Index n = spec.n_values.front();
  const LaguerreSeries truth = truth_series(spec.target, 2 * spec.l_max, spec.custom_coeffs);
  const detail::DesignContext ctx = detail::make_design_context(spec, n, truth);
  const ZetaResult zr = detail::design_zeta(ctx, spec.constants.kappa, mix_seed(spec.seed, 0));

  const Vector t = linspace(0.0, 15.0, 400);
  std::vector<CurveFile> curves;
  auto emit = [&](const std::string& label, const LaguerreSeries& s) {
    const std::string file = spec.name + "_" + label + ".csv";
    write_curve(out_dir + "/" + file, t, eval_series(s, t));
    curves.push_back({label, file});
  };
  emit("truth", truth);
  for (Algorithm alg : {Algorithm::I, Algorithm::II}) {
    const EstimatorConfig cfg = make_config(alg, spec.constants, spec.nu, spec.l_max, spec.alpha);
    const Index level_formula = detail::design_level_formula(ctx, alg, spec);
    const Index level_design = design_adjusted_level(level_formula, ctx.omega_norms, cfg.alpha);
    emit(std::string("estimate_") + algorithm_name(alg) + "_levelL",
         assemble_estimate(zr, ctx.noise, cfg, level_formula, level_formula).estimate);
    emit(std::string("estimate_") + algorithm_name(alg) + "_levelN",
         assemble_estimate(zr, ctx.noise, cfg, level_formula, level_design).estimate);
  }
  write_manifest(out_dir + "/" + spec.name + "_manifest.json", spec.name, curves);
}

/// One-realization curves for the regression model: truth, both estimates,
/// and the noisy samples (t_i, y_i).
inline void emit_regression_plots(const RegressionSpec& spec, const std::string& out_dir) {
  const LaguerreSeries truth(binomial_series(-0.5, 2 * spec.l_max), 0.5);
  const LaguerreSeries q_series(binomial_series(-1.5, 2 * spec.l_max), 0.5);
  Vector g_dot = Vector::Zero(spec.l_max + 1);
  g_dot[0] = 1.0;
  g_dot[1] = -1.0;

  Rng rng(mix_seed(spec.seed, 0));
  const DesignGrid design = DesignGrid::cumulative_step(spec.step, spec.jitter_sd, spec.n, rng);
  const NoiseLevels noise = NoiseLevels::regression(spec.sigma, spec.delta, design.horizon, spec.n);
  Vector y = eval_series(q_series, design.times);
  for (Index i = 0; i < y.size(); ++i) y[i] += spec.sigma * rng.normal();
  const Vector q_hat = trapezoid_coeffs(design.times, y, spec.l_max).coeffs;
  const Vector g_noisy = g_dot + noise.delta * rng.normal_vector(spec.l_max + 1);
  const Observations obs(q_hat, g_noisy, noise);

  const Vector t = linspace(0.0, 15.0, 400);
  std::vector<CurveFile> curves;
  auto emit = [&](const std::string& label, const LaguerreSeries& s) {
    const std::string file = spec.name + "_" + label + ".csv";
    write_curve(out_dir + "/" + file, t, eval_series(s, t));
    curves.push_back({label, file});
  };
  emit("truth", truth);
  emit("estimate_I",
       estimate(obs, make_config(Algorithm::I, spec.constants, spec.nu, spec.l_max)).estimate);
  emit("estimate_II",
       estimate(obs, make_config(Algorithm::II, spec.constants, spec.nu, spec.l_max)).estimate);

  const std::string samples_file = spec.name + "_samples.csv";
  write_curve(out_dir + "/" + samples_file, design.times, y);
  curves.push_back({"samples", samples_file});
  write_manifest(out_dir + "/" + spec.name + "_manifest.json", spec.name, curves);
}

} // namespace lagdec
