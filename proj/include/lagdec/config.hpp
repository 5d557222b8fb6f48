#pragma once

// TOML config -> experiment specs. Keys mirror the experiment field names;
// every key is optional and falls back to the benchmark defaults.

#include <string>
#include <vector>

#include "lagdec/harness.hpp"
#include "lagdec/toml.hpp"

namespace lagdec {

namespace detail {

inline void load_common(const toml::Table& t, std::string& target,
                        std::vector<double>& custom_coeffs, std::vector<double>& kernel_g_dot,
                        int& reps, bool& run_one, bool& run_two, double& nu, Index& l_max,
                        ThresholdConstants& c, std::uint64_t& seed) {
  target = t.string_or("target", target);
  if (t.contains("custom_coeffs")) custom_coeffs = t.number_list("custom_coeffs");
  if (t.contains("kernel_gdot")) kernel_g_dot = t.number_list("kernel_gdot");
  reps = static_cast<int>(t.int_or("reps", reps));
  if (t.contains("estimators")) {
    run_one = run_two = false;
    for (const auto& name : t.string_list("estimators")) {
      if (name == "I") run_one = true;
      else if (name == "II") run_two = true;
      else throw std::runtime_error("config: unknown estimator '" + name + "'");
    }
  }
  nu = t.number_or("nu", nu);
  l_max = static_cast<Index>(t.int_or("l_max", l_max));
  c.lambda = t.number_or("lambda", c.lambda);
  c.kappa = t.number_or("kappa", c.kappa);
  c.tau_sig_one = t.number_or("tau_sig_one", c.tau_sig_one);
  c.tau_sig_two = t.number_or("tau_sig_two", c.tau_sig_two);
  c.tau_op = t.number_or("tau_op", c.tau_op);
  seed = static_cast<std::uint64_t>(t.int_or("seed", static_cast<std::int64_t>(seed)));
}

} // namespace detail

inline MseGridSpec load_mse_grid_spec(const toml::Table& t, const std::string& name) {
  MseGridSpec s;
  s.name = name;
  detail::load_common(t, s.target, s.custom_coeffs, s.kernel_g_dot, s.reps, s.run_alg_one,
                      s.run_alg_two, s.nu, s.l_max, s.constants, s.seed);
  if (t.contains("epsilon")) s.epsilons = t.number_list("epsilon");
  if (t.contains("delta")) s.deltas = t.number_list("delta");
  return s;
}

inline DesignExperimentSpec load_design_spec(const toml::Table& t, const std::string& name) {
  DesignExperimentSpec s;
  s.name = name;
  detail::load_common(t, s.target, s.custom_coeffs, s.kernel_g_dot, s.reps, s.run_alg_one,
                      s.run_alg_two, s.nu, s.l_max, s.constants, s.seed);
  s.sigma = t.number_or("sigma", s.sigma);
  s.delta = t.number_or("delta", s.delta);
  s.horizon = t.number_or("T", s.horizon);
  s.alpha = t.number_or("alpha", s.alpha);
  if (t.contains("n")) {
    s.n_values.clear();
    if (t.at("n").is_array())
      for (double v : t.number_list("n")) s.n_values.push_back(static_cast<Index>(v));
    else
      s.n_values.push_back(static_cast<Index>(t.at("n").as_int()));
  }
  return s;
}

inline RegressionSpec load_regression_spec(const toml::Table& t, const std::string& name) {
  RegressionSpec s;
  s.name = name;
  std::string target = "f3";
  std::vector<double> custom, kernel = {1.0, -1.0};
  bool run_one = true, run_two = true;
  detail::load_common(t, target, custom, kernel, s.reps, run_one, run_two, s.nu, s.l_max,
                      s.constants, s.seed);
  if (target != "f3")
    throw std::runtime_error("config: the regression experiment targets f3 only");
  s.step = t.number_or("step", s.step);
  s.jitter_sd = t.number_or("jitter_sd", s.jitter_sd);
  s.n = static_cast<Index>(t.int_or("n", s.n));
  s.sigma = t.number_or("sigma", s.sigma);
  s.delta = t.number_or("delta", s.delta);
  return s;
}

} // namespace lagdec
