// Command-line harness for Laguerre-Galerkin Volterra deconvolution:
// calibration benchmarks, the MSE grid, the design experiment, the
// regression experiment, and single-dataset estimation.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lagdec/config.hpp"
#include "lagdec/plots.hpp"

namespace fs = std::filesystem;
using namespace lagdec;

namespace {

std::string config_stem(const std::string& path) { return fs::path(path).stem().string(); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "'");
}

Vector read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
  std::vector<double> xs;
  std::string tok;
  while (in >> tok) {
    while (!tok.empty() && tok.back() == ',') tok.pop_back();
    if (tok.empty()) continue;
    try {
      xs.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw std::runtime_error("cannot parse number '" + tok + "' in '" + path + "'");
    }
  }
  if (xs.empty()) throw std::runtime_error("no numbers found in '" + path + "'");
  Vector out(static_cast<Index>(xs.size()));
  for (size_t i = 0; i < xs.size(); ++i) out[static_cast<Index>(i)] = xs[i];
  return out;
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

void print_trace(const std::vector<std::pair<double, double>>& trace) {
  std::cout << "candidate  avg_survivors\n";
  for (const auto& [cand, avg] : trace)
    std::cout << format_number(cand) << "  " << format_number(avg) << "\n";
}

void write_calibration_csv(const std::string& path, const std::string& constant,
                           const std::vector<std::pair<double, double>>& trace) {
  CsvWriter csv(path);
  csv.row({"constant", "candidate", "avg_survivors"});
  for (const auto& [cand, avg] : trace)
    csv.row({constant, format_number(cand), format_number(avg)});
}

int run_calibrate(const std::string& constant, const std::string& variant_name, double delta,
                  int reps, std::string grid_csv, std::uint64_t seed, const std::string& out_dir,
                  double kappa) {
  ensure_dir(out_dir);
  const Algorithm variant = variant_name == "II" ? Algorithm::II : Algorithm::I;
  std::vector<double> grid = parse_grid(grid_csv);

  auto report = [&](const CalibrationResult& res, const std::string& label) {
    std::cout << "selected " << res.constant_name << " = " << format_number(res.value) << "\n";
    print_trace(res.trace);
    write_calibration_csv(out_dir + "/calibration_" + label + ".csv", res.constant_name,
                          res.trace);
  };

  try {
    if (constant == "kappa") {
      if (grid.empty()) grid = {0.1, 0.2, 0.3};
      report(calibrate_kappa(delta, reps, grid, seed), "kappa");
    } else if (constant == "tau_sig" || constant == "tau_op") {
      if (grid.empty())
        grid = constant == "tau_sig"
                   ? std::vector<double>{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}
                   : std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
      const TauKind kind = constant == "tau_sig" ? TauKind::sig : TauKind::op;
      report(calibrate_tau(variant, kind, reps, grid, seed, kappa),
             constant + "_" + variant_name);
    } else {
      std::cerr << "unknown constant '" << constant << "' (kappa, tau_sig, tau_op)\n";
      return 2;
    }
  } catch (const CalibrationFailure& e) {
    std::cerr << e.what() << "\n";
    print_trace(e.trace);
    return 1;
  }
  return 0;
}

struct CommonArgs {
  std::string config;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int reps = 0;
  int threads = 1;
  bool plots = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "TOML experiment configuration")->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "seed override")->each([&](const std::string&) {
    args.seed_set = true;
  });
  cmd->add_option("--reps", args.reps, "replication override");
  cmd->add_option("--threads", args.threads, "parallel worker cap");
  cmd->add_flag("--plots", args.plots, "also write one-realization plot data");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laguerre-Galerkin Volterra deconvolution harness"};
  app.require_subcommand(1);

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "benchmark calibration of kappa / tau_sig / tau_op");
  std::string cal_constant = "kappa", cal_variant = "I", cal_grid;
  double cal_delta = 1e-2, cal_kappa = 0.3;
  int cal_reps = 10;
  std::uint64_t cal_seed = 1;
  std::string cal_out = ".";
  cal->add_option("--constant", cal_constant, "kappa | tau_sig | tau_op")->required();
  cal->add_option("--variant", cal_variant, "estimator variant for tau (I | II)");
  cal->add_option("--delta", cal_delta, "operator noise level for the kappa benchmark");
  cal->add_option("--reps", cal_reps, "realizations per candidate");
  cal->add_option("--grid", cal_grid, "comma-separated candidate grid");
  cal->add_option("--seed", cal_seed, "seed");
  cal->add_option("--out", cal_out, "output directory");
  cal->add_option("--kappa", cal_kappa, "gate constant used inside the tau benchmarks");

  // experiment subcommands
  auto* grid_cmd = app.add_subcommand("mse-grid", "normalized MSE over an (epsilon, delta) grid");
  CommonArgs grid_args;
  add_common(grid_cmd, grid_args);

  auto* design_cmd = app.add_subcommand("design", "formula level vs design-adjusted level");
  CommonArgs design_args;
  add_common(design_cmd, design_args);

  auto* reg_cmd = app.add_subcommand("regression", "regression-model experiment");
  CommonArgs reg_args;
  add_common(reg_cmd, reg_args);

  // estimate
  auto* est = app.add_subcommand("estimate", "estimate f from observation files");
  std::string est_y, est_gdot, est_norms, est_out = ".", est_name = "estimate", est_variant = "both";
  double est_eps = 0.0, est_delta = 0.0, est_nu = 1.0;
  Index est_lmax = 50;
  std::uint64_t est_seed = 0;
  (void)est_seed;
  est->add_option("--y", est_y, "observed coefficient vector file")->required();
  est->add_option("--gdot", est_gdot, "noisy operator column file")->required();
  est->add_option("--epsilon", est_eps, "signal noise level")->required();
  est->add_option("--delta", est_delta, "operator noise level")->required();
  est->add_option("--variant", est_variant, "I | II | both");
  est->add_option("--nu", est_nu, "degree of ill-posedness (Algorithm I)");
  est->add_option("--lmax", est_lmax, "hard level cap");
  est->add_option("--design-norms", est_norms, "optional ||Omega_l|| file for the design level");
  est->add_option("--out", est_out, "output directory");
  est->add_option("--name", est_name, "output base name");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cal->parsed())
      return run_calibrate(cal_constant, cal_variant, cal_delta, cal_reps, cal_grid, cal_seed,
                           cal_out, cal_kappa);

    if (grid_cmd->parsed()) {
      MseGridSpec spec = load_mse_grid_spec(toml::parse_file(grid_args.config),
                                            config_stem(grid_args.config));
      if (grid_args.seed_set) spec.seed = grid_args.seed;
      if (grid_args.reps > 0) spec.reps = grid_args.reps;
      spec.threads = grid_args.threads;
      ensure_dir(grid_args.out_dir);
      write_csv(run_mse_grid(spec), grid_args.out_dir + "/" + spec.name + ".csv");
      if (grid_args.plots) {
        double eps = spec.epsilons.back(), delta = spec.deltas.front();
        for (double e : spec.epsilons)
          if (e > 0.0) { eps = e; break; }
        for (double d : spec.deltas)
          if (d > 0.0) { delta = d; break; }
        emit_mse_grid_plots(spec, eps, delta, grid_args.out_dir);
      }
      std::cout << "wrote " << grid_args.out_dir << "/" << spec.name << ".csv\n";
      return 0;
    }

    if (design_cmd->parsed()) {
      DesignExperimentSpec spec = load_design_spec(toml::parse_file(design_args.config),
                                                   config_stem(design_args.config));
      if (design_args.seed_set) spec.seed = design_args.seed;
      if (design_args.reps > 0) spec.reps = design_args.reps;
      spec.threads = design_args.threads;
      ensure_dir(design_args.out_dir);
      write_csv(run_design_experiment(spec), design_args.out_dir + "/" + spec.name + ".csv");
      if (design_args.plots) emit_design_plots(spec, design_args.out_dir);
      std::cout << "wrote " << design_args.out_dir << "/" << spec.name << ".csv\n";
      return 0;
    }

    if (reg_cmd->parsed()) {
      RegressionSpec spec = load_regression_spec(toml::parse_file(reg_args.config),
                                                 config_stem(reg_args.config));
      if (reg_args.seed_set) spec.seed = reg_args.seed;
      if (reg_args.reps > 0) spec.reps = reg_args.reps;
      spec.threads = reg_args.threads;
      ensure_dir(reg_args.out_dir);
      const RegressionResult res = run_regression_experiment(spec);
      write_csv(spec, res, reg_args.out_dir + "/" + spec.name + ".csv");
      if (reg_args.plots) emit_regression_plots(spec, reg_args.out_dir);
      std::cout << "MSE_I = " << format_number(res.mse_one)
                << "  MSE_II = " << format_number(res.mse_two) << "\n";
      std::cout << "wrote " << reg_args.out_dir << "/" << spec.name << ".csv\n";
      return 0;
    }

    if (est->parsed()) {
      const Vector y = read_vector_file(est_y);
      const Vector gd = read_vector_file(est_gdot);
      if (y.size() != gd.size())
        throw std::runtime_error("--y and --gdot must have the same length");
      std::optional<Vector> norms;
      if (!est_norms.empty()) norms = read_vector_file(est_norms);
      const Index data_cap = y.size() - 1;
      Observations obs(y, gd, NoiseLevels::sequence(est_eps, est_delta));
      ensure_dir(est_out);

      nlohmann::json report;
      report["epsilon"] = est_eps;
      report["delta"] = est_delta;
      std::vector<Algorithm> algs;
      if (est_variant == "I" || est_variant == "both") algs.push_back(Algorithm::I);
      if (est_variant == "II" || est_variant == "both") algs.push_back(Algorithm::II);
      if (algs.empty()) throw std::runtime_error("unknown variant '" + est_variant + "'");

      for (Algorithm alg : algs) {
        EstimatorConfig cfg = alg == Algorithm::I ? EstimatorConfig::algorithm_one(est_nu)
                                                  : EstimatorConfig::algorithm_two();
        cfg.l_max = std::min(est_lmax, data_cap);
        const EstimateReport rep = estimate(obs, cfg, norms);
        const std::string file = est_name + "_" + algorithm_name(alg) + ".csv";
        CsvWriter csv(est_out + "/" + file);
        csv.row({"level", "coefficient"});
        for (Index l = 0; l < rep.estimate.coeffs.size(); ++l)
          csv.row({format_number(static_cast<std::int64_t>(l)),
                   format_number(rep.estimate.coeffs[l])});
        nlohmann::json j;
        j["file"] = file;
        j["level_formula"] = rep.level_formula;
        j["level_used"] = rep.level_used;
        j["kept_levels"] = rep.kept_levels;
        j["gate_failures"] = rep.gate_failures;
        report[std::string("algorithm_") + algorithm_name(alg)] = j;
        std::cout << "algorithm " << algorithm_name(alg) << ": kept " << rep.kept_levels.size()
                  << " levels, wrote " << est_out << "/" << file << "\n";
      }
      std::ofstream jout(est_out + "/" + est_name + "_report.json");
      if (!jout) throw std::runtime_error("cannot open output file");
      jout << report.dump(2) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
