#include <doctest.h>

#include <cmath>
#include <limits>

#include "lagdec/estimator.hpp"

using namespace lagdec;

namespace {

Observations dyadic_clean_obs(Index levels) {
  // dyadic coefficients keep the telescoping sums exact in floating point
  Vector f = Vector::Zero(levels + 1);
  f[0] = 1.0;
  f[1] = -0.5;
  f[2] = 0.25;
  f[4] = 0.125;
  Vector gd = Vector::Zero(levels + 1);
  gd[0] = 1.0;
  gd[1] = -1.0;
  return Observations(forward(f, gd), gd, NoiseLevels::sequence(0.0, 0.0));
}

} // namespace

TEST_CASE("maximal levels") {
  CHECK(max_level_one(1e-2, 0.0, 1.0, 1.0) == 6);
  CHECK(max_level_one(0.0, 1e-2, 1.0, 1.0) == 4);
  CHECK(max_level_one(0.0, 0.0, 1.0, 1.0, 50) == 50);
  CHECK(max_level_one(0.0, 0.0, 1.0, 1.0, 17) == 17);

  CHECK(max_level_two(1e-2, 0.0, 1.0) == 46);
  CHECK(max_level_two(0.0, 1e-2, 1.0) == 21);
  CHECK(max_level_two(0.0, 0.0, 1.0, 50) == 50);
  // tiny noise is capped
  CHECK(max_level_two(1e-9, 0.0, 1.0, 50) == 50);
}

TEST_CASE("operator threshold") {
  CHECK(operator_threshold(4, 1e-2, 0.3) == doctest::Approx(0.0151601).epsilon(1e-5));
  CHECK(operator_threshold(0, 1e-2, 0.3) == operator_threshold(1, 1e-2, 0.3));
  CHECK(operator_threshold(7, 0.0, 0.3) == 0.0);
}

TEST_CASE("signal threshold, Algorithm I") {
  EstimatorConfig cfg = EstimatorConfig::algorithm_one(1.0);
  cfg.tau_sig = 0.5;
  cfg.tau_op = 0.1;

  const NoiseLevels pure_sig = NoiseLevels::sequence(1e-2, 0.0);
  CHECK(signal_threshold_one(5, pure_sig, cfg) == doctest::Approx(0.0536492).epsilon(1e-5));
  // (l v 1) clamps level 0
  CHECK(signal_threshold_one(0, pure_sig, cfg) == signal_threshold_one(1, pure_sig, cfg));
  CHECK(signal_threshold_one(3, NoiseLevels::sequence(0.0, 0.0), cfg) == 0.0);

  const NoiseLevels mixed = NoiseLevels::sequence(1e-2, 1e-1);
  const double expected = std::max(0.5 * 1e-2 * std::sqrt(std::log(100.0)),
                                   0.1 * 1e-1 * std::log(10.0));
  CHECK(signal_threshold_one(0, mixed, cfg) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("signal threshold, Algorithm II") {
  EstimatorConfig cfg = EstimatorConfig::algorithm_two();
  const NoiseLevels noise = NoiseLevels::sequence(1e-2, 0.0);

  const LowerToeplitz inv(Vector::Constant(5, 1.0)); // (K^4)^{-1} for g = phi_0
  CHECK(signal_threshold_two(4, inv, true, noise, cfg) ==
        doctest::Approx(0.0415563).epsilon(1e-5));
  CHECK(signal_threshold_two(4, inv, false, noise, cfg) ==
        std::numeric_limits<double>::infinity());
  CHECK(signal_threshold_two(4, inv, true, NoiseLevels::sequence(0.0, 0.0), cfg) == 0.0);
}

TEST_CASE("zeta recovers coefficients exactly in the noiseless case") {
  const Observations obs = dyadic_clean_obs(10);
  const ZetaResult zr = zeta_coefficients(obs, 10, EstimatorConfig::algorithm_one());
  Vector f = Vector::Zero(11);
  f[0] = 1.0;
  f[1] = -0.5;
  f[2] = 0.25;
  f[4] = 0.125;
  for (Index l = 0; l <= 10; ++l) {
    CHECK(zr.gate_open[l]);
    CHECK(zr.zeta[l] == f[l]);
  }
}

TEST_CASE("zeta is zero with a closed gate and a singular noisy operator") {
  Vector y = Vector::Constant(5, 1.0);
  Vector gd = Vector::Zero(5);
  gd[1] = 1.0; // leading coefficient zero
  const Observations obs(y, gd, NoiseLevels::sequence(0.1, 0.1));
  const ZetaResult zr = zeta_coefficients(obs, 4, EstimatorConfig::algorithm_one());
  for (Index l = 0; l <= 4; ++l) {
    CHECK_FALSE(zr.gate_open[l]);
    CHECK(zr.zeta[l] == 0.0);
  }
}

TEST_CASE("zeta matches dense per-level solves") {
  Rng rng(77);
  for (int rep = 0; rep < 10; ++rep) {
    const Index L = 6;
    Vector gd = rng.normal_vector(L + 1) * 0.3;
    gd[0] = 1.5;
    const Vector y = rng.normal_vector(L + 1);
    const Observations obs(y, gd, NoiseLevels::sequence(0.1, 0.05));
    EstimatorConfig cfg = EstimatorConfig::algorithm_one();
    cfg.kappa = 1e-9; // vanishing gate level: every inverse norm passes
    const ZetaResult zr = zeta_coefficients(obs, L, cfg);
    for (Index l = 0; l <= L; ++l) {
      CHECK(zr.gate_open[l]);
      const Matrix k = LowerToeplitz(gd.head(l + 1)).dense();
      const Vector sol = k.partialPivLu().solve(y.head(l + 1));
      CHECK(zr.zeta[l] == doctest::Approx(sol[l]).epsilon(1e-10));
    }
  }
}

TEST_CASE("noiseless estimate reproduces the support exactly") {
  const Index levels = 50;
  Vector f = Vector::Zero(levels + 1);
  f[0] = 1.0;
  f[1] = -0.5;
  f[2] = 0.25;
  f[4] = 0.125;
  Vector gd = Vector::Zero(levels + 1);
  gd[0] = 1.0;
  gd[1] = -1.0;
  const Observations obs(forward(f, gd), gd, NoiseLevels::sequence(0.0, 0.0));

  for (EstimatorConfig cfg : {EstimatorConfig::algorithm_one(), EstimatorConfig::algorithm_two()}) {
    const EstimateReport rep = estimate(obs, cfg);
    CHECK(rep.level_formula == 50);
    CHECK(rep.level_used == 50);
    REQUIRE(rep.estimate.coeffs.size() == levels + 1);
    for (Index l = 0; l <= levels; ++l) CHECK(rep.estimate.coeffs[l] == f[l]);
    CHECK(rep.kept_levels == std::vector<Index>{0, 1, 2, 4});
    CHECK(rep.gate_failures.empty());
  }
}

TEST_CASE("estimate rejects observations shorter than the formula level") {
  const Observations obs = dyadic_clean_obs(10); // noiseless formula level is l_max = 50
  CHECK_THROWS_AS(static_cast<void>(estimate(obs, EstimatorConfig::algorithm_one())),
                  std::invalid_argument);
}

TEST_CASE("raising tau_sig never enlarges the kept set") {
  Rng rng(51);
  const Index L = 30;
  Vector gd = Vector::Zero(L + 1);
  gd[0] = 1.0;
  gd[1] = -1.0;
  for (int rep = 0; rep < 50; ++rep) {
    const Vector f = rng.normal_vector(L + 1) * 0.2;
    const Observations obs = synthesize_sequence(f, gd, NoiseLevels::sequence(5e-3, 1e-3),
                                                 std::nullopt, mix_seed(900, rep));
    for (Algorithm alg : {Algorithm::I, Algorithm::II}) {
      EstimatorConfig lo = alg == Algorithm::I ? EstimatorConfig::algorithm_one()
                                               : EstimatorConfig::algorithm_two();
      lo.l_max = L;
      EstimatorConfig hi = lo;
      lo.tau_sig = 0.4 + rng.uniform();
      hi.tau_sig = lo.tau_sig * (1.0 + rng.uniform());
      const auto kept_lo = estimate(obs, lo).kept_levels;
      const auto kept_hi = estimate(obs, hi).kept_levels;
      CHECK(std::includes(kept_lo.begin(), kept_lo.end(), kept_hi.begin(), kept_hi.end()));
    }
  }
}

TEST_CASE("closed gates force exact zeros") {
  Rng rng(52);
  const Index L = 10;
  for (int rep = 0; rep < 50; ++rep) {
    Vector f = rng.normal_vector(L + 1);
    Vector gd = Vector::Zero(L + 1);
    gd[0] = 1.0;
    gd[1] = -1.0;
    const Observations obs = synthesize_sequence(f, gd, NoiseLevels::sequence(1e-2, 0.3),
                                                 std::nullopt, mix_seed(901, rep));
    for (Algorithm alg : {Algorithm::I, Algorithm::II}) {
      EstimatorConfig cfg = alg == Algorithm::I ? EstimatorConfig::algorithm_one()
                                                : EstimatorConfig::algorithm_two();
      cfg.kappa = 5.0; // strict gate so closures actually occur
      const EstimateReport report = estimate(obs, cfg);
      CHECK_FALSE(report.gate_failures.empty());
      for (Index l : report.gate_failures) CHECK(report.estimate.coeffs[l] == 0.0);
    }
  }
}

TEST_CASE("Algorithm II ignores nu bit for bit") {
  Rng rng(53);
  const Index L = 30;
  Vector gd = Vector::Zero(L + 1);
  gd[0] = 1.0;
  gd[1] = -1.0;
  for (int rep = 0; rep < 20; ++rep) {
    const Vector f = rng.normal_vector(L + 1) * 0.3;
    const Observations obs = synthesize_sequence(f, gd, NoiseLevels::sequence(1e-2, 1e-2),
                                                 std::nullopt, mix_seed(902, rep));
    EstimatorConfig a = EstimatorConfig::algorithm_two();
    EstimatorConfig b = a;
    a.nu = 10.0 * rng.uniform();
    b.nu = 10.0 * rng.uniform();
    const EstimateReport ra = estimate(obs, a), rb = estimate(obs, b);
    CHECK(ra.level_formula == rb.level_formula);
    REQUIRE(ra.estimate.coeffs.size() == rb.estimate.coeffs.size());
    for (Index l = 0; l < ra.estimate.coeffs.size(); ++l)
      CHECK(ra.estimate.coeffs[l] == rb.estimate.coeffs[l]);
  }
}

TEST_CASE("Neumann regime: noisy inverse norm at most doubles") {
  Rng rng(54);
  int checked = 0;
  for (int rep = 0; rep < 200 && checked < 40; ++rep) {
    const Index n = 2 + static_cast<Index>(rng.uniform() * 10);
    Vector gd = Vector::Zero(n);
    gd[0] = 1.0;
    gd[1] = -1.0;
    const LowerToeplitz K(gd);
    const LowerToeplitz B(rng.normal_vector(n));
    const double delta = 5e-3;
    const double k_inv_norm = op_norm(inverse(K));
    if (delta * op_norm(B) * k_inv_norm >= 0.5) continue;
    ++checked;
    const LowerToeplitz K_delta(Vector(gd + delta * B.first_col));
    CHECK(op_norm(inverse(K_delta)) <= 2.0 * k_inv_norm + 1e-12);
  }
  CHECK(checked >= 30);
}

TEST_CASE("thresholds keep a pure-noise estimate near zero") {
  const Index L = 50;
  const Vector f = Vector::Zero(L + 1);
  Vector gd = Vector::Zero(L + 1);
  gd[0] = 1.0;
  gd[1] = -1.0;
  int zero_kept = 0, total_kept = 0;
  double mass = 0.0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    const Observations obs = synthesize_sequence(f, gd, NoiseLevels::sequence(1e-2, 1e-2),
                                                 std::nullopt, mix_seed(903, rep));
    const EstimateReport report = estimate(obs, EstimatorConfig::algorithm_one());
    total_kept += static_cast<int>(report.kept_levels.size());
    if (report.kept_levels.empty()) ++zero_kept;
    mass += report.estimate.coeffs.squaredNorm();
  }
  CHECK(static_cast<double>(total_kept) / reps <= 2.5);
  CHECK(static_cast<double>(zero_kept) / reps >= 0.2);
  CHECK(mass / reps <= 0.01);
}

TEST_CASE("design-adjusted level") {
  Vector norms(6);
  norms << 1.0, 1.1, 1.4, 1.8, 1.2, 2.5;
  CHECK(design_adjusted_level(10, norms, 1.5) == 4); // the largest qualifying level
  CHECK(design_adjusted_level(3, norms, 1.5) == 3);
  CHECK(design_adjusted_level(10, norms, 0.5) == 0);
}
