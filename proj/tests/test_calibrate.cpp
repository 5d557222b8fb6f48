#include <doctest.h>

#include <cmath>

#include "lagdec/calibrate.hpp"

using namespace lagdec;

namespace {

std::vector<double> wide_grid() {
  std::vector<double> g;
  for (double v = 0.05; v <= 6.0; v += 0.05) g.push_back(v);
  return g;
}

} // namespace

TEST_CASE("calibrate_kappa input validation") {
  CHECK_THROWS_AS(static_cast<void>(calibrate_kappa(1e-2, 0, {0.1}, 1)), std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(calibrate_kappa(0.0, 5, {0.1}, 1)), std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(calibrate_kappa(1e-2, 5, {}, 1)), std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(calibrate_kappa(1e-2, 5, {0.2, 0.1}, 1)), std::invalid_argument);
}

TEST_CASE("calibrate_kappa is deterministic and its trace is nonincreasing") {
  const auto grid = wide_grid();
  const CalibrationResult a = calibrate_kappa(1e-2, 10, grid, 42);
  const CalibrationResult b = calibrate_kappa(1e-2, 10, grid, 42);
  CHECK(a.value == b.value);
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].second == b.trace[i].second);
    if (i > 0) CHECK(a.trace[i].second <= a.trace[i - 1].second);
  }
  // selection is the first candidate whose average rounds to zero
  CHECK(a.trace.back().second < 0.5);
  for (size_t i = 0; i + 1 < a.trace.size(); ++i) CHECK(a.trace[i].second >= 0.5);
}

TEST_CASE("the kappa benchmark depends on delta only through |log delta|") {
  // In the pure-noise benchmark the delta scale cancels between the inverse
  // norms and the gate, so delta = 10 and delta = 0.1 give identical traces.
  const auto grid = wide_grid();
  const CalibrationResult big = calibrate_kappa(10.0, 10, grid, 7);
  const CalibrationResult small = calibrate_kappa(0.1, 10, grid, 7);
  CHECK(big.value == small.value);
  REQUIRE(big.trace.size() == small.trace.size());
  for (size_t i = 0; i < big.trace.size(); ++i)
    CHECK(big.trace[i].second == doctest::Approx(small.trace[i].second).epsilon(1e-12));
}

TEST_CASE("calibrate_tau validation, determinism, monotone trace") {
  CHECK_THROWS_AS(static_cast<void>(calibrate_tau(Algorithm::I, TauKind::sig, 0, {0.5}, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(calibrate_tau(Algorithm::I, TauKind::sig, 5, {}, 1)),
                  std::invalid_argument);

  const auto grid = wide_grid();
  for (Algorithm alg : {Algorithm::I, Algorithm::II}) {
    for (TauKind kind : {TauKind::sig, TauKind::op}) {
      const CalibrationResult a = calibrate_tau(alg, kind, 10, grid, 11);
      const CalibrationResult b = calibrate_tau(alg, kind, 10, grid, 11);
      CHECK(a.value == b.value);
      for (size_t i = 1; i < a.trace.size(); ++i)
        CHECK(a.trace[i].second <= a.trace[i - 1].second);
      CHECK(a.trace.back().second < 0.5);
    }
  }
}

TEST_CASE("failure reports the whole trace") {
  // the gate cannot close every level at kappa this small
  CHECK_THROWS_AS(static_cast<void>(calibrate_kappa(1e-2, 10, {1e-6, 2e-6}, 3)),
                  CalibrationFailure);
  try {
    static_cast<void>(calibrate_kappa(1e-2, 10, {1e-6, 2e-6}, 3));
  } catch (const CalibrationFailure& e) {
    CHECK(e.trace.size() == 2);
    CHECK(e.trace[0].second >= e.trace[1].second);
    CHECK(e.trace[1].second >= 0.5);
  }
}
