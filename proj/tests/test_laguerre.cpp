#include <doctest.h>

#include <cmath>

#include "lagdec/laguerre.hpp"
#include "lagdec/rng.hpp"

using namespace lagdec;

namespace {

// Defining sum L_l(t) = sum_j (-1)^j C(l,j) t^j / j!, evaluated by Horner in
// long double. Independent of the recurrence under test.
double laguerre_defining_sum(Index l, double t) {
  std::vector<long double> coef(l + 1);
  long double c = 1.0L; // (-1)^j C(l,j)/j!
  coef[0] = 1.0L;
  for (Index j = 1; j <= l; ++j) {
    c *= -(static_cast<long double>(l - j + 1)) / (static_cast<long double>(j) * j);
    coef[j] = c;
  }
  long double acc = 0.0L;
  for (Index j = l; j >= 0; --j) acc = acc * t + coef[j];
  return static_cast<double>(acc);
}

double numeric_l2_sq(const LaguerreSeries& s) {
  return integrate_adaptive(
      [&](double t) {
        const double v = eval_series_at(s, t);
        return v * v;
      },
      0.0, 120.0, 1e-10, 32, 10, 16);
}

} // namespace

TEST_CASE("eval_polynomial matches the defining sum") {
  CHECK(eval_polynomial(0, 3.7) == 1.0);
  CHECK(eval_polynomial(1, 2.0) == doctest::Approx(laguerre_defining_sum(1, 2.0)).epsilon(1e-14));
  CHECK(eval_polynomial(1, 2.0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(eval_polynomial(2, 2.0) == doctest::Approx(laguerre_defining_sum(2, 2.0)).epsilon(1e-14));
  CHECK(eval_polynomial(2, 2.0) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("recurrence agrees with the defining sum over l <= 15, |t| <= 20") {
  for (Index l = 0; l <= 15; ++l)
    for (double t = -20.0; t <= 20.0; t += 0.5) {
      const double ref = laguerre_defining_sum(l, t);
      CHECK(std::abs(eval_polynomial(l, t) - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("eval_function values at a = 1/2") {
  const LaguerreBasis basis;
  CHECK(eval_function(5, 0.0, basis) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eval_function(0, 2.0, basis) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(eval_function(1, 2.0, basis) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-14));
  // |phi_l| <= sqrt(2a)
  for (Index l = 0; l <= 10; ++l)
    for (double t = 0.0; t <= 40.0; t += 0.37) CHECK(std::abs(eval_function(l, t, basis)) <= 1.0 + 1e-12);
}

TEST_CASE("eval_series basics") {
  Vector g(3);
  g << 0.0, 1.0, 2.0;

  Vector e0 = Vector::Zero(4);
  e0[0] = 1.0;
  const LaguerreSeries s0(e0);
  CHECK(eval_series_at(s0, 0.0) == doctest::Approx(1.0));

  const LaguerreSeries zero(Vector::Zero(5));
  CHECK(eval_series(zero, g).cwiseAbs().maxCoeff() == 0.0);

  Vector e1 = Vector::Zero(2);
  e1[1] = 1.0;
  const LaguerreSeries s1(e1);
  CHECK(eval_series_at(s1, 2.0) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-13));
}

TEST_CASE("project recovers basis functions and respects Parseval") {
  const LaguerreBasis basis;

  SUBCASE("phi_3 projects to e_3") {
    const LaguerreSeries s = project([&](double t) { return eval_function(3, t, basis); }, 6, basis);
    for (Index l = 0; l <= 6; ++l)
      CHECK(std::abs(s.coeffs[l] - (l == 3 ? 1.0 : 0.0)) <= 1e-8);
  }

  SUBCASE("zero function projects to zero") {
    const LaguerreSeries s = project([](double) { return 0.0; }, 5, basis);
    CHECK(s.coeffs.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("f1 coefficients satisfy Parseval") {
    auto f1 = [](double t) { return (t * t - t) * std::exp(-t); };
    // ||f1||^2 = int (t^2-t)^2 e^{-2t} = Gamma(5)/2^5 - 2 Gamma(4)/2^4 + Gamma(3)/2^3 = 1/4,
    // cross-checked by an independent numeric integral.
    const double closed_form = 24.0 / 32.0 - 2.0 * 6.0 / 16.0 + 2.0 / 8.0;
    CHECK(closed_form == doctest::Approx(0.25).epsilon(1e-15));
    const double numeric =
        integrate_adaptive([&](double t) { return f1(t) * f1(t); }, 0.0, 80.0, 1e-12, 32, 10, 16);
    CHECK(numeric == doctest::Approx(0.25).epsilon(1e-10));

    const LaguerreSeries s = project(f1, 40, basis);
    CHECK(s.coeffs.squaredNorm() == doctest::Approx(0.25).epsilon(1e-9));
  }
}

TEST_CASE("trapezoid_coeffs") {
  const LaguerreBasis basis;
  const Index n = 10000;
  Vector times(n), phi0(n), zeros = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    times[i] = 100.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    phi0[i] = eval_function(0, times[i], basis);
  }

  const LaguerreSeries z = trapezoid_coeffs(times, zeros, 4, basis);
  CHECK(z.coeffs.cwiseAbs().maxCoeff() == 0.0);

  const LaguerreSeries s = trapezoid_coeffs(times, phi0, 1, basis);
  CHECK(std::abs(s.coeffs[0] - 1.0) <= 1e-3);
  CHECK(std::abs(s.coeffs[1]) <= 1e-3);

  Vector two(1);
  CHECK_THROWS_AS(trapezoid_coeffs(two, two, 2, basis), std::invalid_argument);
  Vector bad(3), y3(3);
  bad << 0.0, 2.0, 1.0;
  y3.setZero();
  CHECK_THROWS_AS(trapezoid_coeffs(bad, y3, 2, basis), std::invalid_argument);
}

TEST_CASE("sobolev_norm is the displayed weighted sum of squares") {
  Vector e0 = Vector::Zero(3);
  e0[0] = 1.0;
  CHECK(sobolev_norm(0.0, LaguerreSeries(e0)) == doctest::Approx(1.0));
  CHECK(sobolev_norm(1.0, LaguerreSeries(e0)) == doctest::Approx(0.25));
  CHECK(sobolev_norm(2.0, LaguerreSeries(Vector::Zero(4))) == 0.0);
}

TEST_CASE("l2_distance_sq") {
  Vector a(2), b(2);
  a << 1.0, 2.0;
  b << 0.0, 0.0;
  CHECK(l2_distance_sq(LaguerreSeries(a), LaguerreSeries(a)) == 0.0);
  CHECK(l2_distance_sq(LaguerreSeries(a), LaguerreSeries(b)) == doctest::Approx(5.0));

  Vector e0 = Vector::Zero(1);
  e0[0] = 1.0;
  CHECK(l2_distance_sq(LaguerreSeries(e0), LaguerreSeries(Vector::Zero(4))) == doctest::Approx(1.0));

  CHECK_THROWS_AS(l2_distance_sq(LaguerreSeries(a, 0.5), LaguerreSeries(a, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("orthonormality under a converged quadrature") {
  const LaguerreBasis basis;
  for (Index k = 0; k <= 12; ++k)
    for (Index l = k; l <= 12; ++l) {
      const double inner = integrate_panels(
          [&](double t) { return eval_function(k, t, basis) * eval_function(l, t, basis); }, 0.0,
          120.0, 256, 16);
      CHECK(std::abs(inner - (k == l ? 1.0 : 0.0)) <= 1e-6);
    }
}

TEST_CASE("convolution identity for small degrees") {
  const LaguerreBasis basis;
  for (Index k = 0; k <= 4; ++k)
    for (Index l = 0; l <= 4; ++l)
      for (double t : {0.5, 2.0, 7.0, 16.0}) {
        const double conv = integrate_panels(
            [&](double x) { return eval_function(k, x, basis) * eval_function(l, t - x, basis); },
            0.0, t, 64, 16);
        const double expected =
            (eval_function(k + l, t, basis) - eval_function(k + l + 1, t, basis)) /
            std::sqrt(2.0 * basis.a);
        CHECK(std::abs(conv - expected) <= 1e-6);
      }
}

TEST_CASE("Parseval: coefficient norm equals the numeric function norm") {
  Rng rng(2024);
  for (int rep = 0; rep < 3; ++rep) {
    const LaguerreSeries u(rng.normal_vector(9));
    CHECK(l2_distance_sq(u, LaguerreSeries(Vector::Zero(1))) ==
          doctest::Approx(numeric_l2_sq(u)).epsilon(1e-7));
  }
}
