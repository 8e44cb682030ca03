#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "zodd/core.hpp"
#include "zodd/smoothing.hpp"

using namespace zodd;

TEST_CASE("sphere draws are unit norm") {
  RandomSource rng = make_rng(1);
  for (int d : {1, 2, 5, 30}) {
    for (int i = 0; i < 200; ++i) {
      const Vec u = sample_sphere(d, rng);
      CHECK(std::abs(norm(u) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("d=1 sphere is a fair coin on {-1,+1}") {
  RandomSource rng = make_rng(2);
  int plus = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Vec u = sample_sphere(1, rng);
    CHECK((u[0] == 1.0 || u[0] == -1.0));
    if (u[0] == 1.0) ++plus;
  }
  CHECK(std::abs(plus / static_cast<double>(n) - 0.5) <= 0.01);
}

TEST_CASE("sphere second moments are isotropic in d=3") {
  RandomSource rng = make_rng(3);
  const int n = 1000000;
  Vec mean = zeros(3), sq = zeros(3);
  for (int i = 0; i < n; ++i) {
    const Vec u = sample_sphere(3, rng);
    for (int j = 0; j < 3; ++j) {
      mean[j] += u[j] / n;
      sq[j] += u[j] * u[j] / n;
    }
  }
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(mean[j]) <= 0.004);
    CHECK(std::abs(sq[j] - 1.0 / 3.0) <= 0.01);
  }
}

TEST_CASE("ball draws stay inside and fill by volume") {
  RandomSource rng = make_rng(4);
  const int n = 1000000;
  int inside_half = 0;
  for (int i = 0; i < n; ++i) {
    const Vec u = sample_ball(2, rng);
    const double r = norm(u);
    CHECK(r <= 1.0 + 1e-15);
    if (r <= 0.5) ++inside_half;
  }
  // area ratio (1/2)^2
  CHECK(std::abs(inside_half / static_cast<double>(n) - 0.25) <= 0.005);
}

TEST_CASE("ball radius second moment is d/(d+2)") {
  RandomSource rng = make_rng(5);
  const auto stats = zodd_test::sample_mean(1000000, [&] {
    const Vec u = sample_ball(3, rng);
    return dot(u, u);
  });
  CHECK(std::abs(stats.mean - 0.6) <= 0.01);
}

TEST_CASE("smoothed value of a linear function is the function value") {
  const Vec a = {2.0, -1.0, 0.5};
  const ObjectiveFn f = [&a](const Vec& x) { return dot(a, x); };
  const Vec x = {1.0, 2.0, 3.0};
  RandomSource rng = make_rng(6);
  SmoothingParams p{0.7, 200000};
  // draw-by-draw to get an SE band
  const auto stats = zodd_test::sample_mean(p.mc_samples, [&] {
    SmoothingParams single{p.delta, 1};
    return mc_smoothed_value(f, x, single, rng);
  });
  CHECK(zodd_test::within_band(stats.mean, dot(a, x), stats.se));
}

TEST_CASE("smoothed quadratic at the origin is delta^2 d/(d+2)") {
  const ObjectiveFn f = [](const Vec& x) { return dot(x, x); };
  RandomSource rng = make_rng(7);
  SmoothingParams p{1.0, 1000000};
  const double v = mc_smoothed_value(f, zeros(3), p, rng);
  CHECK(std::abs(v - 0.6) <= 0.01);
}

TEST_CASE("smoothed |x| at zero in one dimension is one half") {
  const ObjectiveFn f = [](const Vec& x) { return std::abs(x[0]); };
  RandomSource rng = make_rng(8);
  SmoothingParams p{1.0, 1000000};
  const double v = mc_smoothed_value(f, zeros(1), p, rng);
  CHECK(std::abs(v - 0.5) <= 0.01);
}

TEST_CASE("smoothing propagates non-finite objective values") {
  const ObjectiveFn f = [](const Vec&) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  RandomSource rng = make_rng(9);
  SmoothingParams p{1.0, 4};
  CHECK_THROWS_AS(mc_smoothed_value(f, zeros(2), p, rng), std::runtime_error);
  CHECK_THROWS_AS(mc_smoothed_gradient(f, zeros(2), p, rng), std::runtime_error);
}

TEST_CASE("smoothed gradient of a linear function recovers the coefficients") {
  const Vec a = {1.0, -2.0};
  const ObjectiveFn f = [&a](const Vec& x) { return dot(a, x); };
  RandomSource rng = make_rng(10);
  const double delta = 0.5;
  const int n = 1000000;
  SmoothingParams p{delta, n};
  const Vec g = mc_smoothed_gradient(f, zeros(2), p, rng);
  const double tol = 5.0 * 2 * norm(a) / delta * 1e-3;
  for (int j = 0; j < 2; ++j) CHECK(std::abs(g[j] - a[j]) <= tol);
}

TEST_CASE("smoothed gradient of a constant function is zero") {
  const ObjectiveFn f = [](const Vec&) { return 3.25; };
  RandomSource rng = make_rng(11);
  SmoothingParams p{0.3, 100000};
  const Vec g = mc_smoothed_gradient(f, {1.0, 1.0, 1.0}, p, rng);
  // each coordinate has SE <= (d/delta)*|c| / sqrt(n); use a generous band
  const double band = 4.0 * (3.0 / 0.3) * 3.25 / std::sqrt(100000.0);
  for (double c : g) CHECK(std::abs(c) <= band);
}

TEST_CASE("smoothed gradient of a quadratic is the true gradient") {
  const ObjectiveFn f = [](const Vec& x) { return dot(x, x); };
  const Vec x0 = {0.7, -0.3};
  RandomSource rng = make_rng(12);
  const int n = 400000;
  const double delta = 0.2;
  const auto stats = zodd_test::sample_vec_mean(2, n, [&] {
    SmoothingParams single{delta, 1};
    return mc_smoothed_gradient(f, x0, single, rng);
  });
  CHECK(zodd_test::vec_within_band(stats.mean, scaled(x0, 2.0), stats.se));
}

TEST_CASE("variance on the sphere: constants and coordinates") {
  RandomSource rng = make_rng(13);
  const double v_const = variance_on_sphere(
      [](const Vec&) { return 5.0; }, 4, 1000, rng);
  CHECK(std::abs(v_const) <= 1e-12);

  const double v1 = variance_on_sphere(
      [](const Vec& u) { return u[0]; }, 1, 100000, rng);
  CHECK(std::abs(v1 - 1.0) <= 0.02);
  CHECK(v1 <= 16.0 * std::sqrt(2.0 * 3.14159265358979) / 1.0);
}

TEST_CASE("sphere variance of u1 tracks 1/d under the lemma bound") {
  const double bound_scale = 16.0 * std::sqrt(2.0 * 3.141592653589793);
  for (int d : {2, 4, 8, 16}) {
    RandomSource rng = make_rng(100 + d);
    const int n = 100000;
    const auto stats = zodd_test::sample_mean(n, [&] {
      const Vec u = sample_sphere(d, rng);
      return u[0];
    });
    CHECK(zodd_test::within_band(stats.variance, 1.0 / d, stats.se_variance,
                                 3.0));
    CHECK(stats.variance <= bound_scale / d);
  }
}

TEST_CASE("smoothed value stays within L delta of the function") {
  // Prop-style bound with MC slack, on a nonsmooth Lipschitz function.
  const ObjectiveFn f = [](const Vec& x) { return norm(x); };  // L = 1
  RandomSource rng = make_rng(14);
  for (double delta : {0.1, 0.5, 2.0}) {
    const Vec x = {0.3, -1.2};
    const auto stats = zodd_test::sample_mean(50000, [&] {
      SmoothingParams single{delta, 1};
      return mc_smoothed_value(f, x, single, rng);
    });
    CHECK(std::abs(stats.mean - f(x)) <= 1.0 * delta + 4.0 * stats.se);
  }
}

TEST_CASE("common random numbers make the smoothed surrogate Lipschitz") {
  const ObjectiveFn f = [](const Vec& x) {
    return std::abs(x[0]) + std::abs(x[1]);
  };  // L = sqrt(2)
  const double L = std::sqrt(2.0);
  RandomSource rng = make_rng(15);
  for (int i = 0; i < 20; ++i) {
    Vec x = {4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
    Vec y = {4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
    SmoothingParams p{0.5, 2000};
    const auto [fx, fy] = mc_smoothed_value_crn(f, x, y, p, rng);
    // With shared draws each per-sample difference is bounded by L||x-y||,
    // so the averaged difference obeys the bound without MC slack.
    CHECK(std::abs(fx - fy) <= L * distance(x, y) + 1e-12);
  }
}

TEST_CASE("finite-difference smoothness of the smoothed gradient") {
  // Gradient-difference ratio against C sqrt(d) L / delta with C = 5.
  const ObjectiveFn f = [](const Vec& x) { return norm(x); };  // L = 1
  const int d = 5;
  const double delta = 0.5;
  RandomSource rng = make_rng(16);
  for (int i = 0; i < 10; ++i) {
    Vec x(d), y(d);
    for (int j = 0; j < d; ++j) x[j] = 2.0 * rng.uniform() - 1.0;
    y = x;
    for (int j = 0; j < d; ++j) y[j] += 0.1 * (rng.uniform() - 0.5);
    SmoothingParams p{delta, 40000};
    const auto [gx, gy] = mc_smoothed_gradient_crn(f, x, y, p, rng);
    const double ratio = distance(gx, gy) / distance(x, y);
    CHECK(ratio <= 5.0 * std::sqrt(static_cast<double>(d)) / delta);
  }
}
