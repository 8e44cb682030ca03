#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "zodd/core.hpp"

using namespace zodd;

TEST_CASE("identical seeds give identical streams") {
  RandomSource a = make_rng(0), b = make_rng(0);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("different seeds diverge within the first draws") {
  RandomSource a = make_rng(0), b = make_rng(1);
  bool differs = false;
  for (int i = 0; i < 100; ++i)
    if (a.uniform() != b.uniform()) differs = true;
  CHECK(differs);
}

TEST_CASE("uniform draws stay in [0,1)") {
  for (std::uint64_t seed : {0ULL, 7ULL, 123456789ULL}) {
    RandomSource rng = make_rng(seed);
    for (int i = 0; i < 10000; ++i) {
      const double u = rng.uniform();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
    }
  }
}

TEST_CASE("below covers the range uniformly enough") {
  RandomSource rng = make_rng(3);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) ++counts[rng.below(5)];
  for (int c : counts) CHECK(c > 9000);  // 10000 expected each
}

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(42, 0) != derive_seed(42, 1));
  CHECK(derive_seed(42, 0) != derive_seed(43, 0));
}

TEST_CASE("normal draws match the standard moments") {
  RandomSource rng = make_rng(11);
  const auto stats =
      zodd_test::sample_mean(1000000, [&] { return rng.normal(); });
  // spec bands: mean within 0.004 of 0, variance within 0.01 of 1
  CHECK(std::abs(stats.mean) <= 0.004);
  CHECK(std::abs(stats.variance - 1.0) <= 0.01);
}

TEST_CASE("noisy oracle: zero function, zero noise") {
  StochasticOracle oracle = noisy_value_oracle([](const Vec&) { return 0.0; },
                                               0.0, 2);
  RandomSource rng = make_rng(0);
  for (int i = 0; i < 10; ++i) CHECK(oracle.sample({1.0, 2.0}, rng) == 0.0);
}

TEST_CASE("noisy oracle: exact evaluation without noise") {
  StochasticOracle oracle =
      noisy_value_oracle([](const Vec& x) { return norm(x); }, 0.0, 2);
  RandomSource rng = make_rng(0);
  CHECK(oracle.sample({3.0, 4.0}, rng) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("noisy oracle matches the advertised mean and variance") {
  StochasticOracle oracle = noisy_value_oracle([](const Vec&) { return 0.0; },
                                               1.0, 1);
  RandomSource rng = make_rng(5);
  const Vec x = {0.0};
  const auto stats = zodd_test::sample_mean(
      1000000, [&] { return oracle.evaluate(x, rng); });
  CHECK(std::abs(stats.mean) <= 0.004);
  CHECK(std::abs(stats.variance - 1.0) <= 0.01);
}

TEST_CASE("empirical mean converges at rate sigma / sqrt(N)") {
  const double sigma = 0.5;
  StochasticOracle oracle =
      noisy_value_oracle([](const Vec& x) { return x[0] * 2.0; }, sigma, 1);
  RandomSource rng = make_rng(17);
  const Vec x = {1.5};
  const int n = 1000000;
  const auto stats =
      zodd_test::sample_mean(n, [&] { return oracle.evaluate(x, rng); });
  CHECK(std::abs(stats.mean - 3.0) <= 4.0 * sigma / std::sqrt(n));
}

TEST_CASE("query counter meters sample but not evaluate") {
  StochasticOracle oracle = noisy_value_oracle([](const Vec&) { return 1.0; },
                                               0.0, 1);
  RandomSource rng = make_rng(0);
  CHECK(oracle.queries() == 0);
  oracle.sample({0.0}, rng);
  oracle.sample({0.0}, rng);
  CHECK(oracle.queries() == 2);
  oracle.evaluate({0.0}, rng);
  CHECK(oracle.queries() == 2);
  oracle.reset_queries();
  CHECK(oracle.queries() == 0);
}

TEST_CASE("problem spec validation") {
  ProblemSpec spec;
  spec.dimension = 2;
  spec.lipschitz = 1.0;
  CHECK_NOTHROW(spec.validate());
  spec.lipschitz = 0.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.lipschitz = 1.0;
  spec.noise_bound = -1.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.noise_bound = 0.0;
  spec.grad_lipschitz = 0.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("vector helpers") {
  const Vec a = {3.0, 4.0};
  CHECK(norm(a) == doctest::Approx(5.0));
  CHECK(dot(a, a) == doctest::Approx(25.0));
  CHECK(distance(a, {0.0, 0.0}) == doctest::Approx(5.0));
  Vec b = zeros(2);
  axpy(b, 2.0, a);
  CHECK(b[0] == doctest::Approx(6.0));
  CHECK(all_finite(b));
  b[0] = std::nan("");
  CHECK(!all_finite(b));
}
