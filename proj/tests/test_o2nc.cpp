#include <cmath>
#include <limits>

#include "doctest.h"
#include "support.hpp"
#include "zodd/o2nc.hpp"

using namespace zodd;

TEST_CASE("ball projection") {
  CHECK(project_ball({2.0, 0.0}, 1.0) == Vec{1.0, 0.0});
  CHECK(project_ball({0.3, 0.4}, 1.0) == Vec{0.3, 0.4});  // interior fixed
  CHECK(project_ball({3.0, 4.0}, 5.0) == Vec{3.0, 4.0});
  const Vec p = project_ball({3.0, 4.0}, 2.5);
  CHECK(p[0] == doctest::Approx(1.5));
  CHECK(p[1] == doctest::Approx(2.0));
  // idempotent
  CHECK(project_ball(p, 2.5) == p);
}

namespace {

O2NCConfig small_config(O2NCOption option) {
  O2NCConfig cfg;
  cfg.delta = 0.2;
  cfg.block_len = 5;
  cfg.n_blocks = 4;
  cfg.eta = 0.01;
  cfg.option = option;
  return cfg;
}

void check_trace_geometry(const RunTrace& trace, const O2NCConfig& cfg) {
  const double D = cfg.inner_radius();
  REQUIRE(!trace.aborted);
  REQUIRE(trace.iters.size() == static_cast<std::size_t>(cfg.horizon()));

  // y_1 equals the all-zero start.
  CHECK(norm(trace.iters.front().y) == 0.0);

  for (std::size_t i = 0; i < trace.iters.size(); ++i) {
    CHECK(norm(trace.iters[i].delta) <= D + 1e-12);
    if (i > 0)
      CHECK(distance(trace.iters[i].y, trace.iters[i - 1].y) <= 2.0 * D + 1e-12);
  }
  for (int k = 0; k < cfg.n_blocks; ++k) {
    const int base = k * cfg.block_len;
    for (int s = 0; s < cfg.block_len; ++s)
      for (int t = s + 1; t < cfg.block_len; ++t)
        CHECK(distance(trace.iters[base + s].y, trace.iters[base + t].y) <=
              cfg.delta + 1e-12);
  }
  for (const Vec& y : trace.output_block_points)
    CHECK(distance(trace.output, y) <= cfg.delta + 1e-12);
}

}  // namespace

TEST_CASE("constant objective keeps the loop at the origin") {
  for (auto option : {O2NCOption::two_point, O2NCOption::one_point_residual}) {
    StochasticOracle oracle =
        noisy_value_oracle([](const Vec&) { return 3.0; }, 0.0, 2);
    RandomSource rng = make_rng(1);
    const RunTrace trace = run_o2nc(small_config(option), oracle, rng);
    REQUIRE(!trace.aborted);
    for (const IterRecord& rec : trace.iters) {
      CHECK(norm(rec.g) == 0.0);
      CHECK(norm(rec.delta) == 0.0);
      CHECK(norm(rec.y) == 0.0);
    }
    CHECK(norm(trace.output) == 0.0);
  }
}

TEST_CASE("query counts are exact for both options") {
  O2NCConfig cfg;
  cfg.delta = 0.5;
  cfg.block_len = 3;
  cfg.n_blocks = 2;
  cfg.eta = 0.1;

  cfg.option = O2NCOption::two_point;
  {
    StochasticOracle oracle =
        noisy_value_oracle([](const Vec& x) { return norm(x); }, 0.1, 2);
    RandomSource rng = make_rng(2);
    const RunTrace trace = run_o2nc(cfg, oracle, rng);
    CHECK(trace.total_queries == 12);  // 2T with T = 6
    CHECK(oracle.queries() == 12);
  }
  cfg.option = O2NCOption::one_point_residual;
  {
    StochasticOracle oracle =
        noisy_value_oracle([](const Vec& x) { return norm(x); }, 0.1, 2);
    RandomSource rng = make_rng(2);
    const RunTrace trace = run_o2nc(cfg, oracle, rng);
    CHECK(trace.total_queries == 7);  // T + 1
    CHECK(oracle.queries() == 7);
  }
}

TEST_CASE("trace geometry invariants hold on noisy runs") {
  for (auto option : {O2NCOption::two_point, O2NCOption::one_point_residual}) {
    StochasticOracle oracle =
        noisy_value_oracle([](const Vec& x) { return norm(x); }, 0.1, 3);
    RandomSource rng = make_rng(7);
    const O2NCConfig cfg = small_config(option);
    const RunTrace trace = run_o2nc(cfg, oracle, rng);
    check_trace_geometry(trace, cfg);
    CHECK(trace.k_out >= 1);
    CHECK(trace.k_out <= cfg.n_blocks);
    CHECK(trace.block_avg_y.size() == static_cast<std::size_t>(cfg.n_blocks));
  }
}

TEST_CASE("identical configuration and seed reproduce the trace bit for bit") {
  auto run_once = [] {
    StochasticOracle oracle =
        noisy_value_oracle([](const Vec& x) { return norm(x); }, 0.2, 2);
    RandomSource rng = make_rng(99);
    return run_o2nc(small_config(O2NCOption::one_point_residual), oracle, rng);
  };
  const RunTrace a = run_once();
  const RunTrace b = run_once();
  REQUIRE(a.iters.size() == b.iters.size());
  for (std::size_t i = 0; i < a.iters.size(); ++i) {
    CHECK(a.iters[i].s == b.iters[i].s);
    CHECK(a.iters[i].y == b.iters[i].y);
    CHECK(a.iters[i].g == b.iters[i].g);
    CHECK(a.iters[i].delta == b.iters[i].delta);
  }
  CHECK(a.k_out == b.k_out);
  CHECK(a.output == b.output);
}

TEST_CASE("a non-finite oracle aborts the run with a diagnostic") {
  StochasticOracle oracle(
      2, [](const Vec&, RandomSource&) {
        return std::numeric_limits<double>::quiet_NaN();
      });
  RandomSource rng = make_rng(4);
  const RunTrace trace = run_o2nc(small_config(O2NCOption::two_point), oracle, rng);
  CHECK(trace.aborted);
  CHECK(trace.abort_t == 1);
  CHECK(!trace.abort_reason.empty());
}

TEST_CASE("certificate of a linear function is the coefficient norm") {
  const Vec a = {0.6, -0.8};
  const ObjectiveFn f = [a](const Vec& x) { return dot(a, x); };
  RandomSource rng = make_rng(5);
  SmoothingParams p{0.2, 200000};
  const std::vector<Vec> block = {{0.1, 0.0}, {0.0, 0.2}, {-0.1, 0.1}};
  const double cert = goldstein_certificate(block, f, p, rng);
  CHECK(cert == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("certificate of a quadratic at a fixed block is twice the norm") {
  const ObjectiveFn f = [](const Vec& x) { return dot(x, x); };
  const Vec x0 = {0.5, 0.25};
  RandomSource rng = make_rng(6);
  SmoothingParams p{0.1, 200000};
  const std::vector<Vec> block = {x0, x0, x0};
  const double cert = goldstein_certificate(block, f, p, rng);
  CHECK(cert == doctest::Approx(2.0 * norm(x0)).epsilon(0.03));
}

TEST_CASE("certificate of |x| vanishes at the kink by symmetry") {
  const ObjectiveFn f = [](const Vec& x) { return std::abs(x[0]); };
  RandomSource rng = make_rng(7);
  SmoothingParams p{0.5, 400000};
  const double cert = goldstein_certificate({Vec{0.0}}, f, p, rng);
  // SE of the mean of (1/delta) |u|-signed terms: bounded by 2/sqrt(n)
  CHECK(cert <= 4.0 * 2.0 / std::sqrt(400000.0));
}

TEST_CASE("end-to-end smoke: certificate decreases on a shifted norm") {
  // f(x) = ||x - c||, start at the origin at distance 1 from the kink.
  const Vec c = {1.0, 0.0};
  const ObjectiveFn f = [c](const Vec& x) { return distance(x, c); };
  StochasticOracle oracle = noisy_value_oracle(f, 0.1, 2);
  RandomSource rng = make_rng(12);

  O2NCConfig cfg;
  cfg.delta = 0.05;
  cfg.block_len = 20;
  cfg.n_blocks = 250;
  cfg.eta = 2e-4;
  cfg.option = O2NCOption::two_point;

  const RunTrace trace = run_o2nc(cfg, oracle, rng);
  REQUIRE(!trace.aborted);
  check_trace_geometry(trace, cfg);

  SmoothingParams p{cfg.delta, 20000};
  RandomSource cert_rng = make_rng(derive_seed(12, 2));
  const double cert_out = goldstein_certificate(trace, f, p, cert_rng);
  const double cert_init =
      goldstein_certificate({zeros(2)}, f, p, cert_rng);
  CHECK(cert_init > 0.9);  // gradient norm 1 away from the kink
  CHECK(cert_out < cert_init);
}
