#include "zodd/o2nc.hpp"

#include <cmath>
#include <stdexcept>

#include "zodd/estimators.hpp"

namespace zodd {

void O2NCConfig::validate() const {
  if (!(delta > 0)) throw std::invalid_argument("O2NCConfig: delta must be > 0");
  if (block_len < 1) throw std::invalid_argument("O2NCConfig: block_len must be >= 1");
  if (n_blocks < 1) throw std::invalid_argument("O2NCConfig: n_blocks must be >= 1");
  if (!(eta > 0)) throw std::invalid_argument("O2NCConfig: eta must be > 0");
}

Vec project_ball(const Vec& v, double radius) {
  if (radius < 0) throw std::invalid_argument("projection radius must be >= 0");
  const double n = norm(v);
  if (n <= radius) return v;
  return scaled(v, radius / n);
}

RunTrace run_o2nc(const O2NCConfig& cfg, StochasticOracle& oracle,
                  RandomSource& rng) {
  cfg.validate();
  const int d = oracle.dimension();
  const double D = cfg.inner_radius();
  const std::uint64_t queries_before = oracle.queries();

  RunTrace trace;
  trace.iters.reserve(static_cast<std::size_t>(cfg.horizon()));
  trace.block_avg_y.reserve(static_cast<std::size_t>(cfg.n_blocks));

  Vec x = zeros(d);  // x_0
  Vec step = zeros(d);

  ResidualState residual;
  if (cfg.option == O2NCOption::one_point_residual) {
    // Single initialization query at y_0 = x_0 before the first block.
    residual = init_residual_state(x, cfg.delta, oracle, rng);
  }

  std::vector<std::vector<Vec>> block_points(
      static_cast<std::size_t>(cfg.n_blocks));

  for (int k = 1; k <= cfg.n_blocks; ++k) {
    step = zeros(d);
    Vec block_sum = zeros(d);
    for (int m = 1; m <= cfg.block_len; ++m) {
      const int t = (k - 1) * cfg.block_len + m;
      const double s = rng.uniform();

      Vec y = x;
      axpy(y, s, step);
      axpy(x, 1.0, step);

      GradientEstimate est =
          cfg.option == O2NCOption::two_point
              ? two_point(y, cfg.delta, oracle, rng)
              : one_point_residual(y, cfg.delta, oracle, residual, rng);

      IterRecord rec;
      rec.t = t;
      rec.s = s;
      if (cfg.store_iterates) rec.x = x;
      rec.y = y;
      rec.delta = step;
      rec.g = est.g;
      rec.queries_after = oracle.queries() - queries_before;

      if (!all_finite(est.g)) {
        trace.aborted = true;
        trace.abort_t = t;
        trace.abort_reason = "non-finite gradient estimate at iteration " +
                             std::to_string(t);
        trace.iters.push_back(std::move(rec));
        trace.total_queries = oracle.queries() - queries_before;
        return trace;
      }

      axpy(block_sum, 1.0, y);
      block_points[static_cast<std::size_t>(k - 1)].push_back(std::move(y));
      trace.iters.push_back(std::move(rec));

      axpy(step, -cfg.eta, est.g);
      step = project_ball(step, D);
    }
    trace.block_avg_y.push_back(scaled(block_sum, 1.0 / cfg.block_len));
  }

  trace.k_out = 1 + static_cast<int>(rng.below(
                        static_cast<std::uint64_t>(cfg.n_blocks)));
  trace.output = trace.block_avg_y[static_cast<std::size_t>(trace.k_out - 1)];
  trace.output_block_points =
      std::move(block_points[static_cast<std::size_t>(trace.k_out - 1)]);
  trace.total_queries = oracle.queries() - queries_before;
  return trace;
}

double goldstein_certificate(const std::vector<Vec>& block_points,
                             const ObjectiveFn& f, const SmoothingParams& p,
                             RandomSource& rng) {
  if (block_points.empty())
    throw std::invalid_argument("certificate needs at least one block point");
  Vec avg = zeros(static_cast<int>(block_points.front().size()));
  for (const Vec& y : block_points) {
    const Vec grad = mc_smoothed_gradient(f, y, p, rng);
    axpy(avg, 1.0, grad);
  }
  for (double& c : avg) c /= static_cast<double>(block_points.size());
  return norm(avg);
}

double goldstein_certificate(const RunTrace& trace, const ObjectiveFn& f,
                             const SmoothingParams& p, RandomSource& rng) {
  return goldstein_certificate(trace.output_block_points, f, p, rng);
}

}  // namespace zodd
