#include "zodd/sgd.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace zodd {

void SGDConfig::validate() const {
  if (!(delta > 0)) throw std::invalid_argument("SGDConfig: delta must be > 0");
  if (batch < 1) throw std::invalid_argument("SGDConfig: batch must be >= 1");
  if (iterations < 1) throw std::invalid_argument("SGDConfig: iterations must be >= 1");
  if (!(eta > 0)) throw std::invalid_argument("SGDConfig: eta must be > 0");
}

void EstimatorSGDConfig::validate() const {
  if (!(mu > 0)) throw std::invalid_argument("EstimatorSGDConfig: mu must be > 0");
  if (batch < 1) throw std::invalid_argument("EstimatorSGDConfig: batch must be >= 1");
  if (iterations < 1)
    throw std::invalid_argument("EstimatorSGDConfig: iterations must be >= 1");
  if (!(eta > 0)) throw std::invalid_argument("EstimatorSGDConfig: eta must be > 0");
}

namespace {

// Shared descent loop: `estimate` produces the step direction at x_t. The
// candidates for the returned point are x_0 .. x_{T-1}, as in the sampled
// output rule.
template <typename EstimateFn>
RunTrace descend(int iterations, double eta, bool store_iterates,
                 StochasticOracle& oracle, RandomSource& rng,
                 EstimateFn estimate) {
  const int d = oracle.dimension();
  const std::uint64_t queries_before = oracle.queries();

  RunTrace trace;
  trace.iters.reserve(static_cast<std::size_t>(iterations));
  std::vector<Vec> candidates;
  candidates.reserve(static_cast<std::size_t>(iterations));

  Vec x = zeros(d);
  for (int t = 0; t < iterations; ++t) {
    candidates.push_back(x);
    GradientEstimate est = estimate(x);

    IterRecord rec;
    rec.t = t + 1;
    rec.y = x;  // the point the estimate was taken at
    rec.g = est.g;
    rec.delta = scaled(est.g, -eta);
    rec.queries_after = oracle.queries() - queries_before;

    if (!all_finite(est.g)) {
      trace.iters.push_back(std::move(rec));
      trace.aborted = true;
      trace.abort_t = t + 1;
      trace.abort_reason =
          "non-finite gradient estimate at iteration " + std::to_string(t + 1);
      trace.total_queries = oracle.queries() - queries_before;
      return trace;
    }
    axpy(x, -eta, est.g);
    if (store_iterates) rec.x = x;  // iterate after this step
    trace.iters.push_back(std::move(rec));
    if (!all_finite(x)) {
      trace.aborted = true;
      trace.abort_t = t + 1;
      trace.abort_reason =
          "non-finite iterate after update " + std::to_string(t + 1);
      trace.total_queries = oracle.queries() - queries_before;
      return trace;
    }
  }

  const auto t_out = rng.below(static_cast<std::uint64_t>(iterations));
  trace.k_out = static_cast<int>(t_out);  // 0-based output iteration
  trace.output = candidates[static_cast<std::size_t>(t_out)];
  trace.output_block_points = {trace.output};
  trace.total_queries = oracle.queries() - queries_before;
  return trace;
}

}  // namespace

RunTrace run_sgd(const SGDConfig& cfg, StochasticOracle& oracle,
                 RandomSource& rng) {
  cfg.validate();
  return descend(cfg.iterations, cfg.eta, cfg.store_iterates, oracle, rng,
                 [&](const Vec& x) {
                   return minibatch_two_point(x, cfg.delta, cfg.batch, oracle,
                                              rng);
                 });
}

RunTrace run_estimator_sgd(const EstimatorSGDConfig& cfg,
                           StochasticOracle& oracle, RandomSource& rng) {
  cfg.validate();
  return descend(cfg.iterations, cfg.eta, cfg.store_iterates, oracle, rng,
                 [&](const Vec& x) {
                   GradientEstimate avg;
                   avg.g = zeros(oracle.dimension());
                   for (int j = 0; j < cfg.batch; ++j) {
                     GradientEstimate one =
                         baseline_estimate(cfg.kind, x, cfg.mu, oracle, rng);
                     axpy(avg.g, 1.0, one.g);
                     avg.queries_used += one.queries_used;
                   }
                   for (double& c : avg.g) c /= cfg.batch;
                   return avg;
                 });
}

}  // namespace zodd
