#include "zodd/estimators.hpp"

#include <stdexcept>

#include "zodd/smoothing.hpp"

namespace zodd {

namespace {

Vec displaced(const Vec& x, double step, const Vec& dir) {
  Vec out = x;
  axpy(out, step, dir);
  return out;
}

}  // namespace

ResidualState init_residual_state(const Vec& y0, double delta,
                                  StochasticOracle& oracle, RandomSource& rng) {
  if (!(delta > 0)) throw std::invalid_argument("delta must be > 0");
  const Vec u0 = sample_sphere(oracle.dimension(), rng);
  ResidualState state;
  state.prev_value = oracle.sample(displaced(y0, delta, u0), rng);
  state.initialized = true;
  return state;
}

GradientEstimate two_point_along(const Vec& y, double delta, const Vec& u,
                                 StochasticOracle& oracle, RandomSource& rng) {
  if (!(delta > 0)) throw std::invalid_argument("delta must be > 0");
  const int d = oracle.dimension();
  const double fp = oracle.sample(displaced(y, delta, u), rng);
  const double fm = oracle.sample(displaced(y, -delta, u), rng);
  GradientEstimate est;
  est.g = scaled(u, (d / (2.0 * delta)) * (fp - fm));
  est.queries_used = 2;
  est.direction = u;
  return est;
}

GradientEstimate two_point(const Vec& y, double delta, StochasticOracle& oracle,
                           RandomSource& rng) {
  return two_point_along(y, delta, sample_sphere(oracle.dimension(), rng),
                         oracle, rng);
}

GradientEstimate one_point_residual_along(const Vec& y, double delta,
                                          const Vec& u,
                                          StochasticOracle& oracle,
                                          ResidualState& state,
                                          RandomSource& rng) {
  if (!(delta > 0)) throw std::invalid_argument("delta must be > 0");
  if (!state.initialized)
    throw std::logic_error("one_point_residual used before initialization");
  const int d = oracle.dimension();
  const double h = oracle.sample(displaced(y, delta, u), rng);
  GradientEstimate est;
  est.g = scaled(u, (d / delta) * (h - state.prev_value));
  est.queries_used = 1;
  est.carried_feedback = h;
  est.direction = u;
  state.prev_value = h;
  return est;
}

GradientEstimate one_point_residual(const Vec& y, double delta,
                                    StochasticOracle& oracle,
                                    ResidualState& state, RandomSource& rng) {
  return one_point_residual_along(y, delta,
                                  sample_sphere(oracle.dimension(), rng),
                                  oracle, state, rng);
}

GradientEstimate minibatch_two_point(const Vec& x, double delta, int batch,
                                     StochasticOracle& oracle,
                                     RandomSource& rng) {
  if (batch < 1) throw std::invalid_argument("batch must be >= 1");
  GradientEstimate est;
  est.g = zeros(oracle.dimension());
  for (int j = 0; j < batch; ++j) {
    const GradientEstimate one = two_point(x, delta, oracle, rng);
    axpy(est.g, 1.0, one.g);
    est.queries_used += one.queries_used;
    if (batch == 1) est.direction = one.direction;
  }
  for (double& c : est.g) c /= batch;
  return est;
}

GradientEstimate coordinate_two_point(const Vec& x, double mu,
                                      StochasticOracle& oracle,
                                      RandomSource& rng) {
  if (!(mu > 0)) throw std::invalid_argument("mu must be > 0");
  const int d = oracle.dimension();
  GradientEstimate est;
  est.g = zeros(d);
  Vec point = x;
  for (int i = 0; i < d; ++i) {
    point[i] = x[i] + mu;
    const double fp = oracle.sample(point, rng);
    point[i] = x[i] - mu;
    const double fm = oracle.sample(point, rng);
    point[i] = x[i];
    est.g[i] = (fp - fm) / (2.0 * mu);
  }
  est.queries_used = 2 * d;
  return est;
}

GradientEstimate gaussian_two_point(const Vec& x, double mu,
                                    StochasticOracle& oracle,
                                    RandomSource& rng) {
  if (!(mu > 0)) throw std::invalid_argument("mu must be > 0");
  const int d = oracle.dimension();
  Vec z(static_cast<std::size_t>(d));
  for (double& c : z) c = rng.normal();
  const double fp = oracle.sample(displaced(x, mu, z), rng);
  const double fm = oracle.sample(displaced(x, -mu, z), rng);
  GradientEstimate est;
  est.g = scaled(z, (fp - fm) / (2.0 * mu));
  est.queries_used = 2;
  est.direction = z;
  return est;
}

GradientEstimate plain_one_point(const Vec& x, double mu,
                                 StochasticOracle& oracle, RandomSource& rng) {
  if (!(mu > 0)) throw std::invalid_argument("mu must be > 0");
  const int d = oracle.dimension();
  const Vec u = sample_sphere(d, rng);
  const double fv = oracle.sample(displaced(x, mu, u), rng);
  GradientEstimate est;
  est.g = scaled(u, (d / mu) * fv);
  est.queries_used = 1;
  est.direction = u;
  return est;
}

GradientEstimate baseline_estimate(BaselineKind kind, const Vec& x, double mu,
                                   StochasticOracle& oracle, RandomSource& rng) {
  switch (kind) {
    case BaselineKind::coordinate_2pt:
      return coordinate_two_point(x, mu, oracle, rng);
    case BaselineKind::gaussian_2pt:
      return gaussian_two_point(x, mu, oracle, rng);
    case BaselineKind::sphere_2pt:
      return two_point(x, mu, oracle, rng);
    case BaselineKind::plain_1pt:
      return plain_one_point(x, mu, oracle, rng);
  }
  throw std::logic_error("unknown baseline estimator kind");
}

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::coordinate_2pt: return "coordinate_2pt";
    case BaselineKind::gaussian_2pt: return "gaussian_2pt";
    case BaselineKind::sphere_2pt: return "sphere_2pt";
    case BaselineKind::plain_1pt: return "plain_1pt";
  }
  return "unknown";
}

}  // namespace zodd
