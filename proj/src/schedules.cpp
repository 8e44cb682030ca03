#include "zodd/schedules.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace zodd {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;  // sqrt(2 pi)

// Ceiling into uint64 with saturation; the theorem horizons blow up as
// eps^-6, so desk-scale callers clamp afterwards.
std::uint64_t ceil_u64(double x, bool& saturated) {
  if (!(x > 0)) return 1;
  const double c = std::ceil(x);
  if (c >= 1.8446744073709552e19) {
    saturated = true;
    return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(c);
}

int to_int_checked(std::uint64_t v, const char* what) {
  if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max()))
    throw std::overflow_error(std::string(what) +
                              " too large for a runnable config; clamp the "
                              "budget first");
  return static_cast<int>(v);
}

}  // namespace

ScheduleConstants::ScheduleConstants()
    : two_point_dl2_coeff(16.0 * kSqrt2Pi), one_point_d2l2_coeff(385.0) {}

double g_squared_theorem2(const ProblemSpec& spec, double delta,
                          O2NCOption option,
                          const ScheduleConstants& constants) {
  spec.validate();
  if (!(delta > 0)) throw std::invalid_argument("delta must be > 0");
  const double d = spec.dimension;
  const double s2 = spec.noise_bound * spec.noise_bound;
  const double L2 = spec.lipschitz * spec.lipschitz;
  if (option == O2NCOption::two_point) {
    return d * d * s2 / (2.0 * delta * delta) +
           constants.two_point_dl2_coeff * d * L2;
  }
  return 6.0 * d * d * s2 / (delta * delta) +
         constants.one_point_d2l2_coeff * d * d * L2;
}

double variance_bound_sgd(const ProblemSpec& spec, double delta,
                          const ScheduleConstants& constants) {
  return g_squared_theorem2(spec, delta, O2NCOption::two_point, constants);
}

double smoothness_bound(const ProblemSpec& spec, double delta) {
  spec.validate();
  if (!(delta > 0)) throw std::invalid_argument("delta must be > 0");
  return spec.smoothing_constant * std::sqrt(static_cast<double>(spec.dimension)) *
         spec.lipschitz / delta;
}

Schedule schedule_theorem2(const ProblemSpec& spec, double delta,
                           double epsilon, O2NCOption option,
                           const ScheduleConstants& constants) {
  spec.validate();
  if (!(delta > 0)) throw std::invalid_argument("delta must be > 0");
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be > 0");

  Schedule s;
  s.algo = Schedule::Algo::o2nc;
  s.option = option;
  s.delta = delta;
  s.g_squared = g_squared_theorem2(spec, delta, option, constants);

  const double g = std::sqrt(s.g_squared);
  s.block_len = ceil_u64(16.0 * s.g_squared / (epsilon * epsilon), s.saturated);
  s.n_blocks = ceil_u64(
      2.0 * (spec.gap + delta * spec.lipschitz) / (delta * epsilon),
      s.saturated);

  const double blocks_d = static_cast<double>(s.block_len);
  const double inner_radius = delta / blocks_d;
  s.eta = inner_radius / (g * std::sqrt(blocks_d));

  const double horizon = blocks_d * static_cast<double>(s.n_blocks);
  bool dummy = false;
  s.predicted_queries =
      option == O2NCOption::two_point
          ? ceil_u64(2.0 * horizon, dummy)
          : ceil_u64(horizon + 1.0, dummy);
  s.unclamped_queries = s.predicted_queries;
  return s;
}

Schedule schedule_goldstein(const ProblemSpec& spec, double delta,
                            double epsilon, O2NCOption option,
                            bool halve_radius,
                            const ScheduleConstants& constants) {
  const double run_delta = halve_radius ? delta / 2.0 : delta;
  return schedule_theorem2(spec, run_delta, epsilon, option, constants);
}

Schedule schedule_smooth(const ProblemSpec& spec, double epsilon,
                         SmoothMode mode, O2NCOption option,
                         const ScheduleConstants& constants) {
  spec.validate();
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be > 0");
  double delta = 0.0;
  if (mode == SmoothMode::gradient_lipschitz) {
    if (!spec.grad_lipschitz)
      throw std::invalid_argument("gradient-Lipschitz schedule needs L_g");
    delta = epsilon / (4.0 * *spec.grad_lipschitz);
  } else {
    if (!spec.hess_lipschitz)
      throw std::invalid_argument("Hessian-Lipschitz schedule needs L_H");
    delta = std::sqrt(epsilon / (2.0 * *spec.hess_lipschitz));
  }
  return schedule_theorem2(spec, delta, epsilon / 2.0, option, constants);
}

Schedule schedule_sgd(const ProblemSpec& spec, double delta, double epsilon,
                      const ScheduleConstants& constants) {
  spec.validate();
  if (!(delta > 0)) throw std::invalid_argument("delta must be > 0");
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be > 0");

  Schedule s;
  s.algo = Schedule::Algo::sgd;
  s.delta = delta;
  s.g_squared = variance_bound_sgd(spec, delta, constants);
  const double beta = smoothness_bound(spec, delta);
  s.eta = 1.0 / beta;
  s.batch = ceil_u64(2.0 * s.g_squared / (epsilon * epsilon), s.saturated);
  s.iterations = ceil_u64(
      4.0 * beta * (spec.gap + delta * spec.lipschitz) / (epsilon * epsilon),
      s.saturated);
  bool dummy = false;
  s.predicted_queries = ceil_u64(2.0 * static_cast<double>(s.batch) *
                                     static_cast<double>(s.iterations),
                                 dummy);
  s.unclamped_queries = s.predicted_queries;
  return s;
}

Schedule clamp_budget(Schedule s, std::uint64_t max_queries) {
  if (max_queries < 1) throw std::invalid_argument("budget must be >= 1");
  if (s.predicted_queries <= max_queries) return s;
  s.clamped = true;
  if (s.algo == Schedule::Algo::o2nc) {
    const std::uint64_t per_block_cap =
        s.option == O2NCOption::two_point ? max_queries / 2
        : max_queries > 1                 ? max_queries - 1
                                          : 1;
    if (s.block_len > per_block_cap) {
      // Even a single block busts the cap; shrink it and restore the
      // stepsize relation eta = D / (G sqrt(M)) at the new length.
      s.block_len = per_block_cap < 1 ? 1 : per_block_cap;
      const double m = static_cast<double>(s.block_len);
      s.eta = (s.delta / m) / (std::sqrt(s.g_squared) * std::sqrt(m));
    }
    std::uint64_t max_blocks =
        s.option == O2NCOption::two_point
            ? max_queries / (2 * s.block_len)
            : (max_queries - 1) / s.block_len;
    if (max_blocks < 1) max_blocks = 1;
    s.n_blocks = max_blocks;
    const std::uint64_t horizon = s.block_len * s.n_blocks;
    s.predicted_queries =
        s.option == O2NCOption::two_point ? 2 * horizon : horizon + 1;
  } else {
    if (2 * s.batch > max_queries) {
      s.batch = std::max<std::uint64_t>(max_queries / 2, 1);
    }
    std::uint64_t max_iters = max_queries / (2 * s.batch);
    if (max_iters < 1) max_iters = 1;
    s.iterations = max_iters;
    s.predicted_queries = 2 * s.batch * s.iterations;
  }
  return s;
}

O2NCConfig Schedule::to_o2nc_config() const {
  if (algo != Algo::o2nc)
    throw std::logic_error("schedule does not describe a conversion-loop run");
  O2NCConfig cfg;
  cfg.delta = delta;
  cfg.block_len = to_int_checked(block_len, "block length");
  cfg.n_blocks = to_int_checked(n_blocks, "block count");
  cfg.eta = eta;
  cfg.option = option;
  return cfg;
}

SGDConfig Schedule::to_sgd_config() const {
  if (algo != Algo::sgd)
    throw std::logic_error("schedule does not describe an SGD run");
  SGDConfig cfg;
  cfg.delta = delta;
  cfg.batch = to_int_checked(batch, "batch size");
  cfg.iterations = to_int_checked(iterations, "iteration count");
  cfg.eta = eta;
  return cfg;
}

}  // namespace zodd
