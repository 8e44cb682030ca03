#pragma once

#include <cstdint>

#include "zodd/core.hpp"
#include "zodd/o2nc.hpp"
#include "zodd/sgd.hpp"

// Closed-form parameter schedules. Each function evaluates its theorem's
// formulas verbatim from the problem constants; a budget clamp scales the
// horizon down for desk-scale runs while keeping the per-step geometry.

namespace zodd {

/// Leading coefficients of the Lipschitz terms in the second-moment bounds.
/// Defaults follow the lemma-level constants; the theorem statements quote
/// smaller constants (2 and 42), available here as overrides.
struct ScheduleConstants {
  double two_point_dl2_coeff;   // multiplies d L^2 in the two-point bound
  double one_point_d2l2_coeff;  // multiplies d^2 L^2 in the one-point bound

  ScheduleConstants();
};

enum class SmoothMode { gradient_lipschitz, hessian_lipschitz };

struct Schedule {
  enum class Algo { o2nc, sgd } algo = Algo::o2nc;
  O2NCOption option = O2NCOption::two_point;

  double delta = 0.0;  // smoothing radius the run should use
  double eta = 0.0;

  // o2nc quantities
  std::uint64_t block_len = 0;  // M
  std::uint64_t n_blocks = 0;   // K

  // sgd quantities
  std::uint64_t batch = 0;       // B
  std::uint64_t iterations = 0;  // T (sgd)

  double g_squared = 0.0;  // G^2 (o2nc) or V_delta (sgd)
  std::uint64_t predicted_queries = 0;

  bool clamped = false;
  std::uint64_t unclamped_queries = 0;
  // Set when a ceiling result exceeded the representable range; such a
  // schedule is only meaningful after clamping.
  bool saturated = false;

  std::uint64_t horizon() const {
    return algo == Algo::o2nc ? block_len * n_blocks : iterations;
  }
  O2NCConfig to_o2nc_config() const;
  SGDConfig to_sgd_config() const;
};

/// Second-moment constant G^2 for the given option at smoothing radius delta.
double g_squared_theorem2(const ProblemSpec& spec, double delta,
                          O2NCOption option,
                          const ScheduleConstants& constants = {});

/// Variance constant V_delta for the mini-batch two-point estimator.
double variance_bound_sgd(const ProblemSpec& spec, double delta,
                          const ScheduleConstants& constants = {});

/// Smoothness bound beta_delta = c sqrt(d) L / delta of the surrogate.
double smoothness_bound(const ProblemSpec& spec, double delta);

/// Conversion-loop schedule at run radius delta and target accuracy epsilon:
/// M = ceil(16 G^2 / eps^2), eta = D / (G sqrt(M)), K = ceil(2(gap + delta L)
/// / (delta eps)). Predicted queries: 2T or T+1 by option.
Schedule schedule_theorem2(const ProblemSpec& spec, double delta,
                           double epsilon, O2NCOption option,
                           const ScheduleConstants& constants = {});

/// Schedule certifying a Goldstein point at radius delta: by default the run
/// uses radius delta/2 so the block geometry keeps every gradient inside
/// the delta-subdifferential at the averaged output.
Schedule schedule_goldstein(const ProblemSpec& spec, double delta,
                            double epsilon, O2NCOption option,
                            bool halve_radius = true,
                            const ScheduleConstants& constants = {});

/// Stationarity schedules for smooth objectives: picks delta = eps / (4 L_g)
/// or sqrt(eps / (2 L_H)) and runs the conversion loop at accuracy eps/2.
Schedule schedule_smooth(const ProblemSpec& spec, double epsilon,
                         SmoothMode mode, O2NCOption option,
                         const ScheduleConstants& constants = {});

/// SGD schedule: eta = 1/beta_delta, B = ceil(2 V_delta / eps^2),
/// T = ceil(4 beta_delta (gap + delta L) / eps^2); 2BT queries.
Schedule schedule_sgd(const ProblemSpec& spec, double delta, double epsilon,
                      const ScheduleConstants& constants = {});

/// Shrinks K (o2nc) or T (sgd) so the predicted query count fits the cap,
/// keeping M, B and eta untouched. Never drops below one block/iteration.
Schedule clamp_budget(Schedule s, std::uint64_t max_queries);

}  // namespace zodd
