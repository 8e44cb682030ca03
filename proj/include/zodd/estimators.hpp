#pragma once

#include <optional>
#include <string>

#include "zodd/core.hpp"

// Zeroth-order gradient estimators for the smoothed surrogate under
// decision-dependent sampling. Every oracle call inside an estimator is a
// fresh draw at the perturbed point: the sampling law moves with the query,
// so the two sides of a difference can never share noise.

namespace zodd {

struct GradientEstimate {
  Vec g;
  int queries_used = 0;
  // Oracle value to reuse at the next iteration; set only by the
  // one-point residual estimator.
  std::optional<double> carried_feedback;
  // Perturbation direction actually used (empty for batched estimators).
  Vec direction;
};

/// Feedback value carried between consecutive one-point-residual calls.
struct ResidualState {
  double prev_value = 0.0;
  bool initialized = false;
};

/// Spends the single initialization query at y0: samples a sphere direction
/// u0 and stores F(y0 + delta*u0) as the first carried feedback value.
ResidualState init_residual_state(const Vec& y0, double delta,
                                  StochasticOracle& oracle, RandomSource& rng);

/// Two-point sphere estimator at y with radius delta:
///   g = (d / 2 delta) * (F(y + delta u; xi+) - F(y - delta u; xi-)) * u,
/// with u uniform on the sphere and xi+, xi- independent fresh draws at the
/// two perturbed points. Two oracle queries; conditionally unbiased for the
/// smoothed gradient at y.
GradientEstimate two_point(const Vec& y, double delta, StochasticOracle& oracle,
                           RandomSource& rng);

/// Same with a caller-supplied direction (tests pin u this way).
GradientEstimate two_point_along(const Vec& y, double delta, const Vec& u,
                                 StochasticOracle& oracle, RandomSource& rng);

/// One-point residual estimator: reuses the previous iteration's feedback,
///   g = (d / delta) * (F(y + delta u; xi) - prev) * u,
/// costing a single fresh query. Updates the state with the new feedback.
GradientEstimate one_point_residual(const Vec& y, double delta,
                                    StochasticOracle& oracle,
                                    ResidualState& state, RandomSource& rng);

GradientEstimate one_point_residual_along(const Vec& y, double delta,
                                          const Vec& u,
                                          StochasticOracle& oracle,
                                          ResidualState& state,
                                          RandomSource& rng);

/// Average of `batch` independent two-point estimates at the same x.
/// 2 * batch queries; conditional variance shrinks linearly in the batch.
GradientEstimate minibatch_two_point(const Vec& x, double delta, int batch,
                                     StochasticOracle& oracle,
                                     RandomSource& rng);

/// Comparison estimators used only by the benchmark harness.
enum class BaselineKind { coordinate_2pt, gaussian_2pt, sphere_2pt, plain_1pt };

/// Coordinate-wise central differences: 2d queries, exact on linear f.
GradientEstimate coordinate_two_point(const Vec& x, double mu,
                                      StochasticOracle& oracle,
                                      RandomSource& rng);

/// Gaussian-direction central difference: 2 queries.
GradientEstimate gaussian_two_point(const Vec& x, double mu,
                                    StochasticOracle& oracle,
                                    RandomSource& rng);

/// Classic one-point estimator (d/mu) * F(x + mu u) * u: 1 query, heavy
/// variance; included to compare against the residual form.
GradientEstimate plain_one_point(const Vec& x, double mu,
                                 StochasticOracle& oracle, RandomSource& rng);

GradientEstimate baseline_estimate(BaselineKind kind, const Vec& x, double mu,
                                   StochasticOracle& oracle, RandomSource& rng);

std::string to_string(BaselineKind kind);

}  // namespace zodd
