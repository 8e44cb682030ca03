#pragma once

#include <functional>
#include <utility>

#include "zodd/core.hpp"

// Randomized smoothing over the unit ball: samplers for the uniform sphere
// and ball, and Monte-Carlo estimates of the smoothed surrogate and its
// gradient. The gradient estimate doubles as the ground-truth reference for
// estimator tests and stationarity certificates.

namespace zodd {

struct SmoothingParams {
  double delta = 1.0;   // smoothing radius
  int mc_samples = 1;   // Monte-Carlo budget

  void validate() const;
};

/// Uniform draw from the unit sphere S^{d-1} (normalized Gaussian; the
/// measure-zero all-zero draw is rejected and redrawn).
Vec sample_sphere(int d, RandomSource& rng);

/// Uniform draw from the closed unit ball: sphere direction scaled by
/// U^{1/d}. Exact, constant cost in any dimension.
Vec sample_ball(int d, RandomSource& rng);

/// Monte-Carlo estimate of the ball-smoothed value at x,
/// averaging f(x + delta * u) over mc_samples ball draws.
/// Throws on non-finite objective values.
double mc_smoothed_value(const ObjectiveFn& f, const Vec& x,
                         const SmoothingParams& p, RandomSource& rng);

/// Paired smoothed values at x and y using common random numbers, for
/// tight difference tests.
std::pair<double, double> mc_smoothed_value_crn(const ObjectiveFn& f,
                                                const Vec& x, const Vec& y,
                                                const SmoothingParams& p,
                                                RandomSource& rng);

/// Monte-Carlo estimate of the smoothed gradient at x:
/// average of (d/delta) * f(x + delta * u) * u over sphere draws.
Vec mc_smoothed_gradient(const ObjectiveFn& f, const Vec& x,
                         const SmoothingParams& p, RandomSource& rng);

/// Paired smoothed gradients at x and y with common sphere draws.
std::pair<Vec, Vec> mc_smoothed_gradient_crn(const ObjectiveFn& f,
                                             const Vec& x, const Vec& y,
                                             const SmoothingParams& p,
                                             RandomSource& rng);

/// Unbiased sample variance of h(u) over n_samples uniform sphere draws.
double variance_on_sphere(const std::function<double(const Vec&)>& h, int d,
                          int n_samples, RandomSource& rng);

}  // namespace zodd
