#pragma once

#include "zodd/core.hpp"
#include "zodd/estimators.hpp"
#include "zodd/o2nc.hpp"

// Mini-batch two-point SGD on the smoothed surrogate, the comparison
// baseline for Goldstein stationarity, plus estimator-swapped SGD variants
// used by the benchmark harness.

namespace zodd {

struct SGDConfig {
  double delta = 1.0;  // smoothing radius
  int batch = 1;       // B
  int iterations = 1;  // T
  double eta = 1.0;
  bool store_iterates = true;

  void validate() const;
};

/// Plain SGD with the mini-batch two-point estimator: x_{t+1} = x_t - eta g,
/// returning a uniformly chosen iterate x_{t_out}, t_out in {0..T-1}.
/// Query cost is exactly 2 * batch * iterations.
RunTrace run_sgd(const SGDConfig& cfg, StochasticOracle& oracle,
                 RandomSource& rng);

struct EstimatorSGDConfig {
  BaselineKind kind = BaselineKind::sphere_2pt;
  double mu = 1.0;     // per-kind smoothing parameter
  int batch = 1;       // estimates averaged per step
  int iterations = 1;  // T
  double eta = 1.0;
  bool store_iterates = true;

  void validate() const;
};

/// Same descent loop with one of the comparison estimators. Provided for
/// equal-budget harness comparisons only; no schedule theory attached.
RunTrace run_estimator_sgd(const EstimatorSGDConfig& cfg,
                           StochasticOracle& oracle, RandomSource& rng);

}  // namespace zodd
