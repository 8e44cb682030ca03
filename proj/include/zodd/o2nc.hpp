#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zodd/core.hpp"
#include "zodd/smoothing.hpp"

// Online-to-non-convex conversion on the smoothed surrogate: projected
// online gradient descent over small displacements inside blocks, queried at
// randomized interpolation points, with a block-averaged output.

namespace zodd {

/// Which zeroth-order feedback builds the per-step gradient estimate.
enum class O2NCOption {
  two_point,           // Option I: two fresh queries per iteration
  one_point_residual,  // Option II: one fresh query plus one at initialization
};

struct O2NCConfig {
  double delta = 1.0;  // smoothing radius
  int block_len = 1;   // M
  int n_blocks = 1;    // K
  double eta = 1.0;    // online stepsize
  O2NCOption option = O2NCOption::two_point;
  bool store_iterates = true;  // keep x_t in the trace (y_t is always kept)

  double inner_radius() const { return delta / block_len; }  // D
  int horizon() const { return block_len * n_blocks; }       // T
  void validate() const;
};

struct IterRecord {
  int t = 0;        // 1-based iteration index
  double s = 0.0;   // interpolation draw
  Vec x;            // iterate after the step (empty if not stored)
  Vec y;            // query point
  Vec delta;        // displacement applied at this step
  Vec g;            // gradient estimate
  std::uint64_t queries_after = 0;
};

struct RunTrace {
  std::vector<IterRecord> iters;
  std::vector<Vec> block_avg_y;         // per-block average of y_t
  int k_out = 0;                        // 1-based selected block (0 if aborted)
  Vec output;                           // returned point
  std::vector<Vec> output_block_points; // the y_t of the selected block
  std::uint64_t total_queries = 0;
  bool aborted = false;
  int abort_t = 0;
  std::string abort_reason;
};

/// Projection onto the centered Euclidean ball of the given radius.
Vec project_ball(const Vec& v, double radius);

/// Runs the conversion loop: per block the displacement resets to zero; per
/// iteration a uniform s_t interpolates the query point, the chosen
/// estimator produces g_t, and the displacement takes a projected online
/// gradient step. Returns the trace with the uniformly selected block's
/// average query point as output.
///
/// Query cost is exactly 2*T for the two-point option and T+1 for the
/// one-point residual option (one initialization query before block 1; the
/// carried feedback survives block boundaries).
RunTrace run_o2nc(const O2NCConfig& cfg, StochasticOracle& oracle,
                  RandomSource& rng);

/// Norm of the block-averaged smoothed gradient over the given points, each
/// gradient estimated by Monte-Carlo sphere smoothing of the ground-truth
/// objective. Upper-bounds the distance from zero to the Goldstein
/// subdifferential at the block average (at twice the smoothing radius).
double goldstein_certificate(const std::vector<Vec>& block_points,
                             const ObjectiveFn& f, const SmoothingParams& p,
                             RandomSource& rng);

double goldstein_certificate(const RunTrace& trace, const ObjectiveFn& f,
                             const SmoothingParams& p, RandomSource& rng);

}  // namespace zodd
