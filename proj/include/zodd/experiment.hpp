#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zodd/core.hpp"
#include "zodd/problems.hpp"
#include "zodd/schedules.hpp"

// Batch experiment runner: flat key=value config in, per-seed CSV traces and
// a cross-seed summary table out. Methods are compared at equal oracle
// budgets; evaluation sampling never touches the optimization query counter.

namespace zodd {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // [problem]
  std::string problem_kind;
  int dimension = 2;
  std::uint64_t instance_seed = 1;
  std::string instance_file;
  double sigma = 0.0;
  std::string label;  // defaults to "<kind>-<instance_seed>"
  Vec coeffs;         // linear
  Vec center;         // norm / quadratic / abs_sum
  Vec theta;          // performative_quadratic
  double perf_eps = 0.25;
  int n_records = 2000;  // strategic
  double tau = 2.0;      // strategic approval reward
  std::optional<double> lipschitz_override;
  std::optional<double> gap_override;

  // [method]
  std::string method;

  // [params] -- explicit parameters (exclusive with [schedule])
  bool has_params = false;
  double p_delta = 0.0;
  double p_eta = 0.0;
  double p_mu = 0.0;  // estimator-swapped sgd methods
  int p_block_len = 0;
  int p_n_blocks = 0;
  int p_batch = 1;
  int p_iterations = 0;

  // [schedule] -- theorem-driven parameters (exclusive with [params])
  bool has_schedule = false;
  double s_epsilon = 0.0;
  double s_delta = 0.0;  // nonsmooth mode and sgd
  std::string s_mode = "nonsmooth";
  std::uint64_t s_budget = 0;  // 0 = no clamp
  bool s_halve_radius = true;

  // [run]
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "out";
  std::optional<unsigned> workers;
  int checkpoint_every = 0;  // 0 = ceil(T / 200)
  int eval_samples = 1000;            // final objective estimate
  int checkpoint_eval_samples = 200;  // intermediate estimates
  Vec start;  // optional start point; single value broadcasts
  bool certificate = false;
  int certificate_samples = 100000;
  double certificate_delta = 0.0;  // 0 = the method's smoothing radius
};

/// Parses the flat sectioned key=value format. Throws ConfigError with
/// "<path>:<line>:" diagnostics on malformed input.
RunConfig parse_run_config(const std::string& path);

/// Cross-field validation (exactly one parameter route, seeds present,
/// method/problem compatibility). Throws ConfigError.
void validate_run_config(const RunConfig& cfg);

/// Everything resolved and ready to run: the problem bundle plus the
/// concrete algorithm parameters for the chosen method.
struct ExperimentPlan {
  RunConfig config;
  ProblemInstance problem;
  enum class Variant { o2nc, sgd, estimator_sgd } variant;
  O2NCConfig o2nc;
  SGDConfig sgd;
  EstimatorSGDConfig estimator_sgd;
  std::uint64_t predicted_queries = 0;
  bool schedule_clamped = false;
  std::uint64_t schedule_unclamped_queries = 0;
};

ExperimentPlan build_plan(const RunConfig& cfg);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double final_objective = 0.0;
  std::uint64_t queries = 0;
};

struct ExperimentResult {
  std::vector<SeedOutcome> outcomes;  // in seed order
  std::string summary_path;
  int failures = 0;
};

/// Runs every seed (in parallel up to the worker count), writes one CSV per
/// seed named "<label>__<method>__seed<seed>.csv" with fixed header
/// t,queries,objective,step_norm,certificate, then rebuilds summary.csv from
/// the emitted files. Deterministic for a fixed config.
ExperimentResult run_experiment(const RunConfig& cfg);

/// Recomputes summary.csv from the per-seed CSVs in a directory. Returns the
/// summary file path.
std::string summarize_directory(const std::string& dir);

/// Worker count resolution: config override, else the environment variable
/// ZODD_WORKERS, else min(hardware, 4).
unsigned resolve_worker_count(const std::optional<unsigned>& from_config);

/// Shortest round-trip decimal rendering used for all CSV numbers.
std::string format_double(double v);

}  // namespace zodd
