#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "zodd/core.hpp"

// Test environments: a catalog of deterministic functions with known
// constants, a strategic-classification environment whose data distribution
// reacts to the classifier, and a multi-product pricing simulator with
// price-dependent multinomial demand.

namespace zodd {

/// Deterministic objective with its advertised constants. The Lipschitz
/// constant is valid on the centered ball of validation_radius, which is
/// where the random-pair validation samples.
struct TestFunction {
  std::string name;
  int dimension = 1;
  ObjectiveFn f;
  double lipschitz = 1.0;
  double validation_radius = 5.0;
  std::optional<double> grad_lipschitz;
  std::optional<double> hess_lipschitz;
  std::optional<double> f_min;  // known infimum (absent: unbounded/unknown)
  // Exact smoothed gradient at (x, delta) when known in closed form.
  std::function<Vec(const Vec&, double)> exact_smoothed_gradient;
};

enum class TestKind { linear, norm, quadratic, abs_sum, performative_quadratic };

struct SyntheticOptions {
  double sigma = 0.0;  // oracle noise level
  Vec coeffs;          // linear: the coefficient vector (default seeded)
  Vec center;          // norm / quadratic / abs_sum shift (default origin)
  Vec theta;           // performative quadratic: mean shift base
  double perf_eps = 0.25;  // performative quadratic: decision sensitivity
};

struct SyntheticInstance {
  TestFunction fn;
  StochasticOracle oracle;
  ProblemSpec spec;
};

/// Builds a catalog function plus a matching unbiased value oracle. For the
/// performative quadratic the oracle samples xi ~ N(theta + eps x, sigma^2 I)
/// and returns xi . x, so the sampling law itself moves with the decision;
/// its expectation (theta + eps x) . x has stationary point -theta / (2 eps).
SyntheticInstance synthetic_instance(TestKind kind, int d, std::uint64_t seed,
                                     const SyntheticOptions& opts = {});

TestKind parse_test_kind(const std::string& name);

// --- strategic classification ---

struct StrategicRecord {
  Vec features;  // 11 mutable features (standardized)
  int label = 1; // +1 or -1
};

struct StrategicInstance {
  std::vector<StrategicRecord> records;
  double reward = 2.0;  // approval reward tau
  Vec feature_mean;     // standardization stats of the raw training data
  Vec feature_std;

  static constexpr int kFeatures = 11;
  int dimension() const { return kFeatures + 1; }  // classifier + intercept
};

/// Best response of an agent with true features w to classifier x=(x_feat,b):
/// an already approved agent stays; otherwise it moves to the projection
/// onto the decision boundary iff the squared movement cost is within the
/// approval reward.
Vec strategic_response(const Vec& x, const Vec& w_true, double reward);

/// Post-response hinge loss of one record under classifier x.
double strategic_record_loss(const StrategicInstance& inst,
                             const StrategicRecord& rec, const Vec& x);

/// Exact population objective: mean post-response hinge loss over records.
double strategic_population_loss(const StrategicInstance& inst, const Vec& x);

/// One query samples a uniform record and returns its post-response loss.
StochasticOracle strategic_oracle(std::shared_ptr<const StrategicInstance> inst);

/// Synthetic instance: Gaussian features, labels from a noisy linear
/// teacher, then standardized to zero mean / unit std per feature.
StrategicInstance make_synthetic_strategic(int n_records, std::uint64_t seed,
                                           double reward = 2.0);

/// Columnar text format: header "f1,...,f11,label", one record per row.
/// Features are standardized on load with the file's own statistics.
StrategicInstance load_strategic_instance(const std::string& path,
                                          double reward = 2.0);

// --- multi-product pricing ---

struct PricingInstance {
  Vec theta;   // reference prices in [0.1, 0.9]
  Vec gamma;   // price sensitivities 2 pi / (sqrt 6 theta_i)
  Vec unit_cost;  // w_i = rho_i theta_i
  int buyers = 120;
  double outside_weight = 0.0;  // a_0 = 0.1 n
  double low_threshold = 0.0;   // l_i = 0.5 m / n
  double high_threshold = 0.0;  // u_i = 1.5 m / n

  int n_products() const { return static_cast<int>(theta.size()); }
};

/// Instance with the stated demand/cost structure; rho_i ~ Unif[0.25, 0.5]
/// drawn once from the seed.
PricingInstance make_pricing_instance(Vec theta, std::uint64_t seed,
                                      int buyers = 120);

/// Synthetic reference prices theta_i ~ Unif[0.1, 0.9].
PricingInstance make_synthetic_pricing(int n_products, std::uint64_t seed,
                                       int buyers = 120);

/// Columnar text format: header "theta" (values used as-is, must lie in
/// [0.1, 0.9]) or "price" (raw values, min-max normalized into [0.1, 0.9]);
/// one value per row.
PricingInstance load_pricing_instance(const std::string& path,
                                      std::uint64_t seed, int buyers = 120);

/// Choice probabilities at price vector x: index 0 is the no-purchase
/// option, 1..n the products. Log-sum-exp guarded; sums to one.
Vec mnl_choice_probs(const Vec& x, const PricingInstance& inst);

/// Three-piece production cost for `units` of product i.
double pricing_cost(const PricingInstance& inst, int product, int units);

/// One query draws the buyers' multinomial choices at x and returns the
/// negative profit -sum x_i xi_i + sum c_i(xi_i).
StochasticOracle pricing_oracle(std::shared_ptr<const PricingInstance> inst);

/// Exact expected negative profit via the per-product binomial marginals.
double pricing_exact_objective(const PricingInstance& inst, const Vec& x);

// --- harness bundle ---

/// What the experiment runner needs to run one problem: an oracle factory
/// (each run owns its oracle), optional exact objective for reporting, and
/// the ground-truth objective when certificates make sense.
struct ProblemInstance {
  std::string label;
  int dimension = 1;
  std::function<StochasticOracle()> make_oracle;
  ObjectiveFn exact_objective;  // null: report Monte-Carlo estimates instead
  ObjectiveFn ground_truth_f;   // null: no certificates
  std::optional<double> f_min;  // known infimum, for gap derivation
  ProblemSpec spec;
  bool lipschitz_estimated = false;
};

/// Empirical Lipschitz estimate over random pairs in the centered ball;
/// used where no constant is advertised (flagged as estimated).
double estimate_lipschitz(const ObjectiveFn& f, int d, double radius,
                          int n_pairs, RandomSource& rng);

}  // namespace zodd
