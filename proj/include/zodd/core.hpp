#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

// Core types shared by every optimizer in this library: decision vectors,
// the decision-dependent stochastic value oracle, seeded randomness, and
// query accounting.

namespace zodd {

using Vec = std::vector<double>;

Vec zeros(int d);
double dot(const Vec& a, const Vec& b);
double norm(const Vec& v);
double distance(const Vec& a, const Vec& b);
Vec scaled(const Vec& v, double a);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
// y += a * x
void axpy(Vec& y, double a, const Vec& x);
bool all_finite(const Vec& v);

/// Seedable stream of uniform [0,1) and standard normal draws.
///
/// The uniform stream is mt19937_64 (fully specified by the standard), and
/// normals are produced by Box-Muller on top of it, so a seed pins the whole
/// draw sequence independent of the platform's normal_distribution.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0,1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the second draw of each pair is cached.
  double normal();

  /// Uniform integer in {0, ..., n-1}. n must be >= 1.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

RandomSource make_rng(std::uint64_t seed);

/// Mixes (seed, stream) into a fresh seed for auxiliary draw streams
/// (evaluation sampling, certificates) that must not disturb the run stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Count of stochastic-oracle calls; the complexity currency of every
/// algorithm here. Monotone, incremented exactly once per sample().
class QueryCounter {
 public:
  std::uint64_t total() const { return total_; }
  void increment() { ++total_; }
  void reset() { total_ = 0; }

 private:
  std::uint64_t total_ = 0;
};

using ObjectiveFn = std::function<double(const Vec&)>;
using OracleFn = std::function<double(const Vec&, RandomSource&)>;

/// Stochastic zeroth-order oracle with a decision-dependent sampling law:
/// one call returns a single noisy value F(x; xi) with xi drawn at x.
///
/// sample() is the metered interface used by optimizers. evaluate() draws
/// from the same law without touching the counter and exists only for
/// reporting (objective estimates at checkpoints are not optimization
/// queries).
class StochasticOracle {
 public:
  StochasticOracle(int dimension, OracleFn law);

  double sample(const Vec& x, RandomSource& rng);
  double evaluate(const Vec& x, RandomSource& rng) const;

  int dimension() const { return dimension_; }
  std::uint64_t queries() const { return counter_.total(); }
  void reset_queries() { counter_.reset(); }

 private:
  int dimension_;
  OracleFn law_;
  QueryCounter counter_;
};

/// Unbiased oracle for a deterministic objective: f(x) + sigma * z with z
/// standard normal, so the variance bound holds with equality at sigma^2.
StochasticOracle noisy_value_oracle(ObjectiveFn f, double sigma, int dimension);

/// Problem constants consumed by the parameter schedules. These are inputs,
/// not estimates: the schedules assume they are known.
struct ProblemSpec {
  int dimension = 1;
  double lipschitz = 1.0;      // L
  double noise_bound = 0.0;    // sigma
  double gap = 0.0;            // gamma = f(x0) - f*
  std::optional<double> grad_lipschitz;  // L_g
  std::optional<double> hess_lipschitz;  // L_H
  double smoothing_constant = 1.0;       // c in the smoothness bound of the surrogate

  void validate() const;
};

}  // namespace zodd
