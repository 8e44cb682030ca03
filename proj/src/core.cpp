#include "zodd/core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace zodd {

Vec zeros(int d) { return Vec(static_cast<std::size_t>(d), 0.0); }

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

double distance(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Vec scaled(const Vec& v, double a) {
  Vec out = v;
  for (double& x : out) x *= a;
  return out;
}

Vec add(const Vec& a, const Vec& b) {
  Vec out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Vec sub(const Vec& a, const Vec& b) {
  Vec out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

void axpy(Vec& y, double a, const Vec& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

bool all_finite(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double RandomSource::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // 1 - u1 lies in (0,1], keeping the log argument strictly positive.
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log1p(-u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

std::uint64_t RandomSource::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("RandomSource::below: n must be >= 1");
  const auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return k < n ? k : n - 1;
}

RandomSource make_rng(std::uint64_t seed) { return RandomSource(seed); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined state
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

StochasticOracle::StochasticOracle(int dimension, OracleFn law)
    : dimension_(dimension), law_(std::move(law)) {
  if (dimension_ < 1) throw std::invalid_argument("oracle dimension must be >= 1");
  if (!law_) throw std::invalid_argument("oracle law must be callable");
}

double StochasticOracle::sample(const Vec& x, RandomSource& rng) {
  counter_.increment();
  return law_(x, rng);
}

double StochasticOracle::evaluate(const Vec& x, RandomSource& rng) const {
  return law_(x, rng);
}

StochasticOracle noisy_value_oracle(ObjectiveFn f, double sigma, int dimension) {
  if (sigma < 0) throw std::invalid_argument("noise level must be >= 0");
  return StochasticOracle(
      dimension, [f = std::move(f), sigma](const Vec& x, RandomSource& rng) {
        const double base = f(x);
        return sigma == 0.0 ? base : base + sigma * rng.normal();
      });
}

void ProblemSpec::validate() const {
  if (dimension < 1) throw std::invalid_argument("ProblemSpec: dimension must be >= 1");
  if (!(lipschitz > 0)) throw std::invalid_argument("ProblemSpec: L must be > 0");
  if (!(noise_bound >= 0)) throw std::invalid_argument("ProblemSpec: sigma must be >= 0");
  if (!(gap >= 0)) throw std::invalid_argument("ProblemSpec: gap must be >= 0");
  if (grad_lipschitz && !(*grad_lipschitz > 0))
    throw std::invalid_argument("ProblemSpec: L_g must be > 0 when present");
  if (hess_lipschitz && !(*hess_lipschitz > 0))
    throw std::invalid_argument("ProblemSpec: L_H must be > 0 when present");
  if (!(smoothing_constant > 0))
    throw std::invalid_argument("ProblemSpec: smoothing constant must be > 0");
}

}  // namespace zodd
