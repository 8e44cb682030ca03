#include "zodd/smoothing.hpp"

#include <cmath>
#include <stdexcept>

namespace zodd {

void SmoothingParams::validate() const {
  if (!(delta > 0)) throw std::invalid_argument("smoothing radius must be > 0");
  if (mc_samples < 1) throw std::invalid_argument("mc_samples must be >= 1");
}

Vec sample_sphere(int d, RandomSource& rng) {
  if (d < 1) throw std::invalid_argument("sphere dimension must be >= 1");
  Vec u(static_cast<std::size_t>(d));
  for (;;) {
    for (double& c : u) c = rng.normal();
    const double n = norm(u);
    if (n > 0) {
      for (double& c : u) c /= n;
      return u;
    }
  }
}

Vec sample_ball(int d, RandomSource& rng) {
  Vec u = sample_sphere(d, rng);
  const double r = std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
  for (double& c : u) c *= r;
  return u;
}

namespace {

double checked(double v) {
  if (!std::isfinite(v))
    throw std::runtime_error("non-finite objective value in smoothing estimate");
  return v;
}

}  // namespace

double mc_smoothed_value(const ObjectiveFn& f, const Vec& x,
                         const SmoothingParams& p, RandomSource& rng) {
  p.validate();
  const int d = static_cast<int>(x.size());
  double acc = 0.0;
  Vec point(x.size());
  for (int i = 0; i < p.mc_samples; ++i) {
    const Vec u = sample_ball(d, rng);
    for (std::size_t j = 0; j < x.size(); ++j) point[j] = x[j] + p.delta * u[j];
    acc += checked(f(point));
  }
  return acc / p.mc_samples;
}

std::pair<double, double> mc_smoothed_value_crn(const ObjectiveFn& f,
                                                const Vec& x, const Vec& y,
                                                const SmoothingParams& p,
                                                RandomSource& rng) {
  p.validate();
  const int d = static_cast<int>(x.size());
  double ax = 0.0, ay = 0.0;
  Vec point(x.size());
  for (int i = 0; i < p.mc_samples; ++i) {
    const Vec u = sample_ball(d, rng);
    for (std::size_t j = 0; j < x.size(); ++j) point[j] = x[j] + p.delta * u[j];
    ax += checked(f(point));
    for (std::size_t j = 0; j < y.size(); ++j) point[j] = y[j] + p.delta * u[j];
    ay += checked(f(point));
  }
  return {ax / p.mc_samples, ay / p.mc_samples};
}

Vec mc_smoothed_gradient(const ObjectiveFn& f, const Vec& x,
                         const SmoothingParams& p, RandomSource& rng) {
  p.validate();
  const int d = static_cast<int>(x.size());
  Vec acc = zeros(d);
  Vec point(x.size());
  const double scale = static_cast<double>(d) / p.delta;
  for (int i = 0; i < p.mc_samples; ++i) {
    const Vec u = sample_sphere(d, rng);
    for (std::size_t j = 0; j < x.size(); ++j) point[j] = x[j] + p.delta * u[j];
    axpy(acc, scale * checked(f(point)), u);
  }
  for (double& c : acc) c /= p.mc_samples;
  return acc;
}

std::pair<Vec, Vec> mc_smoothed_gradient_crn(const ObjectiveFn& f,
                                             const Vec& x, const Vec& y,
                                             const SmoothingParams& p,
                                             RandomSource& rng) {
  p.validate();
  const int d = static_cast<int>(x.size());
  Vec ax = zeros(d), ay = zeros(d);
  Vec point(x.size());
  const double scale = static_cast<double>(d) / p.delta;
  for (int i = 0; i < p.mc_samples; ++i) {
    const Vec u = sample_sphere(d, rng);
    for (std::size_t j = 0; j < x.size(); ++j) point[j] = x[j] + p.delta * u[j];
    axpy(ax, scale * checked(f(point)), u);
    for (std::size_t j = 0; j < y.size(); ++j) point[j] = y[j] + p.delta * u[j];
    axpy(ay, scale * checked(f(point)), u);
  }
  for (double& c : ax) c /= p.mc_samples;
  for (double& c : ay) c /= p.mc_samples;
  return {ax, ay};
}

double variance_on_sphere(const std::function<double(const Vec&)>& h, int d,
                          int n_samples, RandomSource& rng) {
  if (n_samples < 2) throw std::invalid_argument("variance needs >= 2 samples");
  // Welford, unbiased (n-1) normalization.
  double mean = 0.0, m2 = 0.0;
  for (int i = 1; i <= n_samples; ++i) {
    const double v = h(sample_sphere(d, rng));
    const double delta = v - mean;
    mean += delta / i;
    m2 += delta * (v - mean);
  }
  return m2 / (n_samples - 1);
}

}  // namespace zodd
