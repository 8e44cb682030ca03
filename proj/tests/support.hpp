#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "zodd/core.hpp"

// Shared Monte-Carlo helpers for the test suites. Stochastic assertions use
// bands derived from empirical standard errors (4 sigma unless a criterion
// states otherwise), so flakiness is bounded by construction.

namespace zodd_test {

struct MeanStats {
  double mean = 0.0;
  double se = 0.0;        // standard error of the mean
  double variance = 0.0;  // unbiased sample variance
  double se_variance = 0.0;  // standard error of the sample variance
};

template <typename DrawFn>
MeanStats sample_mean(int n, DrawFn draw) {
  double mean = 0.0, m2 = 0.0, m4_acc = 0.0;
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const double v = draw();
    vals.push_back(v);
    const double d = v - mean;
    mean += d / i;
    m2 += d * (v - mean);
  }
  MeanStats out;
  out.mean = mean;
  out.variance = n > 1 ? m2 / (n - 1) : 0.0;
  out.se = std::sqrt(out.variance / n);
  for (double v : vals) {
    const double d = v - mean;
    m4_acc += d * d * d * d;
  }
  const double m4 = m4_acc / n;
  const double m2n = m2 / n;
  out.se_variance = std::sqrt(std::max(m4 - m2n * m2n, 0.0) / n);
  return out;
}

struct VecMeanStats {
  zodd::Vec mean;
  zodd::Vec se;
};

template <typename DrawFn>
VecMeanStats sample_vec_mean(int d, int n, DrawFn draw) {
  zodd::Vec mean = zodd::zeros(d), m2 = zodd::zeros(d);
  for (int i = 1; i <= n; ++i) {
    const zodd::Vec v = draw();
    for (int j = 0; j < d; ++j) {
      const double delta = v[j] - mean[j];
      mean[j] += delta / i;
      m2[j] += delta * (v[j] - mean[j]);
    }
  }
  VecMeanStats out;
  out.mean = mean;
  out.se = zodd::zeros(d);
  for (int j = 0; j < d; ++j)
    out.se[j] = n > 1 ? std::sqrt(m2[j] / (n - 1) / n) : 0.0;
  return out;
}

// |value - target| <= k * se + extra
inline bool within_band(double value, double target, double se, double k = 4.0,
                        double extra = 0.0) {
  return std::abs(value - target) <= k * se + extra;
}

inline bool vec_within_band(const zodd::Vec& value, const zodd::Vec& target,
                            const zodd::Vec& se, double k = 4.0,
                            double extra = 0.0) {
  for (std::size_t i = 0; i < value.size(); ++i)
    if (!within_band(value[i], target[i], se[i], k, extra)) return false;
  return true;
}

}  // namespace zodd_test
