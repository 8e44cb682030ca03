#include "zodd/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "zodd/smoothing.hpp"

namespace zodd {

namespace {

constexpr double kPi = 3.141592653589793;

Vec seeded_unit_coeffs(int d, std::uint64_t seed) {
  RandomSource rng(derive_seed(seed, 101));
  Vec a = sample_sphere(d, rng);
  for (double& c : a) c *= 2.0;  // keep the scale away from degenerate tiny L
  return a;
}

}  // namespace

SyntheticInstance synthetic_instance(TestKind kind, int d, std::uint64_t seed,
                                     const SyntheticOptions& opts) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (opts.sigma < 0) throw std::invalid_argument("sigma must be >= 0");

  TestFunction fn;
  fn.dimension = d;
  const Vec center = opts.center.empty() ? zeros(d) : opts.center;
  if (static_cast<int>(center.size()) != d)
    throw std::invalid_argument("center dimension mismatch");

  switch (kind) {
    case TestKind::linear: {
      const Vec a = opts.coeffs.empty() ? seeded_unit_coeffs(d, seed) : opts.coeffs;
      if (static_cast<int>(a.size()) != d)
        throw std::invalid_argument("coefficient dimension mismatch");
      fn.name = "linear";
      fn.f = [a](const Vec& x) { return dot(a, x); };
      fn.lipschitz = norm(a);
      fn.grad_lipschitz = 1e-12;  // gradient is constant
      fn.exact_smoothed_gradient = [a](const Vec&, double) { return a; };
      break;
    }
    case TestKind::norm: {
      fn.name = "norm";
      fn.f = [center](const Vec& x) { return distance(x, center); };
      fn.lipschitz = 1.0;
      fn.f_min = 0.0;
      break;
    }
    case TestKind::quadratic: {
      fn.name = "quadratic";
      fn.f = [center](const Vec& x) {
        const double r = distance(x, center);
        return r * r;
      };
      // L over the validation ball; the gradient is 2(x - c).
      fn.lipschitz = 2.0 * (fn.validation_radius + norm(center));
      fn.grad_lipschitz = 2.0;
      fn.hess_lipschitz = 1e-12;  // constant Hessian
      fn.f_min = 0.0;
      fn.exact_smoothed_gradient = [center](const Vec& x, double) {
        return scaled(sub(x, center), 2.0);
      };
      break;
    }
    case TestKind::abs_sum: {
      fn.name = "abs_sum";
      fn.f = [center](const Vec& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - center[i]);
        return s;
      };
      fn.lipschitz = std::sqrt(static_cast<double>(d));
      fn.f_min = 0.0;
      break;
    }
    case TestKind::performative_quadratic: {
      const Vec theta = opts.theta.empty() ? seeded_unit_coeffs(d, seed) : opts.theta;
      if (static_cast<int>(theta.size()) != d)
        throw std::invalid_argument("theta dimension mismatch");
      const double eps = opts.perf_eps;
      if (!(eps > 0)) throw std::invalid_argument("perf_eps must be > 0");
      fn.name = "performative_quadratic";
      fn.f = [theta, eps](const Vec& x) {
        return dot(theta, x) + eps * dot(x, x);
      };
      fn.lipschitz = norm(theta) + 2.0 * eps * fn.validation_radius;
      fn.grad_lipschitz = 2.0 * eps;
      fn.hess_lipschitz = 1e-12;
      fn.f_min = -dot(theta, theta) / (4.0 * eps);  // at -theta / (2 eps)
      fn.exact_smoothed_gradient = [theta, eps](const Vec& x, double) {
        Vec g = theta;
        axpy(g, 2.0 * eps, x);
        return g;
      };
      break;
    }
  }

  ProblemSpec spec;
  spec.dimension = d;
  spec.lipschitz = fn.lipschitz;
  spec.noise_bound = opts.sigma;
  spec.gap = fn.f_min ? std::max(fn.f(zeros(d)) - *fn.f_min, 0.0) : 0.0;
  spec.grad_lipschitz = fn.grad_lipschitz;
  spec.hess_lipschitz = fn.hess_lipschitz;

  if (kind == TestKind::performative_quadratic) {
    // Decision-dependent sampler: xi ~ N(theta + eps x, sigma^2 I), F = xi.x.
    const Vec theta = opts.theta.empty() ? seeded_unit_coeffs(d, seed) : opts.theta;
    const double eps = opts.perf_eps;
    const double sigma = opts.sigma;
    StochasticOracle oracle(
        d, [theta, eps, sigma](const Vec& x, RandomSource& rng) {
          double value = 0.0;
          for (std::size_t i = 0; i < x.size(); ++i) {
            const double mean = theta[i] + eps * x[i];
            const double xi = sigma == 0.0 ? mean : mean + sigma * rng.normal();
            value += xi * x[i];
          }
          return value;
        });
    return SyntheticInstance{std::move(fn), std::move(oracle), spec};
  }

  StochasticOracle oracle = noisy_value_oracle(fn.f, opts.sigma, d);
  return SyntheticInstance{std::move(fn), std::move(oracle), spec};
}

TestKind parse_test_kind(const std::string& name) {
  if (name == "linear") return TestKind::linear;
  if (name == "norm") return TestKind::norm;
  if (name == "quadratic") return TestKind::quadratic;
  if (name == "abs_sum") return TestKind::abs_sum;
  if (name == "performative_quadratic") return TestKind::performative_quadratic;
  throw std::invalid_argument("unknown test function kind: " + name);
}

// --- strategic classification ---

Vec strategic_response(const Vec& x, const Vec& w_true, double reward) {
  const int n = StrategicInstance::kFeatures;
  if (static_cast<int>(x.size()) != n + 1 ||
      static_cast<int>(w_true.size()) != n)
    throw std::invalid_argument("strategic_response: dimension mismatch");

  double s = x[n];  // intercept
  double feat_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    s += x[i] * w_true[i];
    feat_sq += x[i] * x[i];
  }
  if (s >= 0 || feat_sq == 0.0) return w_true;
  // Projection onto the decision boundary; move only if it pays off.
  const double cost = s * s / feat_sq;
  if (cost > reward) return w_true;
  Vec moved = w_true;
  const double scale = s / feat_sq;
  for (int i = 0; i < n; ++i) moved[i] -= scale * x[i];
  return moved;
}

double strategic_record_loss(const StrategicInstance& inst,
                             const StrategicRecord& rec, const Vec& x) {
  const int n = StrategicInstance::kFeatures;
  const Vec responded = strategic_response(x, rec.features, inst.reward);
  double score = x[n];
  for (int i = 0; i < n; ++i) score += x[i] * responded[i];
  return std::max(0.0, 1.0 - rec.label * score);
}

double strategic_population_loss(const StrategicInstance& inst, const Vec& x) {
  if (inst.records.empty())
    throw std::invalid_argument("strategic instance has no records");
  double acc = 0.0;
  for (const StrategicRecord& rec : inst.records)
    acc += strategic_record_loss(inst, rec, x);
  return acc / static_cast<double>(inst.records.size());
}

StochasticOracle strategic_oracle(
    std::shared_ptr<const StrategicInstance> inst) {
  if (!inst || inst->records.empty())
    throw std::invalid_argument("strategic instance has no records");
  const int d = inst->dimension();
  return StochasticOracle(d, [inst](const Vec& x, RandomSource& rng) {
    const auto idx = rng.below(inst->records.size());
    return strategic_record_loss(*inst, inst->records[idx], x);
  });
}

namespace {

void standardize_features(StrategicInstance& inst) {
  const int n = StrategicInstance::kFeatures;
  const double count = static_cast<double>(inst.records.size());
  inst.feature_mean = zeros(n);
  inst.feature_std = zeros(n);
  for (const StrategicRecord& rec : inst.records)
    axpy(inst.feature_mean, 1.0 / count, rec.features);
  for (const StrategicRecord& rec : inst.records)
    for (int i = 0; i < n; ++i) {
      const double dev = rec.features[i] - inst.feature_mean[i];
      inst.feature_std[i] += dev * dev / count;
    }
  for (int i = 0; i < n; ++i)
    inst.feature_std[i] = std::max(std::sqrt(inst.feature_std[i]), 1e-12);
  for (StrategicRecord& rec : inst.records)
    for (int i = 0; i < n; ++i)
      rec.features[i] = (rec.features[i] - inst.feature_mean[i]) / inst.feature_std[i];
}

}  // namespace

StrategicInstance make_synthetic_strategic(int n_records, std::uint64_t seed,
                                           double reward) {
  if (n_records < 2) throw std::invalid_argument("need at least two records");
  if (!(reward > 0)) throw std::invalid_argument("reward must be > 0");
  const int n = StrategicInstance::kFeatures;
  RandomSource rng(derive_seed(seed, 202));

  StrategicInstance inst;
  inst.reward = reward;
  inst.records.reserve(static_cast<std::size_t>(n_records));

  const Vec teacher = sample_sphere(n, rng);
  const double teacher_bias = 0.2 * rng.normal();
  for (int r = 0; r < n_records; ++r) {
    StrategicRecord rec;
    rec.features.resize(n);
    for (double& v : rec.features) v = rng.normal();
    const double margin =
        dot(teacher, rec.features) + teacher_bias + 0.3 * rng.normal();
    rec.label = margin >= 0 ? 1 : -1;
    inst.records.push_back(std::move(rec));
  }
  // Guarantee both classes are present.
  inst.records.front().label = 1;
  inst.records.back().label = -1;

  standardize_features(inst);
  return inst;
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_number(const std::string& cell, const std::string& path, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ":" + std::to_string(line) +
                             ": not a finite number: '" + cell + "'");
  }
}

}  // namespace

StrategicInstance load_strategic_instance(const std::string& path,
                                          double reward) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  const int n = StrategicInstance::kFeatures;

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ":1: empty instance file");
  const auto header = split_csv_row(line);
  if (static_cast<int>(header.size()) != n + 1 || header.back() != "label")
    throw std::runtime_error(path + ":1: expected header f1,...,f11,label");

  StrategicInstance inst;
  inst.reward = reward;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_row(line);
    if (static_cast<int>(cells.size()) != n + 1)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected " + std::to_string(n + 1) +
                               " columns, got " + std::to_string(cells.size()));
    StrategicRecord rec;
    rec.features.resize(n);
    for (int i = 0; i < n; ++i)
      rec.features[i] = parse_number(cells[i], path, line_no);
    const double label = parse_number(cells[n], path, line_no);
    if (label != 1.0 && label != -1.0)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": label must be +1 or -1");
    rec.label = static_cast<int>(label);
    inst.records.push_back(std::move(rec));
  }
  if (inst.records.size() < 2)
    throw std::runtime_error(path + ": need at least two records");

  standardize_features(inst);
  return inst;
}

// --- multi-product pricing ---

PricingInstance make_pricing_instance(Vec theta, std::uint64_t seed,
                                      int buyers) {
  const int n = static_cast<int>(theta.size());
  if (n < 1) throw std::invalid_argument("need at least one product");
  if (buyers < 1) throw std::invalid_argument("need at least one buyer");
  for (double t : theta)
    if (!(t >= 0.1 && t <= 0.9))
      throw std::invalid_argument("reference prices must lie in [0.1, 0.9]");

  PricingInstance inst;
  inst.theta = std::move(theta);
  inst.buyers = buyers;
  inst.outside_weight = 0.1 * n;
  inst.low_threshold = 0.5 * buyers / n;
  inst.high_threshold = 1.5 * buyers / n;
  inst.gamma.resize(n);
  inst.unit_cost.resize(n);
  RandomSource rng(derive_seed(seed, 303));
  for (int i = 0; i < n; ++i) {
    inst.gamma[i] = 2.0 * kPi / (std::sqrt(6.0) * inst.theta[i]);
    const double rho = 0.25 + 0.25 * rng.uniform();
    inst.unit_cost[i] = rho * inst.theta[i];
  }
  return inst;
}

PricingInstance make_synthetic_pricing(int n_products, std::uint64_t seed,
                                       int buyers) {
  if (n_products < 1) throw std::invalid_argument("need at least one product");
  RandomSource rng(derive_seed(seed, 304));
  Vec theta(static_cast<std::size_t>(n_products));
  for (double& t : theta) t = 0.1 + 0.8 * rng.uniform();
  return make_pricing_instance(std::move(theta), seed, buyers);
}

PricingInstance load_pricing_instance(const std::string& path,
                                      std::uint64_t seed, int buyers) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ":1: empty instance file");
  const bool normalize = line == "price";
  if (!normalize && line != "theta")
    throw std::runtime_error(path + ":1: expected header 'theta' or 'price'");

  Vec values;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    values.push_back(parse_number(line, path, line_no));
  }
  if (values.empty()) throw std::runtime_error(path + ": no price rows");

  if (normalize) {
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    const double span = hi > lo ? hi - lo : 1.0;
    for (double& v : values) v = 0.1 + 0.8 * (v - lo) / span;
  }
  return make_pricing_instance(std::move(values), seed, buyers);
}

Vec mnl_choice_probs(const Vec& x, const PricingInstance& inst) {
  const int n = inst.n_products();
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("price vector dimension mismatch");
  if (!all_finite(x)) throw std::invalid_argument("price vector must be finite");

  // Shift by the max exponent so the normalization never overflows; the
  // outside option carries exponent log(a_0).
  Vec expo(static_cast<std::size_t>(n) + 1);
  expo[0] = std::log(inst.outside_weight);
  for (int i = 0; i < n; ++i)
    expo[static_cast<std::size_t>(i) + 1] = inst.gamma[i] * (inst.theta[i] - x[i]);
  const double shift = *std::max_element(expo.begin(), expo.end());

  Vec probs(expo.size());
  double total = 0.0;
  for (std::size_t i = 0; i < expo.size(); ++i) {
    probs[i] = std::exp(expo[i] - shift);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

double pricing_cost(const PricingInstance& inst, int product, int units) {
  if (product < 0 || product >= inst.n_products())
    throw std::invalid_argument("product index out of range");
  if (units < 0) throw std::invalid_argument("units must be >= 0");
  const double w = inst.unit_cost[product];
  const double l = inst.low_threshold;
  const double u = inst.high_threshold;
  const double z = units;
  if (z <= l) return 2.0 * w * z;
  if (z <= u) return w * (z - l) + 2.0 * w * l;
  return 3.0 * w * (z - u) + w * (u - l) + 2.0 * w * l;
}

StochasticOracle pricing_oracle(std::shared_ptr<const PricingInstance> inst) {
  if (!inst) throw std::invalid_argument("null pricing instance");
  const int d = inst->n_products();
  return StochasticOracle(d, [inst](const Vec& x, RandomSource& rng) {
    const Vec probs = mnl_choice_probs(x, *inst);
    std::vector<int> demand(static_cast<std::size_t>(inst->n_products()), 0);
    for (int b = 0; b < inst->buyers; ++b) {
      double v = rng.uniform();
      std::size_t choice = 0;
      for (; choice + 1 < probs.size(); ++choice) {
        if (v < probs[choice]) break;
        v -= probs[choice];
      }
      if (choice > 0) ++demand[choice - 1];
    }
    double value = 0.0;
    for (int i = 0; i < inst->n_products(); ++i)
      value += -x[i] * demand[i] + pricing_cost(*inst, i, demand[i]);
    return value;
  });
}

double pricing_exact_objective(const PricingInstance& inst, const Vec& x) {
  const Vec probs = mnl_choice_probs(x, inst);
  const int m = inst.buyers;
  double value = 0.0;
  for (int i = 0; i < inst.n_products(); ++i) {
    const double p = probs[static_cast<std::size_t>(i) + 1];
    value += -x[i] * m * p;
    // Demand for product i is Binomial(m, p); walk its pmf directly.
    double pmf = std::exp(m * std::log1p(-p));  // (1-p)^m
    const double ratio = p / (1.0 - p);
    double expected_cost = 0.0;
    for (int z = 0; z <= m; ++z) {
      expected_cost += pricing_cost(inst, i, z) * pmf;
      pmf *= ratio * (m - z) / (z + 1);
    }
    value += expected_cost;
  }
  return value;
}

double estimate_lipschitz(const ObjectiveFn& f, int d, double radius,
                          int n_pairs, RandomSource& rng) {
  if (n_pairs < 1) throw std::invalid_argument("need at least one pair");
  double best = 0.0;
  for (int i = 0; i < n_pairs; ++i) {
    Vec a = sample_ball(d, rng);
    Vec b = sample_ball(d, rng);
    for (double& c : a) c *= radius;
    for (double& c : b) c *= radius;
    const double gap = distance(a, b);
    if (gap < 1e-12) continue;
    best = std::max(best, std::abs(f(a) - f(b)) / gap);
  }
  return best;
}

}  // namespace zodd
