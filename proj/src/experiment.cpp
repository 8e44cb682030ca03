#include "zodd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include "zodd/o2nc.hpp"
#include "zodd/smoothing.hpp"

namespace fs = std::filesystem;

namespace zodd {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

unsigned resolve_worker_count(const std::optional<unsigned>& from_config) {
  if (from_config && *from_config >= 1) return *from_config;
  if (const char* env = std::getenv("ZODD_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return std::min(hw == 0 ? 1u : hw, 4u);
}

// --- config parsing ---

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_at(const std::string& path, int line,
                          const std::string& message) {
  throw ConfigError(path + ":" + std::to_string(line) + ": " + message);
}

double parse_double_field(const std::string& path, int line,
                          const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail_at(path, line, "field '" + key + "': expected a number, got '" + value + "'");
  }
}

std::int64_t parse_int_field(const std::string& path, int line,
                             const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail_at(path, line, "field '" + key + "': expected an integer, got '" + value + "'");
  }
}

bool parse_bool_field(const std::string& path, int line, const std::string& key,
                      const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  fail_at(path, line, "field '" + key + "': expected true/false, got '" + value + "'");
}

Vec parse_vector_field(const std::string& path, int line, const std::string& key,
                       const std::string& value) {
  Vec out;
  std::istringstream in(value);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    cell = trim(cell);
    if (cell.empty()) fail_at(path, line, "field '" + key + "': empty component");
    out.push_back(parse_double_field(path, line, key, cell));
  }
  if (out.empty()) fail_at(path, line, "field '" + key + "': no values");
  return out;
}

// "1,2,3" or "1..10"
std::vector<std::uint64_t> parse_seed_list(const std::string& path, int line,
                                           const std::string& value) {
  std::vector<std::uint64_t> seeds;
  const auto range = value.find("..");
  if (range != std::string::npos) {
    const auto lo = parse_int_field(path, line, "seeds", trim(value.substr(0, range)));
    const auto hi = parse_int_field(path, line, "seeds", trim(value.substr(range + 2)));
    if (lo < 0 || hi < lo) fail_at(path, line, "field 'seeds': bad range");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    return seeds;
  }
  std::istringstream in(value);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    cell = trim(cell);
    if (cell.empty()) continue;
    const auto s = parse_int_field(path, line, "seeds", cell);
    if (s < 0) fail_at(path, line, "field 'seeds': seeds must be >= 0");
    seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (seeds.empty()) fail_at(path, line, "field 'seeds': no seeds given");
  return seeds;
}

}  // namespace

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);

  RunConfig cfg;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail_at(path, line_no, "unterminated section header");
      section = s.substr(1, s.size() - 2);
      if (section != "problem" && section != "method" && section != "params" &&
          section != "schedule" && section != "run")
        fail_at(path, line_no, "unknown section [" + section + "]");
      if (section == "params") cfg.has_params = true;
      if (section == "schedule") cfg.has_schedule = true;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail_at(path, line_no, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail_at(path, line_no, "empty key");
    if (section.empty()) fail_at(path, line_no, "key outside any section");

    if (section == "problem") {
      if (key == "kind") cfg.problem_kind = value;
      else if (key == "dimension") cfg.dimension = static_cast<int>(parse_int_field(path, line_no, key, value));
      else if (key == "instance_seed") cfg.instance_seed = static_cast<std::uint64_t>(parse_int_field(path, line_no, key, value));
      else if (key == "instance_file") cfg.instance_file = value;
      else if (key == "sigma") cfg.sigma = parse_double_field(path, line_no, key, value);
      else if (key == "label") cfg.label = value;
      else if (key == "coeffs") cfg.coeffs = parse_vector_field(path, line_no, key, value);
      else if (key == "center") cfg.center = parse_vector_field(path, line_no, key, value);
      else if (key == "theta") cfg.theta = parse_vector_field(path, line_no, key, value);
      else if (key == "perf_eps") cfg.perf_eps = parse_double_field(path, line_no, key, value);
      else if (key == "n_records") cfg.n_records = static_cast<int>(parse_int_field(path, line_no, key, value));
      else if (key == "tau") cfg.tau = parse_double_field(path, line_no, key, value);
      else if (key == "lipschitz") cfg.lipschitz_override = parse_double_field(path, line_no, key, value);
      else if (key == "gap") cfg.gap_override = parse_double_field(path, line_no, key, value);
      else fail_at(path, line_no, "unknown key '" + key + "' in [problem]");
    } else if (section == "method") {
      if (key == "name") cfg.method = value;
      else fail_at(path, line_no, "unknown key '" + key + "' in [method]");
    } else if (section == "params") {
      if (key == "delta") cfg.p_delta = parse_double_field(path, line_no, key, value);
      else if (key == "eta") cfg.p_eta = parse_double_field(path, line_no, key, value);
      else if (key == "mu") cfg.p_mu = parse_double_field(path, line_no, key, value);
      else if (key == "M") cfg.p_block_len = static_cast<int>(parse_int_field(path, line_no, key, value));
      else if (key == "K") cfg.p_n_blocks = static_cast<int>(parse_int_field(path, line_no, key, value));
      else if (key == "B" || key == "batch") cfg.p_batch = static_cast<int>(parse_int_field(path, line_no, key, value));
      else if (key == "T") cfg.p_iterations = static_cast<int>(parse_int_field(path, line_no, key, value));
      else fail_at(path, line_no, "unknown key '" + key + "' in [params]");
    } else if (section == "schedule") {
      if (key == "epsilon") cfg.s_epsilon = parse_double_field(path, line_no, key, value);
      else if (key == "delta") cfg.s_delta = parse_double_field(path, line_no, key, value);
      else if (key == "mode") cfg.s_mode = value;
      else if (key == "budget") cfg.s_budget = static_cast<std::uint64_t>(parse_int_field(path, line_no, key, value));
      else if (key == "halve_radius") cfg.s_halve_radius = parse_bool_field(path, line_no, key, value);
      else fail_at(path, line_no, "unknown key '" + key + "' in [schedule]");
    } else if (section == "run") {
      if (key == "seeds") cfg.seeds = parse_seed_list(path, line_no, value);
      else if (key == "output_dir") cfg.output_dir = value;
      else if (key == "workers") cfg.workers = static_cast<unsigned>(parse_int_field(path, line_no, key, value));
      else if (key == "checkpoint_every") cfg.checkpoint_every = static_cast<int>(parse_int_field(path, line_no, key, value));
      else if (key == "eval_samples") cfg.eval_samples = static_cast<int>(parse_int_field(path, line_no, key, value));
      else if (key == "checkpoint_eval_samples") cfg.checkpoint_eval_samples = static_cast<int>(parse_int_field(path, line_no, key, value));
      else if (key == "start") cfg.start = parse_vector_field(path, line_no, key, value);
      else if (key == "certificate") cfg.certificate = parse_bool_field(path, line_no, key, value);
      else if (key == "certificate_samples") cfg.certificate_samples = static_cast<int>(parse_int_field(path, line_no, key, value));
      else if (key == "certificate_delta") cfg.certificate_delta = parse_double_field(path, line_no, key, value);
      else fail_at(path, line_no, "unknown key '" + key + "' in [run]");
    }
  }
  return cfg;
}

namespace {

const std::vector<std::string> kMethods = {
    "o2nc_opt1",       "o2nc_opt2",       "sgd_baseline",
    "sgd_coordinate_2pt", "sgd_gaussian_2pt", "sgd_sphere_2pt",
    "sgd_plain_1pt"};

bool is_o2nc_method(const std::string& m) {
  return m == "o2nc_opt1" || m == "o2nc_opt2";
}

bool is_estimator_sgd_method(const std::string& m) {
  return m.rfind("sgd_", 0) == 0 && m != "sgd_baseline";
}

BaselineKind baseline_kind_of(const std::string& m) {
  if (m == "sgd_coordinate_2pt") return BaselineKind::coordinate_2pt;
  if (m == "sgd_gaussian_2pt") return BaselineKind::gaussian_2pt;
  if (m == "sgd_sphere_2pt") return BaselineKind::sphere_2pt;
  if (m == "sgd_plain_1pt") return BaselineKind::plain_1pt;
  throw ConfigError("not an estimator-swapped sgd method: " + m);
}

}  // namespace

void validate_run_config(const RunConfig& cfg) {
  if (cfg.problem_kind.empty()) throw ConfigError("[problem] kind is required");
  if (cfg.method.empty()) throw ConfigError("[method] name is required");
  if (std::find(kMethods.begin(), kMethods.end(), cfg.method) == kMethods.end())
    throw ConfigError("unknown method '" + cfg.method + "'");
  if (cfg.seeds.empty()) throw ConfigError("[run] seeds is required");
  if (cfg.has_params == cfg.has_schedule)
    throw ConfigError("exactly one of [params] and [schedule] must be given");
  if (cfg.has_schedule && is_estimator_sgd_method(cfg.method))
    throw ConfigError("estimator-swapped sgd methods take explicit [params] only");
  if (cfg.eval_samples < 1) throw ConfigError("eval_samples must be >= 1");
  if (cfg.checkpoint_eval_samples < 1)
    throw ConfigError("checkpoint_eval_samples must be >= 1");
  if (cfg.checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  if (cfg.certificate_samples < 1)
    throw ConfigError("certificate_samples must be >= 1");
}

namespace {

StochasticOracle translate_oracle(const StochasticOracle& base, Vec shift) {
  auto base_ptr = std::make_shared<StochasticOracle>(base);
  return StochasticOracle(
      base.dimension(), [base_ptr, shift = std::move(shift)](
                            const Vec& v, RandomSource& rng) {
        return base_ptr->evaluate(add(v, shift), rng);
      });
}

ObjectiveFn translate_objective(ObjectiveFn f, Vec shift) {
  if (!f) return nullptr;
  return [f = std::move(f), shift = std::move(shift)](const Vec& v) {
    return f(add(v, shift));
  };
}

ProblemInstance build_problem(const RunConfig& cfg) {
  ProblemInstance out;
  out.label = cfg.label;

  if (cfg.problem_kind == "strategic") {
    auto inst = std::make_shared<StrategicInstance>(
        cfg.instance_file.empty()
            ? make_synthetic_strategic(cfg.n_records, cfg.instance_seed, cfg.tau)
            : load_strategic_instance(cfg.instance_file, cfg.tau));
    out.dimension = inst->dimension();
    out.make_oracle = [inst] { return strategic_oracle(inst); };
    out.exact_objective = [inst](const Vec& x) {
      return strategic_population_loss(*inst, x);
    };
    out.spec.dimension = out.dimension;
    out.spec.noise_bound = 1.0;  // hinge values are O(1); crude bound
    out.f_min = 0.0;             // hinge loss is nonnegative
    out.lipschitz_estimated = true;
  } else if (cfg.problem_kind == "pricing") {
    auto inst = std::make_shared<PricingInstance>(
        cfg.instance_file.empty()
            ? make_synthetic_pricing(cfg.dimension > 0 ? cfg.dimension : 30,
                                     cfg.instance_seed)
            : load_pricing_instance(cfg.instance_file, cfg.instance_seed));
    out.dimension = inst->n_products();
    out.make_oracle = [inst] { return pricing_oracle(inst); };
    out.spec.dimension = out.dimension;
    out.lipschitz_estimated = true;
    // Value noise scale: multinomial demand fluctuations; a loose constant
    // is enough for schedule construction.
    out.spec.noise_bound = 10.0;
  } else {
    const TestKind kind = parse_test_kind(cfg.problem_kind);
    SyntheticOptions opts;
    opts.sigma = cfg.sigma;
    opts.coeffs = cfg.coeffs;
    opts.center = cfg.center;
    opts.theta = cfg.theta;
    opts.perf_eps = cfg.perf_eps;
    auto inst = std::make_shared<SyntheticInstance>(
        synthetic_instance(kind, cfg.dimension, cfg.instance_seed, opts));
    out.dimension = cfg.dimension;
    out.make_oracle = [inst, kind, dim = cfg.dimension, seed = cfg.instance_seed,
                       opts] {
      // Each run owns a fresh oracle (fresh counter) over the same law.
      return synthetic_instance(kind, dim, seed, opts).oracle;
    };
    out.exact_objective = inst->fn.f;
    out.ground_truth_f = inst->fn.f;
    out.f_min = inst->fn.f_min;
    out.spec = inst->spec;
  }

  if (out.label.empty())
    out.label = cfg.problem_kind + "-" + std::to_string(cfg.instance_seed);
  if (cfg.lipschitz_override) {
    out.spec.lipschitz = *cfg.lipschitz_override;
    out.lipschitz_estimated = false;
  }
  if (cfg.gap_override) out.spec.gap = *cfg.gap_override;
  return out;
}

void apply_start_translation(ProblemInstance& problem, const RunConfig& cfg,
                             Vec& start) {
  start.clear();
  if (cfg.start.empty()) return;
  start = cfg.start;
  if (start.size() == 1 && problem.dimension > 1)
    start.assign(static_cast<std::size_t>(problem.dimension), start[0]);
  if (static_cast<int>(start.size()) != problem.dimension)
    throw ConfigError("start vector dimension mismatch");
  auto base_factory = problem.make_oracle;
  problem.make_oracle = [base_factory, start] {
    return translate_oracle(base_factory(), start);
  };
  problem.exact_objective = translate_objective(problem.exact_objective, start);
  problem.ground_truth_f = translate_objective(problem.ground_truth_f, start);
}

}  // namespace

ExperimentPlan build_plan(const RunConfig& cfg) {
  validate_run_config(cfg);

  ExperimentPlan plan;
  plan.config = cfg;
  plan.problem = build_problem(cfg);

  Vec start;
  apply_start_translation(plan.problem, cfg, start);

  // Fill in estimated constants where the problem offers none and a theorem
  // schedule needs them.
  if (cfg.has_schedule && plan.problem.lipschitz_estimated &&
      !cfg.lipschitz_override) {
    RandomSource rng(derive_seed(cfg.instance_seed, 404));
    auto oracle = plan.problem.make_oracle();
    const int probes = 64;
    ObjectiveFn mean_f = [&](const Vec& x) {
      double acc = 0.0;
      for (int i = 0; i < probes; ++i) acc += oracle.evaluate(x, rng);
      return acc / probes;
    };
    const double radius = norm(start) + 1.0;
    plan.problem.spec.lipschitz =
        std::max(estimate_lipschitz(mean_f, plan.problem.dimension, radius,
                                    2000, rng),
                 1e-6);
    std::cerr << "note: Lipschitz constant estimated empirically as "
              << plan.problem.spec.lipschitz << " for schedule construction\n";
  }
  // Gap for the schedule: objective at the effective start minus the known
  // infimum, unless the config pins it.
  if (cfg.has_schedule && !cfg.gap_override) {
    if (plan.problem.exact_objective && plan.problem.f_min) {
      plan.problem.spec.gap = std::max(
          plan.problem.exact_objective(zeros(plan.problem.dimension)) -
              *plan.problem.f_min,
          0.0);
    } else {
      throw ConfigError(
          "[schedule] on this problem needs an explicit 'gap' value in "
          "[problem]");
    }
  }

  const std::string& m = cfg.method;
  if (is_o2nc_method(m)) {
    plan.variant = ExperimentPlan::Variant::o2nc;
    const O2NCOption option = m == "o2nc_opt1" ? O2NCOption::two_point
                                               : O2NCOption::one_point_residual;
    if (cfg.has_params) {
      plan.o2nc.delta = cfg.p_delta;
      plan.o2nc.block_len = cfg.p_block_len;
      plan.o2nc.n_blocks = cfg.p_n_blocks;
      plan.o2nc.eta = cfg.p_eta;
      plan.o2nc.option = option;
      plan.o2nc.validate();
      plan.predicted_queries =
          option == O2NCOption::two_point
              ? 2ULL * static_cast<std::uint64_t>(plan.o2nc.horizon())
              : static_cast<std::uint64_t>(plan.o2nc.horizon()) + 1;
    } else {
      Schedule sched;
      if (cfg.s_mode == "nonsmooth") {
        if (!(cfg.s_delta > 0))
          throw ConfigError("[schedule] nonsmooth mode needs delta > 0");
        sched = schedule_goldstein(plan.problem.spec, cfg.s_delta, cfg.s_epsilon,
                                   option, cfg.s_halve_radius);
      } else if (cfg.s_mode == "gradient_lipschitz") {
        sched = schedule_smooth(plan.problem.spec, cfg.s_epsilon,
                                SmoothMode::gradient_lipschitz, option);
      } else if (cfg.s_mode == "hessian_lipschitz") {
        sched = schedule_smooth(plan.problem.spec, cfg.s_epsilon,
                                SmoothMode::hessian_lipschitz, option);
      } else {
        throw ConfigError("unknown schedule mode '" + cfg.s_mode + "'");
      }
      if (cfg.s_budget > 0) sched = clamp_budget(sched, cfg.s_budget);
      else if (sched.saturated)
        throw ConfigError("theorem schedule overflows without a budget cap");
      plan.o2nc = sched.to_o2nc_config();
      plan.predicted_queries = sched.predicted_queries;
      plan.schedule_clamped = sched.clamped;
      plan.schedule_unclamped_queries = sched.unclamped_queries;
    }
  } else if (m == "sgd_baseline") {
    plan.variant = ExperimentPlan::Variant::sgd;
    if (cfg.has_params) {
      plan.sgd.delta = cfg.p_delta;
      plan.sgd.batch = cfg.p_batch;
      plan.sgd.iterations = cfg.p_iterations;
      plan.sgd.eta = cfg.p_eta;
      plan.sgd.validate();
      plan.predicted_queries = 2ULL * static_cast<std::uint64_t>(cfg.p_batch) *
                               static_cast<std::uint64_t>(cfg.p_iterations);
    } else {
      if (cfg.s_mode != "nonsmooth")
        throw ConfigError("sgd_baseline schedules take mode = nonsmooth");
      if (!(cfg.s_delta > 0))
        throw ConfigError("[schedule] for sgd_baseline needs delta > 0");
      Schedule sched = schedule_sgd(plan.problem.spec, cfg.s_delta, cfg.s_epsilon);
      if (cfg.s_budget > 0) sched = clamp_budget(sched, cfg.s_budget);
      else if (sched.saturated)
        throw ConfigError("theorem schedule overflows without a budget cap");
      plan.sgd = sched.to_sgd_config();
      plan.predicted_queries = sched.predicted_queries;
      plan.schedule_clamped = sched.clamped;
      plan.schedule_unclamped_queries = sched.unclamped_queries;
    }
  } else {
    plan.variant = ExperimentPlan::Variant::estimator_sgd;
    plan.estimator_sgd.kind = baseline_kind_of(m);
    plan.estimator_sgd.mu = cfg.p_mu;
    plan.estimator_sgd.batch = cfg.p_batch;
    plan.estimator_sgd.iterations = cfg.p_iterations;
    plan.estimator_sgd.eta = cfg.p_eta;
    plan.estimator_sgd.validate();
    const std::uint64_t per_step =
        plan.estimator_sgd.kind == BaselineKind::coordinate_2pt
            ? 2ULL * static_cast<std::uint64_t>(plan.problem.dimension)
        : plan.estimator_sgd.kind == BaselineKind::plain_1pt ? 1ULL
                                                             : 2ULL;
    plan.predicted_queries = per_step *
                             static_cast<std::uint64_t>(cfg.p_batch) *
                             static_cast<std::uint64_t>(cfg.p_iterations);
  }
  return plan;
}

// --- running ---

namespace {

struct CsvRow {
  std::int64_t t = 0;
  std::uint64_t queries = 0;
  double objective = 0.0;
  std::optional<double> step_norm;
  std::optional<double> certificate;
};

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t,queries,objective,step_norm,certificate\n";
  for (const CsvRow& r : rows) {
    out << r.t << ',' << r.queries << ',' << format_double(r.objective) << ',';
    if (r.step_norm) out << format_double(*r.step_norm);
    out << ',';
    if (r.certificate) out << format_double(*r.certificate);
    out << '\n';
  }
}

std::string seed_file_stem(const ExperimentPlan& plan, std::uint64_t seed) {
  return plan.problem.label + "__" + plan.config.method + "__seed" +
         std::to_string(seed);
}

double objective_at(const ExperimentPlan& plan, const StochasticOracle& oracle,
                    const Vec& point, int mc_samples, RandomSource& eval_rng) {
  if (plan.problem.exact_objective) return plan.problem.exact_objective(point);
  double acc = 0.0;
  for (int i = 0; i < mc_samples; ++i) acc += oracle.evaluate(point, eval_rng);
  return acc / mc_samples;
}

SeedOutcome run_one_seed(const ExperimentPlan& plan, std::uint64_t seed) {
  SeedOutcome outcome;
  outcome.seed = seed;
  const RunConfig& cfg = plan.config;

  StochasticOracle oracle = plan.problem.make_oracle();
  RandomSource run_rng = make_rng(seed);
  RandomSource eval_rng = make_rng(derive_seed(seed, 1));

  const int horizon = plan.variant == ExperimentPlan::Variant::o2nc
                          ? plan.o2nc.horizon()
                      : plan.variant == ExperimentPlan::Variant::sgd
                          ? plan.sgd.iterations
                          : plan.estimator_sgd.iterations;
  const int cadence = cfg.checkpoint_every > 0
                          ? cfg.checkpoint_every
                          : std::max(1, (horizon + 199) / 200);

  std::vector<CsvRow> rows;
  CsvRow start_row;
  start_row.t = 0;
  start_row.queries = 0;
  start_row.objective = objective_at(plan, oracle, zeros(plan.problem.dimension),
                                     cfg.eval_samples, eval_rng);
  rows.push_back(start_row);

  RunTrace trace;
  double method_delta = 0.0;
  switch (plan.variant) {
    case ExperimentPlan::Variant::o2nc:
      trace = run_o2nc(plan.o2nc, oracle, run_rng);
      method_delta = plan.o2nc.delta;
      break;
    case ExperimentPlan::Variant::sgd:
      trace = run_sgd(plan.sgd, oracle, run_rng);
      method_delta = plan.sgd.delta;
      break;
    case ExperimentPlan::Variant::estimator_sgd:
      trace = run_estimator_sgd(plan.estimator_sgd, oracle, run_rng);
      method_delta = plan.estimator_sgd.mu;
      break;
  }

  for (const IterRecord& rec : trace.iters) {
    if (rec.t % cadence != 0 || rec.t >= horizon) continue;
    if (rec.x.empty()) continue;
    CsvRow row;
    row.t = rec.t;
    row.queries = rec.queries_after;
    row.objective = objective_at(plan, oracle, rec.x,
                                 cfg.checkpoint_eval_samples, eval_rng);
    row.step_norm = norm(rec.delta);
    rows.push_back(row);
  }

  if (trace.aborted) {
    write_csv((fs::path(cfg.output_dir) /
               (seed_file_stem(plan, seed) + ".csv"))
                  .string(),
              rows);
    outcome.ok = false;
    outcome.error = trace.abort_reason;
    return outcome;
  }

  CsvRow final_row;
  final_row.t = horizon;
  final_row.queries = trace.total_queries;
  final_row.objective =
      objective_at(plan, oracle, trace.output, cfg.eval_samples, eval_rng);
  if (cfg.certificate && plan.problem.ground_truth_f) {
    SmoothingParams cert;
    cert.delta = cfg.certificate_delta > 0 ? cfg.certificate_delta : method_delta;
    cert.mc_samples = cfg.certificate_samples;
    RandomSource cert_rng = make_rng(derive_seed(seed, 2));
    final_row.certificate = goldstein_certificate(
        trace.output_block_points, plan.problem.ground_truth_f, cert, cert_rng);
  }
  rows.push_back(final_row);

  write_csv(
      (fs::path(cfg.output_dir) / (seed_file_stem(plan, seed) + ".csv"))
          .string(),
      rows);
  outcome.ok = true;
  outcome.final_objective = final_row.objective;
  outcome.queries = trace.total_queries;
  return outcome;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg) {
  const ExperimentPlan plan = build_plan(cfg);
  fs::create_directories(cfg.output_dir);

  ExperimentResult result;
  result.outcomes.resize(cfg.seeds.size());

  const unsigned workers = std::min<unsigned>(
      resolve_worker_count(cfg.workers),
      static_cast<unsigned>(cfg.seeds.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg.seeds.size()) return;
      const std::uint64_t seed = cfg.seeds[i];
      try {
        result.outcomes[i] = run_one_seed(plan, seed);
      } catch (const std::exception& e) {
        result.outcomes[i].seed = seed;
        result.outcomes[i].ok = false;
        result.outcomes[i].error = e.what();
      }
      if (!result.outcomes[i].ok) {
        std::ofstream err(fs::path(cfg.output_dir) /
                          (seed_file_stem(plan, seed) + ".error.txt"));
        err << result.outcomes[i].error << '\n';
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }

  for (const SeedOutcome& o : result.outcomes) {
    if (!o.ok) {
      ++result.failures;
      std::cerr << "seed " << o.seed << " failed: " << o.error << '\n';
    }
  }

  result.summary_path = summarize_directory(cfg.output_dir);
  return result;
}

// --- summary ---

namespace {

struct SeedCsv {
  std::string label;
  std::string method;
  std::uint64_t seed = 0;
  double final_objective = 0.0;
  std::uint64_t queries = 0;
};

std::optional<SeedCsv> read_seed_csv(const fs::path& path) {
  const std::string stem = path.stem().string();
  const auto first = stem.find("__");
  if (first == std::string::npos) return std::nullopt;
  const auto second = stem.find("__seed", first + 2);
  if (second == std::string::npos) return std::nullopt;

  SeedCsv out;
  out.label = stem.substr(0, first);
  out.method = stem.substr(first + 2, second - first - 2);
  try {
    out.seed = std::stoull(stem.substr(second + 6));
  } catch (const std::exception&) {
    return std::nullopt;
  }

  fs::path err = path;
  err.replace_extension();
  err += ".error.txt";
  if (fs::exists(err)) return std::nullopt;  // aborted seed, excluded

  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line, last;
  std::getline(in, line);  // header
  if (line != "t,queries,objective,step_norm,certificate") return std::nullopt;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  if (last.empty()) return std::nullopt;

  std::istringstream cells(last);
  std::string cell;
  std::getline(cells, cell, ',');
  std::getline(cells, cell, ',');
  out.queries = std::stoull(cell);
  std::getline(cells, cell, ',');
  out.final_objective = std::stod(cell);
  return out;
}

}  // namespace

std::string summarize_directory(const std::string& dir) {
  std::map<std::pair<std::string, std::string>, std::vector<SeedCsv>> groups;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.extension() != ".csv" || p.filename() == "summary.csv") continue;
    files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& p : files) {
    if (auto parsed = read_seed_csv(p))
      groups[{parsed->method, parsed->label}].push_back(*parsed);
  }

  const fs::path summary_path = fs::path(dir) / "summary.csv";
  std::ofstream out(summary_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + summary_path.string());
  out << "method,week_or_instance,mean,std,queries\n";
  for (auto& [key, seeds] : groups) {
    std::sort(seeds.begin(), seeds.end(),
              [](const SeedCsv& a, const SeedCsv& b) { return a.seed < b.seed; });
    const double n = static_cast<double>(seeds.size());
    double mean = 0.0;
    for (const SeedCsv& s : seeds) mean += s.final_objective / n;
    double var = 0.0;
    if (seeds.size() > 1) {
      for (const SeedCsv& s : seeds) {
        const double d = s.final_objective - mean;
        var += d * d / (n - 1.0);
      }
    }
    const std::uint64_t queries = seeds.front().queries;
    for (const SeedCsv& s : seeds) {
      if (s.queries != queries)
        std::cerr << "warning: query counts differ across seeds for "
                  << key.first << " on " << key.second << '\n';
    }
    out << key.first << ',' << key.second << ',' << format_double(mean) << ','
        << format_double(std::sqrt(var)) << ',' << queries << '\n';
  }
  return summary_path.string();
}

}  // namespace zodd
