#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "zodd/experiment.hpp"

// Batch experiment runner. `run` executes every seed of a config and writes
// per-seed traces plus summary.csv; `validate` checks a config and prints
// the resolved plan; `summarize` rebuilds summary.csv from existing traces.

namespace {

void print_plan(const zodd::ExperimentPlan& plan) {
  std::cout << "problem:  " << plan.problem.label << " (d=" << plan.problem.dimension
            << ")\n";
  std::cout << "method:   " << plan.config.method << '\n';
  switch (plan.variant) {
    case zodd::ExperimentPlan::Variant::o2nc:
      std::cout << "params:   delta=" << plan.o2nc.delta
                << " M=" << plan.o2nc.block_len << " K=" << plan.o2nc.n_blocks
                << " eta=" << plan.o2nc.eta
                << " D=" << plan.o2nc.inner_radius() << '\n';
      break;
    case zodd::ExperimentPlan::Variant::sgd:
      std::cout << "params:   delta=" << plan.sgd.delta << " B=" << plan.sgd.batch
                << " T=" << plan.sgd.iterations << " eta=" << plan.sgd.eta
                << '\n';
      break;
    case zodd::ExperimentPlan::Variant::estimator_sgd:
      std::cout << "params:   kind=" << to_string(plan.estimator_sgd.kind)
                << " mu=" << plan.estimator_sgd.mu
                << " batch=" << plan.estimator_sgd.batch
                << " T=" << plan.estimator_sgd.iterations
                << " eta=" << plan.estimator_sgd.eta << '\n';
      break;
  }
  std::cout << "queries:  " << plan.predicted_queries;
  if (plan.schedule_clamped)
    std::cout << " (clamped from " << plan.schedule_unclamped_queries << ")";
  std::cout << '\n';
  std::cout << "seeds:    " << plan.config.seeds.size() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zeroth-order optimization benchmark runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string dir;

  CLI::App* run = app.add_subcommand("run", "execute a run configuration");
  run->add_option("config", config_path, "path to the config file")->required();

  CLI::App* validate =
      app.add_subcommand("validate", "check a config and print the plan");
  validate->add_option("config", config_path, "path to the config file")
      ->required();

  CLI::App* summarize =
      app.add_subcommand("summarize", "rebuild summary.csv from traces");
  summarize->add_option("dir", dir, "output directory with per-seed CSVs")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const zodd::RunConfig cfg = zodd::parse_run_config(config_path);
      const zodd::ExperimentResult result = zodd::run_experiment(cfg);
      std::cout << "summary: " << result.summary_path << '\n';
      if (result.failures > 0) {
        std::cerr << result.failures << " seed(s) failed\n";
        return 2;
      }
      return 0;
    }
    if (validate->parsed()) {
      const zodd::RunConfig cfg = zodd::parse_run_config(config_path);
      print_plan(zodd::build_plan(cfg));
      std::cout << "config ok\n";
      return 0;
    }
    if (summarize->parsed()) {
      std::cout << "summary: " << zodd::summarize_directory(dir) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
