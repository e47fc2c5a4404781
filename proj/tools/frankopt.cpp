// frankopt: run optimizer experiments from the command line.
//
//   frankopt bench --problem lj38 --optimizers frankenstein,cg,sd --seeds 100
//   frankopt overfit --config overfit.yaml --out results/overfit
//   frankopt ablate --preset table5 --seed 7

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <optional>
#include <sstream>

#include "frankopt/cli/config.hpp"
#include "frankopt/cli/experiments.hpp"

namespace {

using namespace frankopt;
using namespace frankopt::cli;

constexpr int kConfigError = 2;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> seeds;
  std::optional<std::size_t> jobs;
  std::optional<std::string> out;
  std::vector<std::string> optimizers;
  std::vector<std::string> lr;
  std::optional<std::uint64_t> max_steps;
  std::optional<double> fmax;
  std::optional<std::string> problem;
  std::optional<std::string> preset;
  std::optional<std::size_t> batch_size;
  bool print_config = false;
};

void add_options(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "YAML config file; flags override its values")->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--seeds", o.seeds, "seeded runs per optimizer");
  sub->add_option("--jobs", o.jobs, "worker threads");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--optimizers,--optimizer", o.optimizers, "comma-separated method tags")->delimiter(',');
  sub->add_option("--lr", o.lr, "base rate for every optimizer, or method=rate pairs")->delimiter(',');
  sub->add_option("--max-steps", o.max_steps, "step budget");
  sub->add_option("--fmax", o.fmax, "stop when the largest per-atom force drops below this");
  sub->add_option("--problem", o.problem, "lj<N> | quadratic | rosenbrock | demo1d | overfit");
  sub->add_option("--preset", o.preset, "ablation variant set");
  sub->add_option("--batch-size", o.batch_size, "minibatch rows (0 = full batch)");
  sub->add_flag("--print-config", o.print_config, "print the resolved config and exit");
}

void apply_overrides(ExperimentConfig& c, const Overrides& o, std::vector<std::string>& problems) {
  if (o.seed) c.seed = *o.seed;
  if (o.seeds) c.seeds = *o.seeds;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.out) c.out = *o.out;
  if (!o.optimizers.empty()) c.optimizers = o.optimizers;
  if (o.max_steps) c.stop.max_steps = *o.max_steps;
  if (o.fmax) c.stop.fmax_threshold = *o.fmax;
  if (o.problem) c.problem = parse_problem_tag(*o.problem, c.problem);
  if (o.preset) c.preset = *o.preset;
  if (o.batch_size) c.problem.batch_size = *o.batch_size;

  for (const auto& item : o.lr) {
    const auto eq = item.find('=');
    const std::string value = eq == std::string::npos ? item : item.substr(eq + 1);
    double rate = 0.0;
    try {
      std::size_t used = 0;
      rate = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      problems.push_back("--lr: '" + item + "' is not a rate");
      continue;
    }
    if (eq == std::string::npos) {
      for (const auto& tag : c.optimizers) {
        if (auto m = parse_method(tag)) c.learning_rates[std::string(to_string(*m))] = rate;
      }
      if (c.experiment == Experiment::ablate) c.learning_rates["frankenstein"] = rate;
    } else if (auto m = parse_method(item.substr(0, eq))) {
      c.learning_rates[std::string(to_string(*m))] = rate;
    } else {
      problems.push_back("--lr: unknown method '" + item.substr(0, eq) + "'");
    }
  }
}

int report_config_error(const std::vector<std::string>& problems) {
  std::cerr << "frankopt: invalid configuration\n";
  for (const auto& p : problems) std::cerr << "  " << p << "\n";
  return kConfigError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{fmt::format("frankopt {}: Frankenstein optimizer experiments", kToolVersion)};
  app.require_subcommand(1);
  app.footer("\n" + key_reference() +
             "\nOutput root: --out, else $" + std::string(kOutputRootEnv) +
             "/<experiment>, else frankopt_out/<experiment>.\n"
             "Exit codes: 0 success, 1 runtime failure (recorded in manifest.json), 2 bad arguments or config.");

  Overrides o;
  const std::vector<std::pair<Experiment, std::string>> help{
      {Experiment::demo1d, "adaptive factor traces on the one-dimensional staircase"},
      {Experiment::minimize, "minimize one problem and keep full traces"},
      {Experiment::bench, "force-call benchmark over paired seeds"},
      {Experiment::overfit, "minibatch overfitting test across batch sizes"},
      {Experiment::ablate, "Frankenstein ablation table"},
      {Experiment::landscape, "loss surface on the PCA plane of each trajectory"},
  };
  for (const auto& [e, text] : help) add_options(app.add_subcommand(to_string(e), text), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  const Experiment experiment = *parse_experiment(app.get_subcommands().front()->get_name());
  ExperimentConfig config;
  std::vector<std::string> problems;
  try {
    if (!o.config.empty()) {
      config = load_config(o.config, experiment);
    } else {
      config = default_config(experiment);
      config.learning_rates.clear();
    }
    apply_overrides(config, o, problems);
    if (!problems.empty()) return report_config_error(problems);
    finalize(config);
  } catch (const ConfigError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    return report_config_error(problems);
  } catch (const std::exception& e) {
    return report_config_error({e.what()});
  }

  if (o.print_config) {
    std::cout << to_yaml(config);
    return 0;
  }
  const ExperimentOutcome outcome = run_experiment(config, std::cerr);
  if (outcome.exit_code != 0) {
    std::cerr << "frankopt: " << outcome.error << "\n";
  } else {
    std::cerr << fmt::format("wrote {} files to {}\n", outcome.files.size() + 1, outcome.directory.string());
  }
  return outcome.exit_code;
}
