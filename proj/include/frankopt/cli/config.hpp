#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "frankopt/baselines/config.hpp"
#include "frankopt/core/frankenstein.hpp"
#include "frankopt/harness/run.hpp"
#include "frankopt/harness/stop_schedule.hpp"
#include "frankopt/problems/functions.hpp"

namespace frankopt::cli {

inline constexpr const char* kToolVersion = "0.1.0";
/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "FRANKOPT_OUT";

enum class Experiment { demo1d, minimize, bench, overfit, ablate, landscape };

std::string to_string(Experiment e);
std::optional<Experiment> parse_experiment(const std::string& tag);
const std::vector<Experiment>& all_experiments();

struct ProblemConfig {
  std::string kind = "lj";  // lj | quadratic | rosenbrock | demo1d | overfit
  std::size_t atoms = 38;
  std::size_t dimension = 10;
  std::size_t patterns = 6;
  std::size_t train_samples = 1000;
  std::size_t test_samples = 1000;
  std::uint64_t data_seed = 0;
  std::size_t batch_size = 0;  // 0 = full batch
  Demo1dConfig demo1d;
};

struct LandscapeSettings {
  std::size_t resolution = 41;
  double scale = 1.2;
  std::uint64_t snapshot_stride = 10;
  bool shared_basis = false;
  std::string metric = "loss";  // loss | test_loss | test_accuracy
};

struct ExperimentConfig {
  Experiment experiment = Experiment::bench;
  std::uint64_t seed = 0;  // master seed
  std::size_t seeds = 100;
  std::size_t jobs = 1;
  std::string out;  // empty: $FRANKOPT_OUT/<experiment> or frankopt_out/<experiment>
  std::vector<std::string> optimizers;
  std::map<std::string, double> learning_rates;  // canonical method tag -> base lr
  ProblemConfig problem;
  StopRule stop;
  Schedule schedule;
  FrankensteinConfig frankenstein;
  BaselineConfig baseline;
  std::vector<std::size_t> batch_sizes;  // overfit
  std::string preset = "table5";         // ablate
  LandscapeSettings landscape;
};

/// Every problem in a config file, collected rather than stopping at the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Defaults for one experiment kind, with learning rates resolved.
ExperimentConfig default_config(Experiment e);

/// Default base learning rate for a method on a problem kind.
double default_learning_rate(Method method, const std::string& problem_kind);

/// Overlays the keys present in `yaml_text` onto `base`. Unknown keys, type
/// errors and invalid values are all reported in one ConfigError.
ExperimentConfig apply_yaml(const ExperimentConfig& base, const std::string& yaml_text);

/// Reads the file at `path`. The file may set `experiment`; it must agree
/// with `expected` when both are given.
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Experiment> expected);

/// Fills learning rates for the selected optimizers that have none, then
/// validates; throws ConfigError listing every violation.
void finalize(ExperimentConfig& config);

std::vector<std::string> validate(const ExperimentConfig& config);

/// Full config as YAML; apply_yaml(default, to_yaml(c)) reproduces c.
std::string to_yaml(const ExperimentConfig& config);

/// "key  default  description" lines for every key of the file format.
std::string key_reference();

/// "lj38" -> lj with 38 atoms; plain kinds pass through.
ProblemConfig parse_problem_tag(const std::string& tag, ProblemConfig base);

std::unique_ptr<Problem> make_problem(const ProblemConfig& config);

std::vector<OptimizerSpec> make_specs(const ExperimentConfig& config);

std::filesystem::path output_directory(const ExperimentConfig& config);

}  // namespace frankopt::cli
