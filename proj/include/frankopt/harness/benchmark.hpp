#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "frankopt/harness/run.hpp"

namespace frankopt {

/// Outcome of one seeded run, as kept in a report.
struct SeedResult {
  std::uint64_t index = 0;  // run index k
  std::uint64_t seed = 0;   // split_seed(master, k)
  bool converged = false;
  std::uint64_t steps = 0;
  std::uint64_t force_calls = 0;
  double final_loss = 0.0;
  double final_fmax = 0.0;
  std::string reason;
  std::string error;
  std::vector<std::pair<std::string, double>> metrics;  // problem-specific extras
};

SeedResult summarize(const RunRecord& record, std::uint64_t index);

/// Table-style aggregates over converged runs only; counts cover all runs.
struct Aggregates {
  std::size_t runs = 0;
  std::size_t converged = 0;
  double success_rate = 0.0;
  std::optional<double> mean_force_calls;
  std::optional<std::uint64_t> min_force_calls;
  std::optional<std::uint64_t> max_force_calls;
  std::optional<double> mean_steps;
  std::optional<std::uint64_t> min_steps;
  std::optional<std::uint64_t> max_steps;

  bool operator==(const Aggregates&) const = default;
};

Aggregates aggregate(const std::vector<SeedResult>& runs);

struct MethodReport {
  std::string optimizer;
  std::vector<SeedResult> runs;  // in run-index order
  Aggregates summary;
};

struct BenchmarkReport {
  std::string problem;
  std::uint64_t master_seed = 0;
  std::vector<MethodReport> methods;

  /// True when every summary equals a recomputation from its runs.
  bool verify() const;
  const MethodReport* find(const std::string& optimizer) const;
};

/// Seeds shared by every optimizer: split_seed(master, k) for k < count.
std::vector<std::uint64_t> run_seeds(std::uint64_t master, std::size_t count);

/// Extra per-run metrics computed from the final parameters.
using MetricFn = std::function<std::vector<std::pair<std::string, double>>(const Problem&, std::span<const double>)>;

/// Test loss and accuracy for the overfit problem, nothing otherwise.
std::vector<std::pair<std::string, double>> default_metrics(const Problem& problem,
                                                            std::span<const double> theta);

struct BenchmarkOptions {
  std::uint64_t master_seed = 0;
  std::size_t seeds = 100;
  std::size_t jobs = 1;
  RunOptions run;
  MetricFn metrics = default_metrics;
};

/// Runs every optimizer on every seed. Run k of every optimizer starts from
/// the same initial point and sees the same batch stream. Work is spread
/// over `jobs` threads; results are assembled in deterministic order.
BenchmarkReport run_benchmark(const std::vector<OptimizerSpec>& optimizers, const Problem& problem,
                              const StopRule& stop, const Schedule& schedule,
                              const BenchmarkOptions& options);

/// Calls task(i) for i < count on up to `jobs` threads.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task);

}  // namespace frankopt
