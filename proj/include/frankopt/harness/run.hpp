#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "frankopt/baselines/config.hpp"
#include "frankopt/core/frankenstein.hpp"
#include "frankopt/core/minimizer.hpp"
#include "frankopt/harness/stop_schedule.hpp"
#include "frankopt/problems/problem.hpp"

namespace frankopt {

/// One optimizer under test: a method tag plus its hyperparameters.
/// `lr` is the base rate the schedule multiplies.
struct OptimizerSpec {
  std::string label;
  Method method = Method::frankenstein;
  FrankensteinConfig frankenstein;
  BaselineConfig baseline;

  /// For FIRE the rate is the initial timestep.
  static OptimizerSpec of(Method method, double lr);
  static OptimizerSpec of(Method method, const BaselineConfig& base, double lr);
  static OptimizerSpec of(const FrankensteinConfig& config, std::string label = "frankenstein");
  double lr() const;
  std::unique_ptr<Minimizer> make() const;
};

/// Objective over a Problem. For a stochastic problem with batch_size > 0
/// every evaluation draws the next batch of a reshuffled-per-epoch stream,
/// so one gradient step consumes one fresh batch.
class ProblemObjective final : public Objective {
 public:
  ProblemObjective(const Problem& problem, std::size_t batch_size, std::uint64_t stream_seed);

  std::size_t dimension() const override { return problem_.dimension(); }
  double evaluate(std::span<const double> theta, std::span<double> grad) override;
  std::uint64_t calls() const { return calls_; }
  bool stochastic() const { return batch_size_ > 0; }
  /// Row indices used by the most recent evaluation (empty when full-batch).
  std::span<const std::size_t> last_batch() const { return batch_; }

 private:
  void next_batch();

  const Problem& problem_;
  std::size_t batch_size_;
  std::uint64_t stream_seed_;
  std::uint64_t epoch_ = 0;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::vector<std::size_t> batch_;
  std::uint64_t calls_ = 0;
};

struct StepLog {
  std::uint64_t step = 0;         // 1-based optimizer step
  std::uint64_t evaluations = 0;  // cumulative objective calls
  double lr = 0.0;
  double loss = 0.0;              // objective value the minimizer saw
  double full_loss = 0.0;         // full-data loss (equals loss unless stochastic)
  double grad_norm = 0.0;
  double fmax = 0.0;              // largest per-block gradient norm
  bool fallback = false;
  std::optional<AdaptiveDiagnostics> diagnostics;
};

struct RunOptions {
  std::size_t batch_size = 0;       // 0 = full batch
  std::uint64_t snapshot_stride = 0;  // 0 = no parameter snapshots
  bool keep_log = true;
};

struct RunRecord {
  std::string optimizer;
  std::string problem;
  std::uint64_t seed = 0;
  bool converged = false;
  std::string stop_reason;  // converged | max_steps | max_evaluations | patience | stalled | diverged | error | empty_budget
  std::string error;
  std::uint64_t steps = 0;
  std::uint64_t force_calls = 0;
  std::uint64_t line_search_probes = 0;  // evaluations beyond one per step
  std::uint64_t fallbacks = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double final_full_loss = 0.0;
  double final_fmax = 0.0;
  std::vector<StepLog> log;
  std::vector<std::uint64_t> snapshot_steps;
  std::vector<std::vector<double>> snapshots;
  std::vector<double> final_theta;
};

/// Runs `minimizer` on `problem` from problem.initial_point(seed). The lr at
/// step t is the optimizer's base rate times schedule.multiplier(t). Errors
/// thrown by the optimizer or the problem end the run and are recorded.
RunRecord run_single(Minimizer& minimizer, double base_lr, const Problem& problem,
                     const Schedule& schedule, const StopRule& stop, std::uint64_t seed,
                     const RunOptions& options = {});

RunRecord run_single(const OptimizerSpec& spec, const Problem& problem, const Schedule& schedule,
                     const StopRule& stop, std::uint64_t seed, const RunOptions& options = {});

/// Seed of the batch stream for run `seed`; shared by every optimizer.
std::uint64_t batch_stream_seed(std::uint64_t seed);

}  // namespace frankopt
