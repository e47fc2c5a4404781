#include "frankopt/harness/run.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "frankopt/baselines/factory.hpp"
#include "frankopt/core/random.hpp"

namespace frankopt {

OptimizerSpec OptimizerSpec::of(Method method, double lr) { return of(method, BaselineConfig{}, lr); }

OptimizerSpec OptimizerSpec::of(Method method, const BaselineConfig& base, double lr) {
  OptimizerSpec s;
  s.label = std::string(to_string(method));
  s.method = method;
  s.baseline = base;
  s.baseline.method = method;
  s.baseline.lr = lr;
  if (method == Method::fire) s.baseline.fire.dt = lr;
  s.frankenstein.base_lr = lr;
  return s;
}

OptimizerSpec OptimizerSpec::of(const FrankensteinConfig& config, std::string label) {
  OptimizerSpec s;
  s.label = std::move(label);
  s.method = Method::frankenstein;
  s.frankenstein = config;
  s.baseline.lr = config.base_lr;
  return s;
}

double OptimizerSpec::lr() const {
  return method == Method::frankenstein ? frankenstein.base_lr : baseline.lr;
}

std::unique_ptr<Minimizer> OptimizerSpec::make() const {
  if (method == Method::frankenstein) return make_frankenstein_minimizer(frankenstein);
  BaselineConfig c = baseline;
  c.method = method;
  return make_baseline_minimizer(c);
}

std::uint64_t batch_stream_seed(std::uint64_t seed) { return split_seed(seed, 0x62617463ULL); }

// ------------------------------------------------------------------ objective

ProblemObjective::ProblemObjective(const Problem& problem, std::size_t batch_size,
                                   std::uint64_t stream_seed)
    : problem_(problem), batch_size_(batch_size), stream_seed_(stream_seed) {
  if (batch_size_ > 0) {
    const std::size_t n = problem_.sample_count();
    if (n == 0) throw std::invalid_argument(problem_.name() + " has no samples to batch");
    if (batch_size_ > n) throw std::invalid_argument("batch size exceeds the number of samples");
    order_.resize(n);
    cursor_ = n;  // forces a shuffle on first use
  }
}

void ProblemObjective::next_batch() {
  const std::size_t n = order_.size();
  batch_.clear();
  while (batch_.size() < batch_size_) {
    if (cursor_ == n) {
      // Fisher-Yates on a fresh identity permutation per epoch.
      std::iota(order_.begin(), order_.end(), std::size_t{0});
      Rng rng(split_seed(stream_seed_, epoch_++));
      for (std::size_t i = n - 1; i > 0; --i) std::swap(order_[i], order_[rng.below(i + 1)]);
      cursor_ = 0;
    }
    batch_.push_back(order_[cursor_++]);
  }
}

double ProblemObjective::evaluate(std::span<const double> theta, std::span<double> grad) {
  ++calls_;
  if (batch_size_ == 0) return problem_.evaluate(theta, grad);
  next_batch();
  return problem_.evaluate_batch(theta, batch_, grad);
}

// ------------------------------------------------------------------ driver

namespace {

double full_loss_of(const Problem& problem, const ProblemObjective& objective,
                    std::span<const double> theta, double seen) {
  if (!objective.stochastic()) return seen;
  std::vector<double> scratch(theta.size());
  return problem.evaluate(theta, scratch);
}

bool target_met(const StopRule& stop, double full_loss, double fmax) {
  return (stop.loss_threshold && full_loss < *stop.loss_threshold) ||
         (stop.fmax_threshold && fmax < *stop.fmax_threshold);
}

}  // namespace

RunRecord run_single(Minimizer& minimizer, double base_lr, const Problem& problem,
                     const Schedule& schedule, const StopRule& stop, std::uint64_t seed,
                     const RunOptions& options) {
  stop.validate();
  schedule.validate();
  RunRecord rec;
  rec.optimizer = minimizer.name();
  rec.problem = problem.name();
  rec.seed = seed;
  if (stop.max_steps == 0) {
    rec.stop_reason = "empty_budget";
    return rec;
  }

  const std::size_t block = problem.block_size();
  std::unique_ptr<ProblemObjective> owned;
  try {
    std::vector<double> theta0 = problem.initial_point(seed);
    if (theta0.size() != problem.dimension()) throw std::logic_error("initial point has the wrong dimension");
    minimizer.reset(theta0);
    owned = std::make_unique<ProblemObjective>(problem, options.batch_size, batch_stream_seed(seed));
    ProblemObjective& objective = *owned;

    Evaluation current = evaluate_at(objective, minimizer.parameters());
    rec.initial_loss = current.loss;
    rec.final_loss = current.loss;
    rec.final_full_loss = full_loss_of(problem, objective, minimizer.parameters(), current.loss);
    rec.final_fmax = block_max_norm(current.grad, block);
    if (options.snapshot_stride > 0) {
      rec.snapshot_steps.push_back(0);
      rec.snapshots.emplace_back(minimizer.parameters().begin(), minimizer.parameters().end());
    }

    double best = rec.final_full_loss;
    std::uint64_t since_best = 0;
    if (target_met(stop, rec.final_full_loss, rec.final_fmax)) {
      rec.converged = true;
      rec.stop_reason = "converged";
    }

    while (!rec.converged && rec.stop_reason.empty()) {
      if (rec.steps >= stop.max_steps) {
        rec.stop_reason = "max_steps";
        break;
      }
      if (stop.max_evaluations && objective.calls() >= *stop.max_evaluations) {
        rec.stop_reason = "max_evaluations";
        break;
      }
      const double lr = base_lr * schedule.multiplier(rec.steps);
      minimizer.set_learning_rate(lr);
      StepOutcome out = minimizer.advance(objective, current);
      ++rec.steps;
      current = std::move(out.eval);
      if (out.fallback) ++rec.fallbacks;

      StepLog entry;
      entry.step = rec.steps;
      entry.evaluations = objective.calls();
      entry.lr = lr;
      entry.loss = current.loss;
      entry.full_loss = full_loss_of(problem, objective, minimizer.parameters(), current.loss);
      entry.grad_norm = norm2(current.grad);
      entry.fmax = block_max_norm(current.grad, block);
      entry.fallback = out.fallback;
      entry.diagnostics = minimizer.diagnostics();

      rec.final_loss = entry.loss;
      rec.final_full_loss = entry.full_loss;
      rec.final_fmax = entry.fmax;
      if (options.snapshot_stride > 0 && rec.steps % options.snapshot_stride == 0) {
        rec.snapshot_steps.push_back(rec.steps);
        rec.snapshots.emplace_back(minimizer.parameters().begin(), minimizer.parameters().end());
      }
      if (options.keep_log) rec.log.push_back(std::move(entry));

      if (!std::isfinite(rec.final_loss)) {
        rec.stop_reason = "diverged";
      } else if (target_met(stop, rec.final_full_loss, rec.final_fmax)) {
        rec.converged = true;
        rec.stop_reason = "converged";
      } else if (out.stalled) {
        rec.stop_reason = "stalled";
      } else if (stop.patience) {
        if (rec.final_full_loss < best) {
          best = rec.final_full_loss;
          since_best = 0;
        } else if (++since_best >= *stop.patience) {
          rec.stop_reason = "patience";
        }
      }
    }
  } catch (const std::exception& e) {
    rec.converged = false;
    rec.stop_reason = "error";
    rec.error = e.what();
  }
  rec.force_calls = owned ? owned->calls() : 0;
  if (rec.force_calls > rec.steps + 1) rec.line_search_probes = rec.force_calls - rec.steps - 1;
  const auto theta = minimizer.parameters();
  rec.final_theta.assign(theta.begin(), theta.end());
  if (options.snapshot_stride > 0 && !rec.snapshot_steps.empty() && rec.snapshot_steps.back() != rec.steps) {
    rec.snapshot_steps.push_back(rec.steps);
    rec.snapshots.push_back(rec.final_theta);
  }
  return rec;
}

RunRecord run_single(const OptimizerSpec& spec, const Problem& problem, const Schedule& schedule,
                     const StopRule& stop, std::uint64_t seed, const RunOptions& options) {
  auto minimizer = spec.make();
  RunRecord rec = run_single(*minimizer, spec.lr(), problem, schedule, stop, seed, options);
  rec.optimizer = spec.label;
  return rec;
}

}  // namespace frankopt
