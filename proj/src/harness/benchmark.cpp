#include "frankopt/harness/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "frankopt/core/random.hpp"
#include "frankopt/problems/overfit.hpp"

namespace frankopt {

SeedResult summarize(const RunRecord& r, std::uint64_t index) {
  SeedResult s;
  s.index = index;
  s.seed = r.seed;
  s.converged = r.converged;
  s.steps = r.steps;
  s.force_calls = r.force_calls;
  s.final_loss = r.final_full_loss;
  s.final_fmax = r.final_fmax;
  s.reason = r.stop_reason;
  s.error = r.error;
  return s;
}

Aggregates aggregate(const std::vector<SeedResult>& runs) {
  Aggregates a;
  a.runs = runs.size();
  double calls = 0.0, steps = 0.0;
  for (const auto& r : runs) {
    if (!r.converged) continue;
    ++a.converged;
    calls += static_cast<double>(r.force_calls);
    steps += static_cast<double>(r.steps);
    a.min_force_calls = std::min(a.min_force_calls.value_or(r.force_calls), r.force_calls);
    a.max_force_calls = std::max(a.max_force_calls.value_or(r.force_calls), r.force_calls);
    a.min_steps = std::min(a.min_steps.value_or(r.steps), r.steps);
    a.max_steps = std::max(a.max_steps.value_or(r.steps), r.steps);
  }
  if (a.runs > 0) a.success_rate = static_cast<double>(a.converged) / static_cast<double>(a.runs);
  if (a.converged > 0) {
    a.mean_force_calls = calls / static_cast<double>(a.converged);
    a.mean_steps = steps / static_cast<double>(a.converged);
  }
  return a;
}

bool BenchmarkReport::verify() const {
  return std::all_of(methods.begin(), methods.end(),
                     [](const MethodReport& m) { return aggregate(m.runs) == m.summary; });
}

const MethodReport* BenchmarkReport::find(const std::string& optimizer) const {
  for (const auto& m : methods) {
    if (m.optimizer == optimizer) return &m;
  }
  return nullptr;
}

std::vector<std::uint64_t> run_seeds(std::uint64_t master, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t k = 0; k < count; ++k) seeds[k] = split_seed(master, k);
  return seeds;
}

std::vector<std::pair<std::string, double>> default_metrics(const Problem& problem,
                                                            std::span<const double> theta) {
  if (const auto* p = dynamic_cast<const OverfitProblem*>(&problem)) {
    return {{"train_loss", p->train_loss(theta)},
            {"test_loss", p->test_loss(theta)},
            {"test_accuracy", p->test_accuracy(theta)}};
  }
  return {};
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

BenchmarkReport run_benchmark(const std::vector<OptimizerSpec>& optimizers, const Problem& problem,
                              const StopRule& stop, const Schedule& schedule,
                              const BenchmarkOptions& options) {
  if (optimizers.empty()) throw std::invalid_argument("no optimizers selected");
  if (options.seeds == 0) throw std::invalid_argument("benchmark needs at least one seed");
  stop.validate();
  schedule.validate();
  for (const auto& spec : optimizers) spec.make();  // configuration errors surface before any run

  const auto seeds = run_seeds(options.master_seed, options.seeds);
  const std::size_t n_seeds = seeds.size();
  BenchmarkReport report;
  report.problem = problem.name();
  report.master_seed = options.master_seed;
  report.methods.resize(optimizers.size());
  for (std::size_t m = 0; m < optimizers.size(); ++m) {
    report.methods[m].optimizer = optimizers[m].label;
    report.methods[m].runs.resize(n_seeds);
  }

  RunOptions run_options = options.run;
  run_options.keep_log = false;
  parallel_for(optimizers.size() * n_seeds, options.jobs, [&](std::size_t task) {
    const std::size_t m = task / n_seeds;
    const std::size_t k = task % n_seeds;
    const RunRecord rec = run_single(optimizers[m], problem, schedule, stop, seeds[k], run_options);
    SeedResult s = summarize(rec, k);
    if (options.metrics) s.metrics = options.metrics(problem, rec.final_theta);
    report.methods[m].runs[k] = std::move(s);
  });
  for (auto& m : report.methods) m.summary = aggregate(m.runs);
  return report;
}

}  // namespace frankopt
