#include <doctest.h>

#include <atomic>
#include <cmath>
#include <set>
#include <sstream>

#include "frankopt/core/random.hpp"
#include "frankopt/harness/ablation.hpp"
#include "frankopt/harness/benchmark.hpp"
#include "frankopt/harness/report_io.hpp"
#include "frankopt/harness/run.hpp"
#include "frankopt/problems/functions.hpp"
#include "frankopt/problems/lennard_jones.hpp"
#include "frankopt/problems/overfit.hpp"

using namespace frankopt;

namespace {

// Quadratic that throws once its call budget is spent.
class Fragile final : public Problem {
 public:
  explicit Fragile(int ok_calls) : ok_(ok_calls) {}
  std::string name() const override { return "fragile"; }
  std::size_t dimension() const override { return 2; }
  double evaluate(std::span<const double> x, std::span<double> g) const override {
    if (calls_++ >= ok_) throw std::runtime_error("fragile: budget exhausted");
    g[0] = x[0];
    g[1] = x[1];
    return 0.5 * (x[0] * x[0] + x[1] * x[1]);
  }
  std::vector<double> initial_point(std::uint64_t) const override { return {1.0, 1.0}; }

 private:
  int ok_;
  mutable std::atomic<int> calls_{0};
};

// Unbounded linear objective; loss heads to minus infinity through overflow.
class Linear final : public Problem {
 public:
  std::string name() const override { return "linear"; }
  std::size_t dimension() const override { return 1; }
  double evaluate(std::span<const double> x, std::span<double> g) const override {
    g[0] = 1e300;
    return 1e300 * x[0];
  }
  std::vector<double> initial_point(std::uint64_t) const override { return {0.0}; }
};

std::vector<OptimizerSpec> three_methods() {
  return {OptimizerSpec::of(FrankensteinConfig{}), OptimizerSpec::of(Method::adam, 1e-2),
          OptimizerSpec::of(Method::conjugate_gradient, 0.1)};
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("schedule multipliers") {
  Schedule s;
  CHECK(s.multiplier(0) == 1.0);
  CHECK(s.multiplier(123456) == 1.0);

  s.kind = ScheduleKind::step;
  s.factor = 0.1;
  s.interval = 100;
  CHECK(s.multiplier(0) == 1.0);
  CHECK(s.multiplier(99) == 1.0);
  CHECK(s.multiplier(100) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(s.multiplier(250) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(s.multiplier(1000000) > 0.0);

  s.kind = ScheduleKind::cosine;
  s.total_steps = 100;
  s.min_factor = 0.01;
  CHECK(s.multiplier(0) == 1.0);
  CHECK(s.multiplier(50) == doctest::Approx(0.505).epsilon(1e-14));
  CHECK(s.multiplier(100) == 0.01);
  CHECK(s.multiplier(500) == 0.01);
  for (std::uint64_t t = 1; t < 100; ++t) CHECK(s.multiplier(t) <= s.multiplier(t - 1));

  Schedule bad;
  bad.kind = ScheduleKind::step;
  bad.factor = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.factor = 0.5;
  bad.interval = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK(parse_schedule_kind("cosine") == ScheduleKind::cosine);
  CHECK_FALSE(parse_schedule_kind("linear").has_value());
}

TEST_CASE("stop rules validate") {
  StopRule r;
  r.fmax_threshold = -1.0;
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  r.fmax_threshold = 1e-3;
  r.patience = 0;
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  r.patience.reset();
  r.loss_threshold = std::nan("");
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
}

TEST_CASE("run_single stop reasons") {
  const Quadratic q(3);
  const auto spec = OptimizerSpec::of(Method::steepest_descent, 0.1);
  StopRule stop;

  SUBCASE("empty budget") {
    stop.max_steps = 0;
    const auto r = run_single(spec, q, Schedule{}, stop, 0);
    CHECK(r.stop_reason == "empty_budget");
    CHECK(r.steps == 0);
    CHECK(r.force_calls == 0);
    CHECK_FALSE(r.converged);
  }
  SUBCASE("converged on the gradient threshold") {
    stop.fmax_threshold = 1e-6;
    stop.max_steps = 10000;
    const auto r = run_single(spec, q, Schedule{}, stop, 0);
    CHECK(r.converged);
    CHECK(r.stop_reason == "converged");
    CHECK(r.final_fmax < 1e-6);
    CHECK(r.log.size() == r.steps);
    CHECK(r.log.back().fmax == r.final_fmax);
  }
  SUBCASE("already converged at the start") {
    stop.loss_threshold = 10.0;
    const auto r = run_single(spec, q, Schedule{}, stop, 0);
    CHECK(r.converged);
    CHECK(r.steps == 0);
    CHECK(r.force_calls == 1);
  }
  SUBCASE("step budget") {
    stop.max_steps = 5;
    stop.fmax_threshold = 1e-30;
    const auto r = run_single(OptimizerSpec::of(Method::adam, 1e-4), q, Schedule{}, stop, 0);
    CHECK(r.stop_reason == "max_steps");
    CHECK(r.steps == 5);
    CHECK(r.force_calls == 6);
  }
  SUBCASE("evaluation budget counts line-search probes") {
    stop.max_steps = 1000;
    stop.max_evaluations = 7;
    stop.fmax_threshold = 1e-30;
    const auto r = run_single(OptimizerSpec::of(Method::conjugate_gradient, 0.1), Rosenbrock(4), Schedule{},
                              stop, 0);
    CHECK(r.stop_reason == "max_evaluations");
    CHECK(r.force_calls >= 7);
    CHECK(r.force_calls == r.steps + 1 + r.line_search_probes);
  }
  SUBCASE("patience") {
    stop.max_steps = 100000;
    stop.patience = 3;
    // Started on a plateau centre the gradient is zero and the loss never improves.
    Demo1dConfig flat;
    flat.start = 0.0;
    const auto r = run_single(OptimizerSpec::of(Method::adam, 1e-3), Demo1d(flat), Schedule{}, stop, 0);
    CHECK(r.stop_reason == "patience");
  }
  SUBCASE("divergence") {
    stop.max_steps = 100;
    const auto r = run_single(OptimizerSpec::of(Method::sgd_nag, 1.0), Linear(), Schedule{}, stop, 0);
    CHECK(r.stop_reason == "diverged");
    CHECK_FALSE(r.converged);
  }
}

TEST_CASE("errors end the run and are recorded") {
  const Fragile f(4);
  StopRule stop;
  stop.max_steps = 100;
  const auto r = run_single(OptimizerSpec::of(Method::adam, 1e-2), f, Schedule{}, stop, 0);
  CHECK(r.stop_reason == "error");
  CHECK(r.error.find("budget exhausted") != std::string::npos);
  CHECK_FALSE(r.converged);
  CHECK(r.steps == 3);
}

TEST_CASE("the schedule drives the learning rate") {
  Schedule s;
  s.kind = ScheduleKind::step;
  s.factor = 0.5;
  s.interval = 2;
  StopRule stop;
  stop.max_steps = 6;
  const auto r = run_single(OptimizerSpec::of(Method::adam, 0.01), Quadratic(2), s, stop, 0);
  REQUIRE(r.log.size() == 6);
  const double expect[] = {0.01, 0.01, 0.005, 0.005, 0.0025, 0.0025};
  for (int i = 0; i < 6; ++i) CHECK(r.log[i].lr == doctest::Approx(expect[i]).epsilon(1e-15));
}

TEST_CASE("snapshots include the start and the final point") {
  StopRule stop;
  stop.max_steps = 10;
  RunOptions opt;
  opt.snapshot_stride = 4;
  const auto r = run_single(OptimizerSpec::of(Method::adam, 0.01), Quadratic(2), Schedule{}, stop, 0, opt);
  CHECK(r.snapshot_steps == std::vector<std::uint64_t>{0, 4, 8, 10});
  CHECK(r.snapshots.back() == r.final_theta);
  CHECK(r.snapshots.front() == std::vector<double>{1.0, 1.0});
}

TEST_CASE("batch streams are epoch permutations shared across optimizers") {
  const OverfitProblem p(6, 20, 10, 1);
  ProblemObjective a(p, 4, batch_stream_seed(9)), b(p, 4, batch_stream_seed(9));
  std::vector<double> w(p.dimension(), 0.0), g(p.dimension());
  std::multiset<std::size_t> epoch;
  for (int k = 0; k < 5; ++k) {
    a.evaluate(w, g);
    b.evaluate(w, g);
    CHECK(std::equal(a.last_batch().begin(), a.last_batch().end(), b.last_batch().begin()));
    epoch.insert(a.last_batch().begin(), a.last_batch().end());
  }
  // Five batches of four cover one epoch of twenty rows exactly once.
  CHECK(epoch.size() == 20);
  for (std::size_t i = 0; i < 20; ++i) CHECK(epoch.count(i) == 1);
  CHECK_THROWS_AS(ProblemObjective(p, 21, 0), std::invalid_argument);
  CHECK_THROWS_AS(ProblemObjective(Quadratic(2), 4, 0), std::invalid_argument);
}

TEST_CASE("run seeds follow the split rule") {
  const auto s = run_seeds(42, 5);
  REQUIRE(s.size() == 5);
  for (std::uint64_t k = 0; k < 5; ++k) CHECK(s[k] == split_seed(42, k));
}

TEST_CASE("benchmarks are paired, verified and independent of the thread count") {
  const LennardJonesCluster lj(7);
  StopRule stop;
  stop.fmax_threshold = 1e-2;
  stop.max_steps = 3000;
  BenchmarkOptions opt;
  opt.master_seed = 3;
  opt.seeds = 6;
  opt.run.keep_log = false;
  opt.jobs = 1;
  const auto serial = run_benchmark(three_methods(), lj, stop, Schedule{}, opt);
  opt.jobs = 4;
  const auto threaded = run_benchmark(three_methods(), lj, stop, Schedule{}, opt);

  CHECK(serial.verify());
  CHECK(threaded.verify());
  std::ostringstream a, b;
  write_runs_csv(a, serial);
  write_summary_csv(a, serial);
  write_runs_csv(b, threaded);
  write_summary_csv(b, threaded);
  CHECK(a.str() == b.str());
  CHECK(to_json(serial).dump() == to_json(threaded).dump());

  REQUIRE(serial.methods.size() == 3);
  for (const auto& m : serial.methods) {
    REQUIRE(m.runs.size() == 6);
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(m.runs[k].index == k);
      CHECK(m.runs[k].seed == split_seed(3, k));
    }
    CHECK(m.summary == aggregate(m.runs));
  }

  auto broken = serial;
  broken.methods[0].summary.converged += 1;
  CHECK_FALSE(broken.verify());
  CHECK(serial.find("adam") != nullptr);
  CHECK(serial.find("nope") == nullptr);
}

TEST_CASE("aggregates cover converged runs only") {
  std::vector<SeedResult> runs(3);
  runs[0].converged = true;
  runs[0].force_calls = 10;
  runs[0].steps = 9;
  runs[1].converged = false;
  runs[1].force_calls = 1000;
  runs[2].converged = true;
  runs[2].force_calls = 30;
  runs[2].steps = 29;
  const auto a = aggregate(runs);
  CHECK(a.runs == 3);
  CHECK(a.converged == 2);
  CHECK(a.success_rate == doctest::Approx(2.0 / 3.0));
  CHECK(*a.mean_force_calls == 20.0);
  CHECK(*a.min_force_calls == 10);
  CHECK(*a.max_force_calls == 30);
  CHECK(*a.mean_steps == 19.0);

  const auto none = aggregate({SeedResult{}});
  CHECK(none.converged == 0);
  CHECK_FALSE(none.mean_force_calls.has_value());
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<std::atomic<int>> hits(97);
  parallel_for(97, 8, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS(parallel_for(4, 2, [](std::size_t i) {
    if (i == 2) throw std::runtime_error("task failed");
  }));
}

TEST_CASE("ablation runs seven variants in order on paired seeds") {
  const OverfitProblem p(6, 200, 200, 2);
  StopRule stop;
  stop.max_steps = 200;
  BenchmarkOptions opt;
  opt.seeds = 2;
  opt.run.batch_size = 16;
  opt.run.keep_log = false;
  const auto variants = ablation_preset("table5", FrankensteinConfig{});
  const auto table = run_ablation(variants, p, stop, Schedule{}, opt);
  const char* names[] = {"full",     "decouple_beta_lr", "without_v",    "fix_beta2",
                         "fix_beta1", "without_vmax",     "without_v_ema"};
  REQUIRE(table.rows.size() == 7);
  for (int i = 0; i < 7; ++i) CHECK(table.rows[i].variant == names[i]);
  CHECK(table.rows[0].flags == "none");
  CHECK(table.rows[5].flags == "disable_vmax");
  for (const auto& row : table.rows) {
    REQUIRE(row.runs.size() == 2);
    CHECK(row.runs[1].seed == table.rows[0].runs[1].seed);
  }
  // Distinct switches give distinct trajectories on this problem.
  CHECK(table.rows[0].mean_final_loss != table.rows[2].mean_final_loss);
  CHECK(table.rows[0].mean_final_loss != table.rows[5].mean_final_loss);

  std::ostringstream csv;
  write_ablation_csv(csv, table);
  CHECK(csv.str().rfind("variant,flags,runs,converged,mean_final_loss,mean_n", 0) == 0);
  CHECK_THROWS_AS(ablation_preset("table9", FrankensteinConfig{}), std::invalid_argument);
  CHECK(describe_flags(variants[4].config) == "fix_beta1=0.9");
}

TEST_CASE("report headers") {
  BenchmarkReport empty;
  std::ostringstream runs, summary;
  write_runs_csv(runs, empty);
  write_summary_csv(summary, empty);
  CHECK(runs.str().rfind("optimizer,index,seed,converged,steps,force_calls,final_loss,final_fmax,reason", 0) == 0);
  CHECK(summary.str() ==
        "optimizer,runs,converged,success_rate,mean_n,min_n,max_n,mean_steps,min_steps,max_steps\n");
  CHECK(format_real(0.1) == "0.10000000000000001");
}

}  // TEST_SUITE
