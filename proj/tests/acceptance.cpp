// Acceptance runner: one PASS/FAIL line per criterion. Exits 0 once every
// criterion has been evaluated; --strict also exits 1 when any of them fails.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "frankopt/analysis/pca.hpp"
#include "frankopt/baselines/adaptive.hpp"
#include "frankopt/cli/config.hpp"
#include "frankopt/cli/experiments.hpp"
#include "frankopt/core/frankenstein.hpp"
#include "frankopt/harness/benchmark.hpp"
#include "frankopt/problems/functions.hpp"
#include "frankopt/problems/lennard_jones.hpp"
#include "frankopt/problems/overfit.hpp"
#include "ablation_cases.hpp"
#include "oracles.hpp"
#include "reference_trace.hpp"

using namespace frankopt;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::size_t g_jobs = 1;

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// ------------------------------------------------------------------ update rule

Verdict trace_oracle() {
  auto s = OptimizerState::initial(std::vector<double>{1.0}, 1e-3);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    s = frankenstein_step(s, std::vector<double>{s.theta[0]}, {}).state;
    worst = std::max({worst, rel(s.theta[0], reference::kTheta[t]), rel(s.m[0], reference::kM[t]),
                      rel(s.v[0], reference::kV[t])});
  }
  return {worst <= 1e-12, fmt::format("10 steps, worst relative error {:.3g} (limit 1e-12), theta_1 = {:.6f}",
                                      worst, reference::kTheta[0])};
}

Verdict elementwise_bounds() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> expo(-8.0, 4.0), unit(0.0, 1.0);
  auto mag = [&] { return std::pow(10.0, expo(rng)); };
  auto signed_mag = [&] { return (unit(rng) < 0.5 ? -1.0 : 1.0) * mag(); };
  const double eps = 1e-8;
  std::size_t violations = 0;
  constexpr std::size_t kTuples = 100000;
  for (std::size_t k = 0; k < kTuples; ++k) {
    const double lr = std::pow(10.0, -6.0 + 6.0 * unit(rng));
    auto s = OptimizerState::initial(std::vector<double>{signed_mag()}, lr);
    s.m[0] = unit(rng) < 0.05 ? 0.0 : signed_mag();
    s.x_prev[0] = unit(rng) < 0.05 ? eps : mag();
    s.v[0] = unit(rng) < 0.2 ? 0.0 : mag();
    const double g = unit(rng) < 0.05 ? 0.0 : signed_mag();
    const auto out = frankenstein_step(s, std::vector<double>{g}, {});
    const auto& sc = out.scratch;
    violations += !(sc.beta1 >= 0.01 - 1e-15 && sc.beta1 <= 0.95 + 1e-15);
    violations += !(sc.p_factor[0] >= 0.0 && sc.p_factor[0] <= 1.0);
    violations += !(sc.rho[0] >= 0.8 && sc.rho[0] <= 1.05);
    violations += !(sc.xi[0] > 0.80326 && sc.xi[0] < 1.60654);
    violations += !(sc.v_max[0] >= eps);
  }
  return {violations == 0, fmt::format("{} random tuples, {} violations", kTuples, violations)};
}

Verdict xi_fixed_point() {
  auto s = OptimizerState::initial(std::vector<double>{0.0}, 1e-3);
  s = frankenstein_step(s, std::vector<double>{0.0}, {}).state;
  const double xi = frankenstein_step(s, std::vector<double>{0.0}, {}).scratch.xi[0];
  return {std::fabs(xi - 1.0) < 1e-6, fmt::format("xi = {:.17g}, |xi - 1| = {:.3g}", xi, std::fabs(xi - 1.0))};
}

// ------------------------------------------------------------------ problems

Verdict gradient_oracles() {
  struct Entry {
    std::string name;
    std::unique_ptr<Problem> problem;
    double lo, hi, h;
  };
  std::vector<Entry> entries;
  std::vector<double> a{4, 1, 0, 1, 3, 1, 0, 1, 2};
  entries.push_back({"quadratic", std::make_unique<Quadratic>(7), -3, 3, 1e-3});
  entries.push_back({"quadratic_form", std::make_unique<QuadraticForm>(a, std::vector<double>{1, -1, 2}), -2, 2, 1e-3});
  entries.push_back({"rosenbrock", std::make_unique<Rosenbrock>(6), -2, 2, 1e-4});
  entries.push_back({"demo1d", std::make_unique<Demo1d>(), -0.3, 0.6, 1e-5});
  entries.push_back({"overfit", std::make_unique<OverfitProblem>(6, 200, 50, 3), -2, 2, 1e-4});
  entries.push_back({"lj38", std::make_unique<LennardJonesCluster>(38), 0, 0, 1e-6});

  std::string detail;
  bool ok = true;
  std::mt19937_64 rng(77);
  for (const auto& e : entries) {
    const Problem& p = *e.problem;
    std::vector<double> g(p.dimension()), dummy(p.dimension());
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      std::vector<double> x;
      if (e.name == "lj38") {
        x = p.initial_point(rng());
      } else {
        std::uniform_real_distribution<double> u(e.lo, e.hi);
        x.resize(p.dimension());
        for (auto& v : x) v = u(rng);
      }
      p.evaluate(x, g);
      const auto fd =
          oracle::fd_gradient([&](std::span<const double> y) { return p.evaluate(y, dummy); }, x, e.h);
      worst = std::max(worst, oracle::rel_error(fd, g, 1e-6));
    }
    ok = ok && worst < 1e-6;
    detail += fmt::format("{} {:.2g}; ", e.name, worst);
  }

  double net = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    AtomicCluster c = random_cluster(38, seed);
    const auto ev = lj_energy_forces(c);
    std::array<double, 3> centre{0, 0, 0}, f{0, 0, 0}, tq{0, 0, 0};
    for (std::size_t i = 0; i < c.positions.size(); ++i) centre[i % 3] += c.positions[i] / 38.0;
    for (std::size_t at = 0; at < 38; ++at) {
      double r[3], q[3];
      for (int k = 0; k < 3; ++k) {
        r[k] = c.positions[3 * at + k] - centre[k];
        q[k] = ev.forces[3 * at + k];
        f[k] += q[k];
      }
      tq[0] += r[1] * q[2] - r[2] * q[1];
      tq[1] += r[2] * q[0] - r[0] * q[2];
      tq[2] += r[0] * q[1] - r[1] * q[0];
    }
    for (int k = 0; k < 3; ++k) net = std::max({net, std::fabs(f[k]), std::fabs(tq[k])});
  }
  ok = ok && net < 1e-10;
  detail += fmt::format("LJ38 net force/torque {:.2g}", net);
  return {ok, "worst FD relative error: " + detail};
}

// ------------------------------------------------------------------ baselines

Verdict baseline_equivalence() {
  constexpr std::size_t n = 6;
  const std::vector<double> x0{0.5, -1.0, 2.0, 0.0, 3.0, -0.25}, z(n, 0.0);
  auto stream = [&](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<std::vector<double>> out(100, std::vector<double>(n));
    for (int t = 0; t < 100; ++t) {
      for (std::size_t i = 0; i < n; ++i) {
        out[t][i] = std::sin(0.1 * t + static_cast<double>(i)) * std::pow(10.0, static_cast<double>(i) - 3.0) +
                    0.3 * noise(rng);
      }
    }
    return out;
  };
  std::map<std::string, std::uint64_t> worst;
  auto drive = [&](const std::string& name, GradientOptimizer& opt, auto& ref, std::uint64_t seed) {
    opt.reset(x0);
    for (const auto& g : stream(seed)) {
      opt.update(g);
      ref.step(g);
      worst[name] = std::max(worst[name], oracle::max_ulp(opt.parameters(), ref.theta));
    }
  };
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    {
      SgdNesterov o(1e-2, 0.9);
      oracle::SgdNag r{1e-2, 0.9, x0, z};
      drive("sgd_nag", o, r, seed);
    }
    {
      RmsProp o(1e-3, 0.9, 1e-8);
      oracle::RmsPropRef r{1e-3, 0.9, 1e-8, x0, z};
      drive("rmsprop", o, r, seed);
    }
    {
      Adam o(1e-3, 0.9, 0.999, 1e-8, false);
      oracle::AdamRef r{1e-3, 0.9, 0.999, 1e-8, false, x0, z, z, z};
      drive("adam", o, r, seed);
    }
    {
      Adam o(1e-3, 0.9, 0.999, 1e-8, true);
      oracle::AdamRef r{1e-3, 0.9, 0.999, 1e-8, true, x0, z, z, z};
      drive("amsgrad", o, r, seed);
    }
    {
      AdaBound o(1e-3, 0.9, 0.999, 1e-8, 0.1, 1e-3);
      oracle::AdaBoundRef r{1e-3, 0.9, 0.999, 1e-8, 0.1, 1e-3, x0, z, z};
      drive("adabound", o, r, seed);
    }
    {
      Padam o(1e-1, 0.9, 0.999, 1e-8, 0.125);
      oracle::PadamRef r{1e-1, 0.9, 0.999, 1e-8, 0.125, x0, z, z, z};
      drive("padam", o, r, seed);
    }
    {
      AdaBelief o(1e-3, 0.9, 0.999, 1e-8);
      oracle::AdaBeliefRef r{1e-3, 0.9, 0.999, 1e-8, x0, z, z};
      drive("adabelief", o, r, seed);
    }
  }
  bool ok = true;
  std::string detail = "max ulp:";
  for (const auto& [k, v] : worst) {
    ok = ok && v <= 1;
    detail += fmt::format(" {} {}", k, v);
  }

  Lookahead la(std::make_unique<Adam>(1e-3, 0.9, 0.999, 1e-8, false), 1, 1.0);
  Adam plain(1e-3, 0.9, 0.999, 1e-8, false);
  la.reset(x0);
  plain.reset(x0);
  bool same = true;
  for (const auto& g : stream(5)) {
    la.update(g);
    plain.update(g);
    for (std::size_t i = 0; i < n; ++i) same = same && la.parameters()[i] == plain.parameters()[i];
  }
  detail += same ? "; lookahead(k=1, alpha=1) == adam" : "; lookahead(k=1, alpha=1) differs from adam";
  return {ok && same, detail};
}

// ------------------------------------------------------------------ benchmarks

Verdict lj38_ranking() {
  cli::ExperimentConfig c = cli::default_config(cli::Experiment::bench);
  const auto problem = cli::make_problem(c.problem);
  BenchmarkOptions opt;
  opt.master_seed = c.seed;
  opt.seeds = 100;
  opt.jobs = g_jobs;
  opt.run.keep_log = false;
  const auto report = run_benchmark(cli::make_specs(c), *problem, c.stop, c.schedule, opt);
  auto mean = [&](const std::string& tag) {
    const auto* m = report.find(tag);
    return m && m->summary.mean_force_calls ? *m->summary.mean_force_calls : INFINITY;
  };
  auto rate = [&](const std::string& tag) { return report.find(tag)->summary.converged; };
  const double f = mean("frankenstein"), cg = mean("conjugate_gradient"), sd = mean("steepest_descent");
  const bool order = f < cg && cg < sd;
  const bool range = f >= 150.0 && f <= 800.0;
  return {order && range,
          fmt::format("mean force calls over converged runs: frankenstein {:.1f} ({}/100), cg {:.1f} ({}/100), "
                      "sd {:.1f} ({}/100); ordering F<CG<SD {}; frankenstein in [150, 800] {}",
                      f, rate("frankenstein"), cg, rate("conjugate_gradient"), sd, rate("steepest_descent"),
                      order ? "holds" : "fails", range ? "holds" : "fails")};
}

double mean_metric(const MethodReport& m, const std::string& key) {
  double s = 0.0;
  for (const auto& r : m.runs) {
    for (const auto& [k, v] : r.metrics) {
      if (k == key) s += v;
    }
  }
  return s / static_cast<double>(m.runs.size());
}

Verdict overfit_test() {
  cli::ExperimentConfig c = cli::default_config(cli::Experiment::overfit);
  for (auto& [method, lr] : c.learning_rates) lr = 1e-3;
  const auto problem = cli::make_problem(c.problem);
  bool reach = true, ordering = true;
  std::string detail;
  for (std::size_t bs : {std::size_t{4}, std::size_t{128}}) {
    BenchmarkOptions opt;
    opt.master_seed = c.seed;
    opt.seeds = 10;
    opt.jobs = g_jobs;
    opt.run.batch_size = bs;
    opt.run.keep_log = false;
    const auto report = run_benchmark(cli::make_specs(c), *problem, c.stop, c.schedule, opt);
    const auto* fr = report.find("frankenstein");
    std::size_t reached = 0;
    double best_train = INFINITY;
    for (const auto& r : fr->runs) {
      for (const auto& [k, v] : r.metrics) {
        if (k == "train_loss") {
          reached += v <= 1e-8;
          best_train = std::min(best_train, v);
        }
      }
    }
    const double tf = mean_metric(*fr, "test_loss"), ta = mean_metric(*report.find("adam"), "test_loss"),
                 tm = mean_metric(*report.find("amsgrad"), "test_loss");
    reach = reach && reached == fr->runs.size();
    ordering = ordering && tf <= ta && tf <= tm;
    detail += fmt::format("bs {}: frankenstein train loss <= 1e-8 in {}/10 (best {:.3g}); mean test loss "
                          "frankenstein {:.4g}, adam {:.4g}, amsgrad {:.4g}. ",
                          bs, reached, best_train, tf, ta, tm);
  }
  detail += fmt::format("Training-loss target {}; test-loss ordering {}", reach ? "met" : "missed",
                        ordering ? "holds" : "fails");
  return {reach && ordering, detail};
}

// ------------------------------------------------------------------ ablation

Verdict ablation_bitwise() {
  bool ok = true;
  std::string detail;
  for (const auto& c : oracle::ablation_cases()) {
    const auto cmp = oracle::compare_reduced_rule(c);
    const bool good = cmp.first_mismatch < 0 && cmp.finite;
    ok = ok && good;
    detail += good ? fmt::format("{} ok; ", c.name)
                   : fmt::format("{} mismatch at step {}{}; ", c.name, cmp.first_mismatch,
                                 cmp.finite ? "" : " (non-finite)");
  }
  detail.resize(detail.size() - 2);
  return {ok, "1000 Rosenbrock steps each: " + detail};
}

// ------------------------------------------------------------------ analysis

Verdict pca_oracle() {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd(0.0, 1.0);
  double worst_val = 0.0, worst_orth = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    constexpr std::size_t T = 20, d = 8;
    std::vector<std::vector<double>> rows(T, std::vector<double>(d));
    for (auto& r : rows) {
      for (std::size_t j = 0; j < d; ++j) r[j] = nd(rng) * (1.0 + 3.0 / (1.0 + static_cast<double>(j)));
    }
    const Pca2 p = pca_top2(TrajectoryMatrix::from_rows(rows));
    std::vector<double> mean(d, 0.0), cov(d * d, 0.0);
    for (const auto& r : rows) {
      for (std::size_t j = 0; j < d; ++j) mean[j] += r[j] / T;
    }
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) cov[i * d + j] += (r[i] - mean[i]) * (r[j] - mean[j]) / (T - 1);
      }
    }
    std::vector<double> vecs;
    const auto vals = oracle::jacobi_eigen(cov, d, vecs);
    for (int k = 0; k < 2; ++k) worst_val = std::max(worst_val, rel(p.eigenvalues[k], vals[k]));
    double d00 = 0, d11 = 0, d01 = 0;
    for (std::size_t j = 0; j < d; ++j) {
      d00 += p.basis[0][j] * p.basis[0][j];
      d11 += p.basis[1][j] * p.basis[1][j];
      d01 += p.basis[0][j] * p.basis[1][j];
    }
    worst_orth = std::max({worst_orth, std::fabs(d00 - 1), std::fabs(d11 - 1), std::fabs(d01)});
  }

  std::vector<std::vector<double>> plane;
  for (int t = 0; t < 40; ++t) {
    std::vector<double> r(10);
    const double a = std::cos(0.2 * t) * (1.0 + 0.05 * t), b = std::sin(0.2 * t);
    for (std::size_t i = 0; i < 10; ++i) {
      r[i] = 0.1 * i + a * std::sin(1.0 + i) + b * std::cos(0.3 * static_cast<double>(i * i));
    }
    plane.push_back(r);
  }
  const Pca2 pp = pca_top2(TrajectoryMatrix::from_rows(plane));
  const double explained = pp.explained[0] + pp.explained[1];
  const bool ok = worst_val < 1e-8 && worst_orth < 1e-10 && explained >= 0.99999999;
  return {ok, fmt::format("20 random 20x8 matrices: eigenvalue error {:.2g}, orthonormality {:.2g}; "
                          "planar explained variance {:.12f}",
                          worst_val, worst_orth, explained)};
}

// ------------------------------------------------------------------ determinism

std::map<std::string, std::string> read_outputs(const fs::path& dir, const std::vector<std::string>& files) {
  std::map<std::string, std::string> out;
  for (const auto& f : files) {
    std::ifstream in(dir / f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[f] = ss.str();
  }
  return out;
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / ("frankopt_acceptance_" + std::to_string(::getpid()));
  std::string detail;
  bool ok = true;
  for (cli::Experiment e : cli::all_experiments()) {
    cli::ExperimentConfig c = cli::default_config(e);
    c.jobs = g_jobs;
    c.seed = 99;
    switch (e) {
      case cli::Experiment::demo1d:
        break;
      case cli::Experiment::minimize:
        c.problem = cli::parse_problem_tag("lj13", c.problem);
        break;
      case cli::Experiment::bench:
        c.problem = cli::parse_problem_tag("lj13", c.problem);
        c.seeds = 5;
        break;
      case cli::Experiment::overfit:
        c.seeds = 2;
        c.stop.max_steps = 500;
        break;
      case cli::Experiment::ablate:
        c.seeds = 2;
        c.stop.max_steps = 300;
        break;
      case cli::Experiment::landscape:
        c.stop.max_steps = 300;
        c.landscape.resolution = 11;
        break;
    }
    c.learning_rates.clear();
    cli::finalize(c);
    c.out = (root / cli::to_string(e)).string();
    std::ostringstream log;
    const auto first = cli::run_experiment(c, log);
    const auto a = read_outputs(c.out, first.files);
    fs::remove_all(c.out);
    const auto second = cli::run_experiment(c, log);
    const auto b = read_outputs(c.out, second.files);
    std::size_t data_files = 0;
    for (const auto& [name, text] : a) data_files += name.ends_with(".csv") || name.ends_with(".json");
    const bool same = first.exit_code == 0 && second.exit_code == 0 && a == b && data_files > 0;
    ok = ok && same;
    detail += fmt::format("{} {} files {}; ", cli::to_string(e), a.size(), same ? "identical" : "DIFFER");
  }
  if (detail.size() >= 2) detail.resize(detail.size() - 2);
  fs::remove_all(root);
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::size_t jobs = 1;
  bool strict = false;
  app.add_option("--jobs", jobs, "worker threads for the seeded benchmarks (0 = all cores)");
  app.add_flag("--strict", strict, "exit 1 when any criterion fails");
  CLI11_PARSE(app, argc, argv);
  g_jobs = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"update-rule trace oracle", trace_oracle},
      {"elementwise bounds", elementwise_bounds},
      {"xi fixed point", xi_fixed_point},
      {"gradient oracles", gradient_oracles},
      {"baseline rule equivalence", baseline_equivalence},
      {"LJ38 ranking", lj38_ranking},
      {"overfit test", overfit_test},
      {"ablation reduction bitwise", ablation_bitwise},
      {"PCA oracle", pca_oracle},
      {"determinism", determinism},
  };
  std::size_t failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !v.pass;
    std::cout << fmt::format("{} {}: {} [{:.1f}s]", v.pass ? "PASS" : "FAIL", name, v.detail, secs) << std::endl;
  }
  std::cout << fmt::format("{}/{} criteria passed", criteria.size() - failed, criteria.size()) << std::endl;
  return strict && failed > 0 ? 1 : 0;
}
