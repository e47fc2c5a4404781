#include "frankopt/cli/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>

#include "frankopt/analysis/landscape.hpp"
#include "frankopt/analysis/pca.hpp"
#include "frankopt/analysis/trace.hpp"
#include "frankopt/core/random.hpp"
#include "frankopt/harness/ablation.hpp"
#include "frankopt/harness/benchmark.hpp"
#include "frankopt/harness/report_io.hpp"
#include "frankopt/problems/lennard_jones.hpp"
#include "frankopt/problems/overfit.hpp"
#include "frankopt/problems/xyz.hpp"

namespace frankopt::cli {

using Json = nlohmann::ordered_json;

namespace {

// Peaks of the adaptive factor are counted above this level.
constexpr double kPeakThreshold = 1.3;

Json real(double x) {
  if (std::isfinite(x)) return x;
  return format_real(x);
}

class Writer {
 public:
  explicit Writer(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void text(const std::string& name, const std::string& body) {
    write_text_file(dir_ / name, body);
    files_.push_back(name);
  }
  template <class Fn>
  void stream(const std::string& name, Fn&& fn) {
    std::ostringstream out;
    fn(out);
    text(name, out.str());
  }
  void json(const std::string& name, const Json& j) { text(name, j.dump(2) + "\n"); }

  const std::filesystem::path& dir() const { return dir_; }
  std::vector<std::string>& files() { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

BenchmarkOptions bench_options(const ExperimentConfig& c) {
  BenchmarkOptions o;
  o.master_seed = c.seed;
  o.seeds = c.seeds;
  o.jobs = c.jobs;
  o.run.batch_size = c.problem.batch_size;
  return o;
}

std::size_t count_errors(const BenchmarkReport& r) {
  std::size_t n = 0;
  for (const auto& m : r.methods) {
    n += std::count_if(m.runs.begin(), m.runs.end(), [](const SeedResult& s) { return s.reason == "error"; });
  }
  return n;
}

void print_summary(std::ostream& log, const BenchmarkReport& r) {
  for (const auto& m : r.methods) {
    const auto& a = m.summary;
    log << fmt::format("  {:<20} converged {}/{}", m.optimizer, a.converged, a.runs);
    if (a.mean_force_calls) {
      log << fmt::format("  mean N {:.1f}  min {}  max {}", *a.mean_force_calls, *a.min_force_calls, *a.max_force_calls);
    }
    log << "\n";
  }
}

std::string metric_value_mean(const MethodReport& m, const std::string& key, double* out) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : m.runs) {
    for (const auto& [k, v] : r.metrics) {
      if (k == key) {
        sum += v;
        ++n;
      }
    }
  }
  *out = n ? sum / static_cast<double>(n) : 0.0;
  return n ? format_real(*out) : "";
}

// ------------------------------------------------------------------ experiments

struct Status {
  std::size_t failed_runs = 0;
  Json extra = Json::object();
};

Status demo1d(const ExperimentConfig& c, const Problem& problem, Writer& w, std::ostream& log) {
  const auto specs = make_specs(c);
  const std::uint64_t seed = run_seeds(c.seed, 1)[0];
  std::vector<RunRecord> records(specs.size());
  parallel_for(specs.size(), c.jobs, [&](std::size_t i) {
    records[i] = run_single(specs[i], problem, c.schedule, c.stop, seed);
  });

  Status st;
  Json runs = Json::array();
  for (const auto& rec : records) {
    w.stream("trace_" + rec.optimizer + ".csv", [&](std::ostream& o) { write_trace_csv(o, rec); });
    Json j = to_json(rec);
    if (rec.stop_reason != "error") {
      const AdaptiveTrace t = adaptive_factor_trace(rec);
      const auto peaks = find_peaks(t.factor, kPeakThreshold);
      Json pj = Json::array();
      for (std::size_t p : peaks) pj.push_back({{"step", t.steps[p]}, {"factor", real(t.factor[p])}});
      j["factor_peaks"] = pj;
      j["final_factor"] = t.size() ? real(t.factor.back()) : Json(nullptr);
      log << fmt::format("  {:<12} x = {:.6f}  loss {:.6g}  factor peaks {}\n", rec.optimizer,
                         rec.final_theta.empty() ? 0.0 : rec.final_theta[0], rec.final_loss, peaks.size());
    } else {
      ++st.failed_runs;
    }
    runs.push_back(j);
  }
  w.json("demo1d.json", Json{{"problem", problem.name()}, {"seed", seed}, {"runs", runs}});
  return st;
}

Status minimize(const ExperimentConfig& c, const Problem& problem, Writer& w, std::ostream& log) {
  const auto specs = make_specs(c);
  const auto seeds = run_seeds(c.seed, c.seeds);
  const std::size_t tasks = specs.size() * seeds.size();
  std::vector<RunRecord> records(tasks);
  RunOptions ro;
  ro.batch_size = c.problem.batch_size;
  parallel_for(tasks, c.jobs, [&](std::size_t t) {
    const std::size_t o = t / seeds.size(), k = t % seeds.size();
    RunOptions mine = ro;
    mine.keep_log = k == 0;
    records[t] = run_single(specs[o], problem, c.schedule, c.stop, seeds[k], mine);
  });

  BenchmarkReport report;
  report.problem = problem.name();
  report.master_seed = c.seed;
  const auto* lj = dynamic_cast<const LennardJonesCluster*>(&problem);
  for (std::size_t o = 0; o < specs.size(); ++o) {
    MethodReport m;
    m.optimizer = specs[o].label;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const RunRecord& rec = records[o * seeds.size() + k];
      SeedResult s = summarize(rec, k);
      s.metrics = default_metrics(problem, rec.final_theta);
      m.runs.push_back(std::move(s));
    }
    m.summary = aggregate(m.runs);
    const RunRecord& first = records[o * seeds.size()];
    w.stream("trace_" + m.optimizer + ".csv", [&](std::ostream& out) { write_trace_csv(out, first); });
    if (lj && !first.final_theta.empty()) {
      AtomicCluster cluster{first.final_theta, first.force_calls};
      w.stream("final_" + m.optimizer + ".xyz", [&](std::ostream& out) {
        write_xyz(out, cluster, fmt::format("{} seed={} E={}", m.optimizer, first.seed, format_real(first.final_loss)));
      });
    }
    report.methods.push_back(std::move(m));
  }
  w.stream("runs.csv", [&](std::ostream& o) { write_runs_csv(o, report); });
  w.stream("summary.csv", [&](std::ostream& o) { write_summary_csv(o, report); });
  w.json("report.json", to_json(report));
  print_summary(log, report);
  return Status{count_errors(report)};
}

Status bench(const ExperimentConfig& c, const Problem& problem, Writer& w, std::ostream& log) {
  const BenchmarkReport report = run_benchmark(make_specs(c), problem, c.stop, c.schedule, bench_options(c));
  w.stream("runs.csv", [&](std::ostream& o) { write_runs_csv(o, report); });
  w.stream("summary.csv", [&](std::ostream& o) { write_summary_csv(o, report); });
  w.json("report.json", to_json(report));
  print_summary(log, report);
  return Status{count_errors(report)};
}

Status overfit(const ExperimentConfig& c, const Problem& problem, Writer& w, std::ostream& log) {
  const auto specs = make_specs(c);
  Status st;
  Json batches = Json::array();
  std::ostringstream cmp;
  cmp << "batch_size,optimizer,runs,converged,mean_final_loss,mean_train_loss,mean_test_loss,mean_test_accuracy\n";
  for (std::size_t bs : c.batch_sizes) {
    BenchmarkOptions o = bench_options(c);
    o.run.batch_size = bs;
    log << fmt::format("batch size {}\n", bs);
    const BenchmarkReport report = run_benchmark(specs, problem, c.stop, c.schedule, o);
    st.failed_runs += count_errors(report);
    w.stream(fmt::format("runs_bs{}.csv", bs), [&](std::ostream& out) { write_runs_csv(out, report); });
    w.stream(fmt::format("summary_bs{}.csv", bs), [&](std::ostream& out) { write_summary_csv(out, report); });
    for (const auto& m : report.methods) {
      double final_sum = 0.0;
      for (const auto& r : m.runs) final_sum += r.final_loss;
      double train = 0.0, test = 0.0, acc = 0.0;
      const std::string tr = metric_value_mean(m, "train_loss", &train);
      const std::string te = metric_value_mean(m, "test_loss", &test);
      const std::string ac = metric_value_mean(m, "test_accuracy", &acc);
      cmp << bs << "," << m.optimizer << "," << m.summary.runs << "," << m.summary.converged << ","
          << format_real(final_sum / static_cast<double>(std::max<std::size_t>(m.runs.size(), 1))) << "," << tr
          << "," << te << "," << ac << "\n";
      log << fmt::format("  {:<12} converged {}/{}  train {:.3g}  test {:.4g}  acc {:.4f}\n", m.optimizer,
                         m.summary.converged, m.summary.runs, train, test, acc);
    }
    Json j = to_json(report);
    j["batch_size"] = bs;
    batches.push_back(j);
  }
  w.text("comparison.csv", cmp.str());
  w.json("report.json", Json{{"problem", problem.name()}, {"master_seed", c.seed}, {"batches", batches}});
  return st;
}

Status ablate(const ExperimentConfig& c, const Problem& problem, Writer& w, std::ostream& log) {
  FrankensteinConfig base = make_specs(c).front().frankenstein;
  const auto variants = ablation_preset(c.preset, base);
  const AblationTable table = run_ablation(variants, problem, c.stop, c.schedule, bench_options(c));
  w.stream("ablation.csv", [&](std::ostream& o) { write_ablation_csv(o, table); });
  w.json("ablation.json", to_json(table));
  Status st;
  for (const auto& row : table.rows) {
    double test = 0.0;
    for (const auto& [k, v] : row.mean_metrics) {
      if (k == "test_loss") test = v;
    }
    log << fmt::format("  {:<18} {:<28} final loss {:.4g}  test loss {:.4g}\n", row.variant, row.flags,
                       row.mean_final_loss, test);
    st.failed_runs += std::count_if(row.runs.begin(), row.runs.end(),
                                    [](const SeedResult& s) { return s.reason == "error"; });
  }
  return st;
}

LandscapeMetric landscape_metric(const std::string& name, const Problem& problem) {
  if (name == "loss") return loss_metric(problem);
  const auto* of = dynamic_cast<const OverfitProblem*>(&problem);
  if (!of) throw std::invalid_argument("metric " + name + " needs the overfit problem");
  if (name == "test_loss") return [of](std::span<const double> w) { return of->test_loss(w); };
  return [of](std::span<const double> w) { return of->test_accuracy(w); };
}

void write_grid(Writer& w, const std::string& stem, const LandscapeGrid& g, const RunRecord& rec) {
  w.stream(stem + "_grid.csv", [&](std::ostream& o) {
    o << "i,j,a,b,value\n";
    for (std::size_t i = 0; i < g.resolution; ++i) {
      for (std::size_t j = 0; j < g.resolution; ++j) {
        o << i << "," << j << "," << format_real(g.a_axis[j]) << "," << format_real(g.b_axis[i]) << ","
          << format_real(g.at(i, j)) << "\n";
      }
    }
  });
  w.stream(stem + "_path.csv", [&](std::ostream& o) {
    o << "step,a,b\n";
    for (std::size_t k = 0; k < g.trajectory.size(); ++k) {
      o << rec.snapshot_steps[k] << "," << format_real(g.trajectory[k][0]) << "," << format_real(g.trajectory[k][1])
        << "\n";
    }
  });
}

Json grid_json(const LandscapeGrid& g) {
  return Json{{"eigenvalues", {real(g.pca.eigenvalues[0]), real(g.pca.eigenvalues[1])}},
              {"explained", {real(g.pca.explained[0]), real(g.pca.explained[1])}},
              {"total_variance", real(g.pca.total_variance)},
              {"basis_hash", fmt::format("{:016x}", basis_hash(g.pca))},
              {"extents", {real(g.extents.a_min), real(g.extents.a_max), real(g.extents.b_min), real(g.extents.b_max)}},
              {"resolution", g.resolution}};
}

Status landscape(const ExperimentConfig& c, const Problem& problem, Writer& w, std::ostream& log) {
  const auto specs = make_specs(c);
  const std::uint64_t seed = run_seeds(c.seed, 1)[0];
  RunOptions ro;
  ro.batch_size = c.problem.batch_size;
  ro.snapshot_stride = c.landscape.snapshot_stride;
  ro.keep_log = false;
  std::vector<RunRecord> records(specs.size());
  parallel_for(specs.size(), c.jobs, [&](std::size_t i) {
    records[i] = run_single(specs[i], problem, c.schedule, c.stop, seed, ro);
  });

  Status st;
  for (const auto& rec : records) {
    if (rec.stop_reason == "error") ++st.failed_runs;
  }
  const LandscapeMetric metric = landscape_metric(c.landscape.metric, problem);
  LandscapeOptions lo;
  lo.scale = c.landscape.scale;
  lo.resolution = c.landscape.resolution;
  lo.jobs = c.jobs;

  Json out{{"problem", problem.name()}, {"seed", seed}, {"metric", c.landscape.metric},
           {"shared_basis", c.landscape.shared_basis}};
  Json per = Json::array();
  if (c.landscape.shared_basis) {
    std::vector<std::vector<double>> all;
    for (const auto& rec : records) all.insert(all.end(), rec.snapshots.begin(), rec.snapshots.end());
    const TrajectoryMatrix joint = TrajectoryMatrix::from_rows(all, c.landscape.snapshot_stride);
    const Pca2 pca = pca_top2(joint);
    const LandscapeGrid g = landscape_grid(pca, joint, metric, lo);
    w.stream("shared_grid.csv", [&](std::ostream& o) {
      o << "i,j,a,b,value\n";
      for (std::size_t i = 0; i < g.resolution; ++i) {
        for (std::size_t j = 0; j < g.resolution; ++j) {
          o << i << "," << j << "," << format_real(g.a_axis[j]) << "," << format_real(g.b_axis[i]) << ","
            << format_real(g.at(i, j)) << "\n";
        }
      }
    });
    out["plane"] = grid_json(g);
    for (const auto& rec : records) {
      w.stream(rec.optimizer + "_path.csv", [&](std::ostream& o) {
        o << "step,a,b\n";
        for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
          const auto p = pca.project(rec.snapshots[k]);
          o << rec.snapshot_steps[k] << "," << format_real(p[0]) << "," << format_real(p[1]) << "\n";
        }
      });
      per.push_back(Json{{"optimizer", rec.optimizer}, {"run", to_json(rec)}});
    }
  } else {
    for (const auto& rec : records) {
      const TrajectoryMatrix snaps = TrajectoryMatrix::from_rows(rec.snapshots, c.landscape.snapshot_stride);
      const Pca2 pca = pca_top2(snaps);
      const LandscapeGrid g = landscape_grid(pca, snaps, metric, lo);
      write_grid(w, rec.optimizer, g, rec);
      per.push_back(Json{{"optimizer", rec.optimizer}, {"run", to_json(rec)}, {"plane", grid_json(g)}});
      log << fmt::format("  {:<12} explained {:.4f} + {:.4f}  final loss {:.4g}\n", rec.optimizer,
                         pca.explained[0], pca.explained[1], rec.final_full_loss);
    }
  }
  out["optimizers"] = per;
  w.json("landscape.json", out);
  return st;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& c, std::ostream& log) {
  ExperimentOutcome outcome;
  outcome.directory = output_directory(c);
  Writer w(outcome.directory);

  Json manifest;
  manifest["tool"] = "frankopt";
  manifest["version"] = kToolVersion;
  manifest["experiment"] = to_string(c.experiment);
  manifest["master_seed"] = c.seed;
  manifest["seed_rule"] = "run k uses mix64(master ^ mix64(k)) with the splitmix64 finalizer";
  Json seeds = Json::array();
  const bool single = c.experiment == Experiment::demo1d || c.experiment == Experiment::landscape;
  for (std::uint64_t s : run_seeds(c.seed, single ? 1 : c.seeds)) seeds.push_back(s);
  manifest["run_seeds"] = seeds;

  const std::string yaml = to_yaml(c);
  w.text("config.yaml", yaml);
  log << fmt::format("{}: writing to {}\n", to_string(c.experiment), outcome.directory.string());

  Status st;
  try {
    const auto problem = make_problem(c.problem);
    switch (c.experiment) {
      case Experiment::demo1d: st = demo1d(c, *problem, w, log); break;
      case Experiment::minimize: st = minimize(c, *problem, w, log); break;
      case Experiment::bench: st = bench(c, *problem, w, log); break;
      case Experiment::overfit: st = overfit(c, *problem, w, log); break;
      case Experiment::ablate: st = ablate(c, *problem, w, log); break;
      case Experiment::landscape: st = landscape(c, *problem, w, log); break;
    }
    if (st.failed_runs > 0) {
      outcome.exit_code = 1;
      outcome.error = fmt::format("{} run(s) stopped with an error; see the reason column", st.failed_runs);
    }
  } catch (const std::exception& e) {
    outcome.exit_code = 1;
    outcome.error = e.what();
  }

  manifest["status"] = outcome.exit_code == 0 ? "ok" : "error";
  manifest["error"] = outcome.error.empty() ? Json(nullptr) : Json(outcome.error);
  manifest["failed_runs"] = st.failed_runs;
  manifest["files"] = w.files();
  manifest["config"] = yaml;
  w.json("manifest.json", manifest);
  outcome.files = w.files();
  return outcome;
}

}  // namespace frankopt::cli
