#include "frankopt/cli/config.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "frankopt/baselines/factory.hpp"
#include "frankopt/harness/ablation.hpp"
#include "frankopt/problems/lennard_jones.hpp"
#include "frankopt/problems/overfit.hpp"

namespace frankopt::cli {

namespace {

const std::vector<std::pair<Experiment, std::string>> kExperiments{
    {Experiment::demo1d, "demo1d"}, {Experiment::minimize, "minimize"}, {Experiment::bench, "bench"},
    {Experiment::overfit, "overfit"}, {Experiment::ablate, "ablate"},   {Experiment::landscape, "landscape"},
};

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [k, name] : kExperiments) {
    if (k == e) return name;
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(const std::string& tag) {
  for (const auto& [k, name] : kExperiments) {
    if (name == tag) return k;
  }
  return std::nullopt;
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& entry : kExperiments) v.push_back(entry.first);
    return v;
  }();
  return all;
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration:\n  " + join(problems, "\n  ")), problems_(std::move(problems)) {}

// ------------------------------------------------------------------ defaults

double default_learning_rate(Method method, const std::string& kind) {
  const bool lj = kind == "lj";
  switch (method) {
    case Method::frankenstein: return lj ? 7e-3 : 1e-3;
    case Method::sgd_nag: return lj ? 1e-4 : 1e-2;
    case Method::rmsprop:
    case Method::adam:
    case Method::amsgrad:
    case Method::adabound:
    case Method::padam:
    case Method::adabelief:
    case Method::lookahead_adam: return lj ? 1e-2 : 1e-3;
    case Method::steepest_descent: return lj ? 1e-2 : 1e-1;
    case Method::conjugate_gradient: return 1e-1;
    case Method::lbfgs: return 1.0;
    case Method::fire: return 0.1;
  }
  return 1e-3;
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::demo1d:
      c.seeds = 1;
      c.optimizers = {"frankenstein", "adam", "amsgrad", "adabelief"};
      c.problem.kind = "demo1d";
      c.stop.max_steps = 300;
      break;
    case Experiment::minimize:
      c.seeds = 1;
      c.optimizers = {"frankenstein"};
      c.stop.max_steps = 50000;
      c.stop.fmax_threshold = 1e-2;
      break;
    case Experiment::bench:
      c.seeds = 100;
      c.optimizers = {"frankenstein", "conjugate_gradient", "steepest_descent"};
      c.stop.max_steps = 50000;
      c.stop.fmax_threshold = 1e-2;
      break;
    case Experiment::overfit:
      c.seeds = 10;
      c.optimizers = {"frankenstein", "adam", "amsgrad"};
      c.problem.kind = "overfit";
      c.stop.max_steps = 5000;
      c.stop.loss_threshold = 1e-8;
      c.batch_sizes = {4, 128};
      break;
    case Experiment::ablate:
      c.seeds = 10;
      c.optimizers = {"frankenstein"};
      c.problem.kind = "overfit";
      c.problem.batch_size = 128;
      c.stop.max_steps = 5000;
      c.schedule.kind = ScheduleKind::step;
      c.schedule.factor = 0.1;
      c.schedule.interval = 2000;
      break;
    case Experiment::landscape:
      c.seeds = 1;
      c.optimizers = {"frankenstein", "adam"};
      c.problem.kind = "overfit";
      c.problem.batch_size = 128;
      c.stop.max_steps = 2000;
      c.landscape.metric = "test_loss";
      break;
  }
  finalize(c);
  return c;
}

// ------------------------------------------------------------------ codecs

namespace {

std::string real_text(double x) { return fmt::format("{}", x); }

void reject_negative(const YAML::Node& n) {
  if (n.IsScalar() && !n.Scalar().empty() && n.Scalar()[0] == '-') throw std::invalid_argument("must be non-negative");
}

template <class T>
struct Codec;

template <>
struct Codec<double> {
  static YAML::Node encode(double x) { return YAML::Node(real_text(x)); }
  static double decode(const YAML::Node& n) {
    if (!n.IsScalar()) throw std::invalid_argument("expected a number");
    double x;
    if (!YAML::convert<double>::decode(n, x)) throw std::invalid_argument("expected a number, got '" + n.Scalar() + "'");
    return x;
  }
};

template <>
struct Codec<bool> {
  static YAML::Node encode(bool b) { return YAML::Node(b ? "true" : "false"); }
  static bool decode(const YAML::Node& n) {
    bool b;
    if (!n.IsScalar() || !YAML::convert<bool>::decode(n, b)) throw std::invalid_argument("expected true or false");
    return b;
  }
};

template <class U>
struct UnsignedCodec {
  static YAML::Node encode(U x) { return YAML::Node(std::to_string(x)); }
  static U decode(const YAML::Node& n) {
    if (!n.IsScalar()) throw std::invalid_argument("expected a non-negative integer");
    reject_negative(n);
    U x;
    if (!YAML::convert<U>::decode(n, x)) {
      throw std::invalid_argument("expected a non-negative integer, got '" + n.Scalar() + "'");
    }
    return x;
  }
};

template <>
struct Codec<unsigned long> : UnsignedCodec<unsigned long> {};
template <>
struct Codec<unsigned long long> : UnsignedCodec<unsigned long long> {};

template <>
struct Codec<int> {
  static YAML::Node encode(int x) { return YAML::Node(std::to_string(x)); }
  static int decode(const YAML::Node& n) {
    int x;
    if (!n.IsScalar() || !YAML::convert<int>::decode(n, x)) throw std::invalid_argument("expected an integer");
    return x;
  }
};

template <>
struct Codec<std::string> {
  static YAML::Node encode(const std::string& s) { return YAML::Node(s); }
  static std::string decode(const YAML::Node& n) {
    if (!n.IsScalar()) throw std::invalid_argument("expected a string");
    return n.Scalar();
  }
};

template <class T>
struct Codec<std::optional<T>> {
  static YAML::Node encode(const std::optional<T>& x) { return x ? Codec<T>::encode(*x) : YAML::Node(YAML::NodeType::Null); }
  static std::optional<T> decode(const YAML::Node& n) {
    if (n.IsNull()) return std::nullopt;
    return Codec<T>::decode(n);
  }
};

template <class T>
struct Codec<std::vector<T>> {
  static YAML::Node encode(const std::vector<T>& v) {
    YAML::Node n(YAML::NodeType::Sequence);
    for (const auto& x : v) n.push_back(Codec<T>::encode(x));
    n.SetStyle(YAML::EmitterStyle::Flow);
    return n;
  }
  static std::vector<T> decode(const YAML::Node& n) {
    if (n.IsNull()) return {};
    if (!n.IsSequence()) throw std::invalid_argument("expected a list");
    std::vector<T> v;
    for (const auto& item : n) v.push_back(Codec<T>::decode(item));
    return v;
  }
};

template <>
struct Codec<Experiment> {
  static YAML::Node encode(Experiment e) { return YAML::Node(to_string(e)); }
  static Experiment decode(const YAML::Node& n) {
    const auto s = Codec<std::string>::decode(n);
    if (auto e = parse_experiment(s)) return *e;
    throw std::invalid_argument("unknown experiment '" + s + "'");
  }
};

template <>
struct Codec<ScheduleKind> {
  static YAML::Node encode(ScheduleKind k) { return YAML::Node(std::string(to_string(k))); }
  static ScheduleKind decode(const YAML::Node& n) {
    const auto s = Codec<std::string>::decode(n);
    if (auto k = parse_schedule_kind(s)) return *k;
    throw std::invalid_argument("unknown schedule kind '" + s + "' (constant, step, cosine)");
  }
};

struct Field {
  std::string key;
  std::string help;
  std::function<YAML::Node(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const YAML::Node&)> set;
};

template <class T, class Access>
Field make_field(std::string key, std::string help, Access access) {
  return Field{std::move(key), std::move(help),
               [access](const ExperimentConfig& c) {
                 return Codec<T>::encode(access(const_cast<ExperimentConfig&>(c)));
               },
               [access](ExperimentConfig& c, const YAML::Node& n) { access(c) = Codec<T>::decode(n); }};
}

#define FIELD(T, key, member, help) make_field<T>(key, help, [](ExperimentConfig& c) -> T& { return c.member; })

using u64 = std::uint64_t;
using usize = std::size_t;

const std::vector<Field>& fields() {
  static const std::vector<Field> all{
      FIELD(Experiment, "experiment", experiment, "demo1d | minimize | bench | overfit | ablate | landscape"),
      FIELD(u64, "seed", seed, "master seed; run k uses split_seed(seed, k)"),
      FIELD(usize, "seeds", seeds, "number of seeded runs per optimizer"),
      FIELD(usize, "jobs", jobs, "worker threads (results do not depend on it)"),
      FIELD(std::string, "out", out, "output directory; empty uses $FRANKOPT_OUT/<experiment>"),
      FIELD(std::vector<std::string>, "optimizers", optimizers, "method tags"),
      FIELD(std::string, "problem.kind", problem.kind, "lj | quadratic | rosenbrock | demo1d | overfit"),
      FIELD(usize, "problem.atoms", problem.atoms, "Lennard-Jones atom count"),
      FIELD(usize, "problem.dimension", problem.dimension, "quadratic / rosenbrock dimension"),
      FIELD(usize, "problem.patterns", problem.patterns, "overfit base patterns n (features 5n+3)"),
      FIELD(usize, "problem.train_samples", problem.train_samples, "overfit training rows"),
      FIELD(usize, "problem.test_samples", problem.test_samples, "overfit test rows"),
      FIELD(u64, "problem.data_seed", problem.data_seed, "overfit dataset seed"),
      FIELD(usize, "problem.batch_size", problem.batch_size, "minibatch rows, 0 = full batch"),
      FIELD(double, "problem.demo1d.period", problem.demo1d.period, "plateau spacing"),
      FIELD(double, "problem.demo1d.spike_width", problem.demo1d.spike_width, "half-width of each drop"),
      FIELD(double, "problem.demo1d.spike_depth", problem.demo1d.spike_depth, "height of each drop"),
      FIELD(double, "problem.demo1d.tilt", problem.demo1d.tilt, "downhill slope between plateaus"),
      FIELD(double, "problem.demo1d.start", problem.demo1d.start, "starting x"),
      FIELD(u64, "stop.max_steps", stop.max_steps, "optimizer step budget"),
      FIELD(std::optional<double>, "stop.loss_threshold", stop.loss_threshold, "converged when loss < value"),
      FIELD(std::optional<double>, "stop.fmax_threshold", stop.fmax_threshold, "converged when max per-atom force < value"),
      FIELD(std::optional<u64>, "stop.patience", stop.patience, "stop after this many steps without a new best loss"),
      FIELD(std::optional<u64>, "stop.max_evaluations", stop.max_evaluations, "gradient evaluation budget"),
      FIELD(ScheduleKind, "schedule.kind", schedule.kind, "constant | step | cosine"),
      FIELD(double, "schedule.factor", schedule.factor, "step decay multiplier"),
      FIELD(u64, "schedule.interval", schedule.interval, "steps between step decays"),
      FIELD(u64, "schedule.total_steps", schedule.total_steps, "cosine period"),
      FIELD(double, "schedule.min_factor", schedule.min_factor, "cosine floor multiplier"),
      FIELD(double, "frankenstein.epsilon", frankenstein.epsilon, "added to squared gradients"),
      FIELD(std::optional<double>, "frankenstein.fix_beta1", frankenstein.fix_beta1, "constant beta1"),
      FIELD(bool, "frankenstein.decouple_beta1_lr", frankenstein.decouple_beta1_lr, "beta1 from the base lr only"),
      FIELD(std::optional<double>, "frankenstein.fix_beta2", frankenstein.fix_beta2, "constant beta2"),
      FIELD(std::optional<double>, "frankenstein.beta2_floor", frankenstein.beta2_floor, "lower clip on dynamic beta2"),
      FIELD(bool, "frankenstein.disable_v", frankenstein.disable_v, "no second-moment scaling"),
      FIELD(bool, "frankenstein.disable_vmax", frankenstein.disable_vmax, "skip max(v_prev, x)"),
      FIELD(bool, "frankenstein.disable_v_ema", frankenstein.disable_v_ema, "skip the second-moment EMA"),
      FIELD(bool, "frankenstein.disable_rho", frankenstein.disable_rho, "rho = 1"),
      FIELD(bool, "frankenstein.disable_xi", frankenstein.disable_xi, "xi = 1"),
      FIELD(double, "baseline.beta1", baseline.beta1, "Adam-family first-moment decay"),
      FIELD(double, "baseline.beta2", baseline.beta2, "Adam-family second-moment decay"),
      FIELD(double, "baseline.epsilon", baseline.epsilon, "Adam-family denominator floor"),
      FIELD(double, "baseline.momentum", baseline.momentum, "SGD-NAG momentum"),
      FIELD(double, "baseline.rms_decay", baseline.rms_decay, "RMSProp smoothing"),
      FIELD(double, "baseline.final_lr", baseline.final_lr, "AdaBound final rate"),
      FIELD(double, "baseline.bound_gamma", baseline.bound_gamma, "AdaBound bound speed"),
      FIELD(double, "baseline.padam_p", baseline.padam_p, "Padam partial exponent"),
      FIELD(int, "baseline.sync_period", baseline.sync_period, "Lookahead k"),
      FIELD(double, "baseline.slow_step", baseline.slow_step, "Lookahead alpha"),
      FIELD(int, "baseline.lbfgs_memory", baseline.lbfgs_memory, "L-BFGS history pairs"),
      FIELD(double, "baseline.line_search.c1", baseline.line_search.c1, "sufficient decrease constant"),
      FIELD(double, "baseline.line_search.c2", baseline.line_search.c2, "L-BFGS curvature constant"),
      FIELD(double, "baseline.line_search.cg_c2", baseline.line_search.cg_c2, "CG curvature constant"),
      FIELD(int, "baseline.line_search.max_evaluations", baseline.line_search.max_evaluations, "probes per line search"),
      FIELD(double, "baseline.line_search.max_move", baseline.line_search.max_move, "largest coordinate move per step"),
      FIELD(bool, "baseline.line_search.exact", baseline.line_search.exact, "CG secant line search"),
      FIELD(bool, "baseline.line_search.cg_armijo_only", baseline.line_search.cg_armijo_only, "CG backtracking only"),
      FIELD(double, "baseline.fire.dt_max", baseline.fire.dt_max, "FIRE largest timestep"),
      FIELD(int, "baseline.fire.n_min", baseline.fire.n_min, "FIRE downhill steps before speed-up"),
      FIELD(double, "baseline.fire.f_inc", baseline.fire.f_inc, "FIRE timestep growth"),
      FIELD(double, "baseline.fire.f_dec", baseline.fire.f_dec, "FIRE timestep cut"),
      FIELD(double, "baseline.fire.alpha_start", baseline.fire.alpha_start, "FIRE initial mixing"),
      FIELD(double, "baseline.fire.f_alpha", baseline.fire.f_alpha, "FIRE mixing decay"),
      FIELD(double, "baseline.fire.max_move", baseline.fire.max_move, "FIRE largest coordinate move"),
      FIELD(std::vector<usize>, "overfit.batch_sizes", batch_sizes, "batch sizes compared by the overfit experiment"),
      FIELD(std::string, "ablation.preset", preset, "variant set (table5)"),
      FIELD(usize, "landscape.resolution", landscape.resolution, "grid points per axis"),
      FIELD(double, "landscape.scale", landscape.scale, "grid size relative to the trajectory box"),
      FIELD(u64, "landscape.snapshot_stride", landscape.snapshot_stride, "steps between parameter snapshots"),
      FIELD(bool, "landscape.shared_basis", landscape.shared_basis, "one PCA plane for all optimizers"),
      FIELD(std::string, "landscape.metric", landscape.metric, "loss | test_loss | test_accuracy"),
  };
  return all;
}

#undef FIELD

constexpr const char* kLearningRates = "learning_rates";

std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> parts;
  std::stringstream ss(key);
  std::string p;
  while (std::getline(ss, p, '.')) parts.push_back(p);
  return parts;
}

YAML::Node lookup(const YAML::Node& root, const std::string& key) {
  // yaml-cpp assignment writes through a node; reset() rebinds it.
  YAML::Node n;
  n.reset(root);
  for (const auto& part : split_key(key)) {
    if (!n.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    const YAML::Node child = static_cast<const YAML::Node&>(n)[part];
    if (!child.IsDefined()) return child;
    n.reset(child);
  }
  return n;
}

bool is_section(const std::string& path) {
  const std::string prefix = path + ".";
  return std::any_of(fields().begin(), fields().end(),
                     [&](const Field& f) { return f.key.compare(0, prefix.size(), prefix) == 0; });
}

bool is_field(const std::string& path) {
  return std::any_of(fields().begin(), fields().end(), [&](const Field& f) { return f.key == path; });
}

void find_unknown(const YAML::Node& node, const std::string& path, std::vector<std::string>& problems) {
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    const std::string full = path.empty() ? key : path + "." + key;
    if (full == kLearningRates || is_field(full)) continue;
    if (is_section(full)) {
      if (kv.second.IsMap()) {
        find_unknown(kv.second, full, problems);
      } else if (!kv.second.IsNull()) {
        problems.push_back(full + ": expected a table");
      }
      continue;
    }
    problems.push_back("unknown key '" + full + "'");
  }
}

std::vector<Method> selected_methods(const ExperimentConfig& c) {
  std::vector<Method> out;
  for (const auto& tag : c.optimizers) {
    if (auto m = parse_method(tag)) out.push_back(*m);
  }
  if (c.experiment == Experiment::ablate) out = {Method::frankenstein};
  return out;
}

}  // namespace

// ------------------------------------------------------------------ parsing

static ExperimentConfig apply_yaml(const ExperimentConfig& base, const std::string& yaml_text,
                                   std::vector<std::string>* collected) {
  std::vector<std::string> problems;
  ExperimentConfig c = base;
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    problems.push_back(std::string("unreadable YAML: ") + e.what());
  }
  if (problems.empty() && root.IsDefined() && !root.IsNull()) {
    if (!root.IsMap()) {
      problems.push_back("top level must be a table of keys");
    } else {
      find_unknown(root, "", problems);
      for (const auto& f : fields()) {
        const YAML::Node n = lookup(root, f.key);
        if (!n.IsDefined()) continue;
        try {
          f.set(c, n);
        } catch (const std::exception& e) {
          problems.push_back(f.key + ": " + e.what());
        }
      }
      const YAML::Node rates = root[kLearningRates];
      if (rates.IsDefined() && !rates.IsNull()) {
        if (!rates.IsMap()) {
          problems.push_back(std::string(kLearningRates) + ": expected a table of method: rate");
        } else {
          // A rates table replaces the defaults; finalize() fills the gaps.
          c.learning_rates.clear();
          for (const auto& kv : rates) {
            const std::string tag = kv.first.as<std::string>();
            const auto method = parse_method(tag);
            if (!method) {
              problems.push_back(std::string(kLearningRates) + "." + tag + ": unknown method");
              continue;
            }
            try {
              c.learning_rates[std::string(to_string(*method))] = Codec<double>::decode(kv.second);
            } catch (const std::exception& e) {
              problems.push_back(std::string(kLearningRates) + "." + tag + ": " + e.what());
            }
          }
        }
      }
    }
  }
  if (collected) {
    collected->insert(collected->end(), problems.begin(), problems.end());
  } else if (!problems.empty()) {
    throw ConfigError(problems);
  }
  return c;
}

ExperimentConfig apply_yaml(const ExperimentConfig& base, const std::string& yaml_text) {
  std::vector<std::string> problems;
  ExperimentConfig c = apply_yaml(base, yaml_text, &problems);
  if (!problems.empty()) {
    for (const auto& v : validate(c)) problems.push_back(v);
    throw ConfigError(problems);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Experiment> expected) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file " + path.string()});
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<std::string> problems;
  Experiment kind = expected.value_or(Experiment::bench);
  try {
    const YAML::Node root = YAML::Load(text);
    if (root.IsMap() && root["experiment"]) {
      const auto e = parse_experiment(root["experiment"].as<std::string>());
      if (!e) {
        problems.push_back("experiment: unknown experiment '" + root["experiment"].as<std::string>() + "'");
      } else if (expected && *e != *expected) {
        problems.push_back("experiment: file says '" + to_string(*e) + "' but the command is '" +
                           to_string(*expected) + "'");
      } else {
        kind = *e;
      }
    }
  } catch (const YAML::Exception&) {
    // apply_yaml reports the parse error.
  }
  ExperimentConfig base = default_config(kind);
  base.learning_rates.clear();
  ExperimentConfig c = apply_yaml(base, text, &problems);
  c.experiment = kind;
  if (!problems.empty()) {
    for (const auto& v : validate(c)) problems.push_back(v);
    throw ConfigError(problems);
  }
  return c;
}

// ------------------------------------------------------------------ validation

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> p;
  auto check = [&p](const std::string& where, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      p.push_back(where + ": " + e.what());
    }
  };

  if (c.optimizers.empty() && c.experiment != Experiment::ablate) p.push_back("no optimizers selected");
  for (const auto& tag : c.optimizers) {
    if (!parse_method(tag)) p.push_back("optimizers: unknown method '" + tag + "'");
  }
  for (const auto& [tag, lr] : c.learning_rates) {
    if (!(lr > 0.0 && std::isfinite(lr))) p.push_back(std::string(kLearningRates) + "." + tag + ": must be positive");
  }
  if (c.seeds < 1) p.push_back("seeds: must be >= 1");
  if (c.jobs < 1) p.push_back("jobs: must be >= 1");

  const auto& pr = c.problem;
  static const std::set<std::string> kinds{"lj", "quadratic", "rosenbrock", "demo1d", "overfit"};
  if (!kinds.count(pr.kind)) {
    p.push_back("problem.kind: unknown problem '" + pr.kind + "'");
  } else {
    check("problem", [&] { make_problem(pr); });
  }
  if (pr.batch_size > 0 && pr.kind != "overfit") p.push_back("problem.batch_size: only the overfit problem has samples");
  if (pr.batch_size > pr.train_samples) p.push_back("problem.batch_size: exceeds problem.train_samples");

  check("stop", [&] { c.stop.validate(); });
  check("schedule", [&] { c.schedule.validate(); });
  check("frankenstein", [&] {
    FrankensteinConfig f = c.frankenstein;
    f.base_lr = 1e-3;
    f.validate();
  });
  check("baseline", [&] {
    BaselineConfig b = c.baseline;
    b.lr = 1e-3;
    b.fire.dt = std::min(b.fire.dt, b.fire.dt_max);
    b.validate();
  });
  for (Method m : selected_methods(c)) {
    const std::string tag(to_string(m));
    const auto it = c.learning_rates.find(tag);
    if (it == c.learning_rates.end() || !(it->second > 0.0)) continue;
    check(std::string(kLearningRates) + "." + tag, [&] {
      if (m == Method::fire && it->second > c.baseline.fire.dt_max) {
        throw std::invalid_argument("FIRE timestep exceeds baseline.fire.dt_max");
      }
    });
  }

  switch (c.experiment) {
    case Experiment::demo1d:
      if (pr.kind != "demo1d") p.push_back("problem.kind: the demo1d experiment needs problem.kind demo1d");
      break;
    case Experiment::overfit:
      if (pr.kind != "overfit") p.push_back("problem.kind: the overfit experiment needs problem.kind overfit");
      if (c.batch_sizes.empty()) p.push_back("overfit.batch_sizes: at least one batch size is required");
      for (std::size_t b : c.batch_sizes) {
        if (b > pr.train_samples) p.push_back("overfit.batch_sizes: " + std::to_string(b) + " exceeds problem.train_samples");
      }
      break;
    case Experiment::ablate:
      check("ablation.preset", [&] { ablation_preset(c.preset, {}); });
      break;
    case Experiment::landscape: {
      const auto& l = c.landscape;
      if (l.resolution < 2) p.push_back("landscape.resolution: must be >= 2");
      if (!(l.scale > 0.0)) p.push_back("landscape.scale: must be positive");
      if (l.snapshot_stride < 1) p.push_back("landscape.snapshot_stride: must be >= 1");
      if (l.metric != "loss" && l.metric != "test_loss" && l.metric != "test_accuracy") {
        p.push_back("landscape.metric: unknown metric '" + l.metric + "'");
      } else if (l.metric != "loss" && pr.kind != "overfit") {
        p.push_back("landscape.metric: " + l.metric + " needs the overfit problem");
      }
      if (pr.kind == "demo1d") p.push_back("problem.kind: a landscape needs at least two parameters");
      break;
    }
    default:
      break;
  }
  return p;
}

void finalize(ExperimentConfig& c) {
  std::vector<std::string> canonical;
  for (const auto& tag : c.optimizers) {
    const auto m = parse_method(tag);
    canonical.push_back(m ? std::string(to_string(*m)) : tag);
  }
  c.optimizers = canonical;
  if (c.experiment == Experiment::ablate) c.optimizers = {"frankenstein"};
  for (Method m : selected_methods(c)) {
    c.learning_rates.try_emplace(std::string(to_string(m)), default_learning_rate(m, c.problem.kind));
  }
  const auto problems = validate(c);
  if (!problems.empty()) throw ConfigError(problems);
}

// ------------------------------------------------------------------ output

std::string to_yaml(const ExperimentConfig& c) {
  YAML::Node root(YAML::NodeType::Map);
  for (const auto& f : fields()) {
    const auto parts = split_key(f.key);
    if (parts.size() == 1) {
      root[parts[0]] = f.get(c);
      if (parts[0] == "optimizers") {
        YAML::Node rates(YAML::NodeType::Map);
        for (const auto& [tag, lr] : c.learning_rates) rates[tag] = Codec<double>::encode(lr);
        root[kLearningRates] = rates;
      }
      continue;
    }
    YAML::Node n;
    n.reset(root);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      if (!n[parts[i]]) n[parts[i]] = YAML::Node(YAML::NodeType::Map);
      n.reset(n[parts[i]]);
    }
    n[parts.back()] = f.get(c);
  }
  YAML::Emitter out;
  out << root;
  return std::string(out.c_str()) + "\n";
}

std::string key_reference() {
  const ExperimentConfig base = default_config(Experiment::bench);
  auto text = [](const YAML::Node& n) {
    YAML::Emitter e;
    e << YAML::Flow << n;
    return std::string(e.c_str());
  };
  std::string out = "Config keys (YAML; nested tables follow the dots). Defaults shown for bench:\n";
  for (const auto& f : fields()) {
    out += fmt::format("  {:<38} {:<22} {}\n", f.key, text(f.get(base)), f.help);
    if (f.key == "optimizers") {
      out += fmt::format("  {:<38} {:<22} {}\n", "learning_rates.<method>", "per method/problem",
                         "base learning rate (FIRE: initial timestep)");
    }
  }
  out += "Per-experiment defaults that differ from bench:\n";
  for (Experiment e : all_experiments()) {
    if (e == Experiment::bench) continue;
    const ExperimentConfig d = default_config(e);
    std::vector<std::string> diffs;
    for (const auto& f : fields()) {
      if (f.key == "experiment") continue;
      const std::string a = text(f.get(d)), b = text(f.get(base));
      if (a != b) diffs.push_back(f.key + "=" + a);
    }
    out += "  " + to_string(e) + ": " + join(diffs, ", ") + "\n";
  }
  out += "Default learning rates: frankenstein 1e-3 (lj: 7e-3); adam family 1e-3 (lj: 1e-2);\n"
         "  sgd_nag 1e-2 (lj: 1e-4); steepest_descent 0.1 (lj: 1e-2); conjugate_gradient 0.1;\n"
         "  lbfgs 1; fire 0.1.\n";
  out += "Methods:";
  for (Method m : all_methods()) out += " " + std::string(to_string(m));
  out += "\n";
  return out;
}

// ------------------------------------------------------------------ construction

ProblemConfig parse_problem_tag(const std::string& tag, ProblemConfig base) {
  if (tag.size() > 2 && tag.compare(0, 2, "lj") == 0 &&
      std::all_of(tag.begin() + 2, tag.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
    base.kind = "lj";
    base.atoms = std::stoul(tag.substr(2));
    return base;
  }
  base.kind = tag;
  return base;
}

std::unique_ptr<Problem> make_problem(const ProblemConfig& p) {
  if (p.kind == "lj") return std::make_unique<LennardJonesCluster>(p.atoms);
  if (p.kind == "quadratic") return std::make_unique<Quadratic>(p.dimension);
  if (p.kind == "rosenbrock") return std::make_unique<Rosenbrock>(p.dimension);
  if (p.kind == "demo1d") return std::make_unique<Demo1d>(p.demo1d);
  if (p.kind == "overfit") {
    return std::make_unique<OverfitProblem>(p.patterns, p.train_samples, p.test_samples, p.data_seed);
  }
  throw std::invalid_argument("unknown problem '" + p.kind + "'");
}

std::vector<OptimizerSpec> make_specs(const ExperimentConfig& c) {
  std::vector<OptimizerSpec> specs;
  for (Method m : selected_methods(c)) {
    const std::string tag(to_string(m));
    const auto it = c.learning_rates.find(tag);
    const double lr = it != c.learning_rates.end() ? it->second : default_learning_rate(m, c.problem.kind);
    OptimizerSpec s = OptimizerSpec::of(m, c.baseline, lr);
    if (m == Method::frankenstein) {
      s.frankenstein = c.frankenstein;
      s.frankenstein.base_lr = lr;
    }
    specs.push_back(std::move(s));
  }
  return specs;
}

std::filesystem::path output_directory(const ExperimentConfig& c) {
  if (!c.out.empty()) return c.out;
  const char* root = std::getenv(kOutputRootEnv);
  const std::filesystem::path base = (root && *root) ? root : "frankopt_out";
  return base / to_string(c.experiment);
}

}  // namespace frankopt::cli
