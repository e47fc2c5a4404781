#include "frankopt/harness/report_io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace frankopt {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

namespace {

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return format_real(*v);
  } else {
    return std::to_string(*v);
  }
}

// Quotes a CSV field when it contains a delimiter, quote or newline.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

nlohmann::ordered_json real(double x) {
  if (std::isfinite(x)) return x;
  return format_real(x);
}

template <class T>
nlohmann::ordered_json opt_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_floating_point_v<T>) {
    return real(*v);
  } else {
    return *v;
  }
}

nlohmann::ordered_json seed_json(const SeedResult& r) {
  nlohmann::ordered_json j;
  j["index"] = r.index;
  j["seed"] = r.seed;
  j["converged"] = r.converged;
  j["steps"] = r.steps;
  j["force_calls"] = r.force_calls;
  j["final_loss"] = real(r.final_loss);
  j["final_fmax"] = real(r.final_fmax);
  j["reason"] = r.reason;
  if (!r.error.empty()) j["error"] = r.error;
  if (!r.metrics.empty()) {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.metrics) m[k] = real(v);
    j["metrics"] = m;
  }
  return j;
}

}  // namespace

void write_runs_csv(std::ostream& out, const BenchmarkReport& report) {
  out << "optimizer,index,seed,converged,steps,force_calls,final_loss,final_fmax,reason";
  const auto* first = report.methods.empty() || report.methods[0].runs.empty() ? nullptr
                                                                                : &report.methods[0].runs[0];
  if (first) {
    for (const auto& [k, v] : first->metrics) out << ',' << k;
  }
  out << '\n';
  for (const auto& m : report.methods) {
    for (const auto& r : m.runs) {
      out << field(m.optimizer) << ',' << r.index << ',' << r.seed << ',' << (r.converged ? 1 : 0) << ','
          << r.steps << ',' << r.force_calls << ',' << format_real(r.final_loss) << ','
          << format_real(r.final_fmax) << ',' << r.reason;
      for (const auto& [k, v] : r.metrics) out << ',' << format_real(v);
      out << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const BenchmarkReport& report) {
  out << "optimizer,runs,converged,success_rate,mean_n,min_n,max_n,mean_steps,min_steps,max_steps\n";
  for (const auto& m : report.methods) {
    const Aggregates& a = m.summary;
    out << field(m.optimizer) << ',' << a.runs << ',' << a.converged << ',' << format_real(a.success_rate) << ','
        << opt(a.mean_force_calls) << ',' << opt(a.min_force_calls) << ',' << opt(a.max_force_calls) << ','
        << opt(a.mean_steps) << ',' << opt(a.min_steps) << ',' << opt(a.max_steps) << '\n';
  }
}

void write_trace_csv(std::ostream& out, const RunRecord& record) {
  out << "step,evaluations,lr,loss,full_loss,grad_norm,fmax,fallback,factor,factor_max,beta1,p_mean,"
         "rho_mean,beta2_mean,beta2_min,ratio_mean\n";
  for (const auto& s : record.log) {
    out << s.step << ',' << s.evaluations << ',' << format_real(s.lr) << ',' << format_real(s.loss) << ','
        << format_real(s.full_loss) << ',' << format_real(s.grad_norm) << ',' << format_real(s.fmax) << ','
        << (s.fallback ? 1 : 0);
    if (const auto& d = s.diagnostics) {
      out << ',' << format_real(d->factor) << ',' << format_real(d->factor_max) << ',' << format_real(d->beta1)
          << ',' << format_real(d->p_mean) << ',' << format_real(d->rho_mean) << ','
          << format_real(d->beta2_mean) << ',' << format_real(d->beta2_min) << ','
          << format_real(d->ratio_mean);
    } else {
      out << ",,,,,,,,";
    }
    out << '\n';
  }
}

void write_ablation_csv(std::ostream& out, const AblationTable& table) {
  out << "variant,flags,runs,converged,mean_final_loss,mean_n";
  if (!table.rows.empty()) {
    for (const auto& [k, v] : table.rows[0].mean_metrics) out << ",mean_" << k;
  }
  out << '\n';
  for (const auto& r : table.rows) {
    out << field(r.variant) << ',' << field(r.flags) << ',' << r.summary.runs << ',' << r.summary.converged
        << ',' << format_real(r.mean_final_loss) << ',' << opt(r.summary.mean_force_calls);
    for (const auto& [k, v] : r.mean_metrics) out << ',' << format_real(v);
    out << '\n';
  }
}

nlohmann::ordered_json to_json(const Aggregates& a) {
  nlohmann::ordered_json j;
  j["runs"] = a.runs;
  j["converged"] = a.converged;
  j["success_rate"] = real(a.success_rate);
  j["mean_n"] = opt_json(a.mean_force_calls);
  j["min_n"] = opt_json(a.min_force_calls);
  j["max_n"] = opt_json(a.max_force_calls);
  j["mean_steps"] = opt_json(a.mean_steps);
  j["min_steps"] = opt_json(a.min_steps);
  j["max_steps"] = opt_json(a.max_steps);
  return j;
}

nlohmann::ordered_json to_json(const BenchmarkReport& report) {
  nlohmann::ordered_json j;
  j["problem"] = report.problem;
  j["master_seed"] = report.master_seed;
  j["methods"] = nlohmann::ordered_json::array();
  for (const auto& m : report.methods) {
    nlohmann::ordered_json mj;
    mj["optimizer"] = m.optimizer;
    mj["summary"] = to_json(m.summary);
    mj["runs"] = nlohmann::ordered_json::array();
    for (const auto& r : m.runs) mj["runs"].push_back(seed_json(r));
    j["methods"].push_back(std::move(mj));
  }
  return j;
}

nlohmann::ordered_json to_json(const AblationTable& table) {
  nlohmann::ordered_json j;
  j["problem"] = table.problem;
  j["master_seed"] = table.master_seed;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    nlohmann::ordered_json rj;
    rj["variant"] = r.variant;
    rj["flags"] = r.flags;
    rj["summary"] = to_json(r.summary);
    rj["mean_final_loss"] = real(r.mean_final_loss);
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.mean_metrics) m[k] = real(v);
    rj["mean_metrics"] = m;
    rj["runs"] = nlohmann::ordered_json::array();
    for (const auto& s : r.runs) rj["runs"].push_back(seed_json(s));
    j["rows"].push_back(std::move(rj));
  }
  return j;
}

nlohmann::ordered_json to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["optimizer"] = r.optimizer;
  j["problem"] = r.problem;
  j["seed"] = r.seed;
  j["converged"] = r.converged;
  j["stop_reason"] = r.stop_reason;
  if (!r.error.empty()) j["error"] = r.error;
  j["steps"] = r.steps;
  j["force_calls"] = r.force_calls;
  j["line_search_probes"] = r.line_search_probes;
  j["fallbacks"] = r.fallbacks;
  j["initial_loss"] = real(r.initial_loss);
  j["final_loss"] = real(r.final_full_loss);
  j["final_fmax"] = real(r.final_fmax);
  return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace frankopt
