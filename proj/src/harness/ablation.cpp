#include "frankopt/harness/ablation.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace frankopt {

std::vector<AblationVariant> table5_variants(const FrankensteinConfig& base) {
  std::vector<AblationVariant> v;
  v.push_back({"full", base});
  v.push_back({"decouple_beta_lr", base});
  v.back().config.decouple_beta1_lr = true;
  v.push_back({"without_v", base});
  v.back().config.disable_v = true;
  v.push_back({"fix_beta2", base});
  v.back().config.fix_beta2 = 0.999;
  v.push_back({"fix_beta1", base});
  v.back().config.fix_beta1 = 0.9;
  v.push_back({"without_vmax", base});
  v.back().config.disable_vmax = true;
  v.push_back({"without_v_ema", base});
  v.back().config.disable_v_ema = true;
  return v;
}

std::vector<AblationVariant> ablation_preset(const std::string& preset, const FrankensteinConfig& base) {
  if (preset == "table5") return table5_variants(base);
  throw std::invalid_argument("unknown ablation preset '" + preset + "' (known: table5)");
}

std::string describe_flags(const FrankensteinConfig& c) {
  std::string out;
  auto add = [&](const std::string& s) { out += out.empty() ? s : " " + s; };
  if (c.fix_beta1) add(fmt::format("fix_beta1={}", *c.fix_beta1));
  if (c.decouple_beta1_lr) add("decouple_beta1_lr");
  if (c.fix_beta2) add(fmt::format("fix_beta2={}", *c.fix_beta2));
  if (c.beta2_floor) add(fmt::format("beta2_floor={}", *c.beta2_floor));
  if (c.disable_v) add("disable_v");
  if (c.disable_vmax) add("disable_vmax");
  if (c.disable_v_ema) add("disable_v_ema");
  if (c.disable_rho) add("disable_rho");
  if (c.disable_xi) add("disable_xi");
  return out.empty() ? "none" : out;
}

const AblationRow* AblationTable::find(const std::string& variant) const {
  for (const auto& r : rows) {
    if (r.variant == variant) return &r;
  }
  return nullptr;
}

AblationTable run_ablation(const std::vector<AblationVariant>& variants, const Problem& problem,
                           const StopRule& stop, const Schedule& schedule,
                           const BenchmarkOptions& options) {
  std::vector<OptimizerSpec> specs;
  for (const auto& v : variants) specs.push_back(OptimizerSpec::of(v.config, v.name));
  const BenchmarkReport report = run_benchmark(specs, problem, stop, schedule, options);

  AblationTable table;
  table.problem = report.problem;
  table.master_seed = report.master_seed;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const MethodReport& m = report.methods[i];
    AblationRow row;
    row.variant = variants[i].name;
    row.flags = describe_flags(variants[i].config);
    row.summary = m.summary;
    row.runs = m.runs;
    double loss = 0.0;
    for (const auto& r : m.runs) {
      loss += r.final_loss;
      for (std::size_t k = 0; k < r.metrics.size(); ++k) {
        if (row.mean_metrics.size() <= k) row.mean_metrics.push_back({r.metrics[k].first, 0.0});
        row.mean_metrics[k].second += r.metrics[k].second;
      }
    }
    const double n = static_cast<double>(m.runs.size());
    row.mean_final_loss = loss / n;
    for (auto& [name, value] : row.mean_metrics) value /= n;
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace frankopt
