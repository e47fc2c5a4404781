#pragma once

#include <string>
#include <vector>

#include "frankopt/harness/benchmark.hpp"

namespace frankopt {

struct AblationVariant {
  std::string name;
  FrankensteinConfig config;
};

/// The seven-row ablation set: full, decouple_beta_lr, without_v,
/// fix_beta2, fix_beta1, without_vmax, without_v_ema. Each row switches on
/// exactly one flag relative to `base`.
std::vector<AblationVariant> table5_variants(const FrankensteinConfig& base);

/// Preset lookup; throws std::invalid_argument for an unknown name.
std::vector<AblationVariant> ablation_preset(const std::string& preset, const FrankensteinConfig& base);

/// Short description of the flags a config switches on ("none" for the full rule).
std::string describe_flags(const FrankensteinConfig& config);

struct AblationRow {
  std::string variant;
  std::string flags;
  Aggregates summary;
  double mean_final_loss = 0.0;
  std::vector<std::pair<std::string, double>> mean_metrics;
  std::vector<SeedResult> runs;
};

struct AblationTable {
  std::string problem;
  std::uint64_t master_seed = 0;
  std::vector<AblationRow> rows;

  const AblationRow* find(const std::string& variant) const;
};

/// Every variant on the same paired seeds.
AblationTable run_ablation(const std::vector<AblationVariant>& variants, const Problem& problem,
                           const StopRule& stop, const Schedule& schedule,
                           const BenchmarkOptions& options);

}  // namespace frankopt
