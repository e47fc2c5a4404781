#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "frankopt/harness/ablation.hpp"
#include "frankopt/harness/benchmark.hpp"
#include "frankopt/harness/run.hpp"

namespace frankopt {

// File layout (all CSV files have a header row):
//   runs.csv      optimizer,index,seed,converged,steps,force_calls,final_loss,final_fmax,reason[,metrics]
//   summary.csv   optimizer,runs,converged,success_rate,mean_n,min_n,max_n,mean_steps,min_steps,max_steps
//   trace csv     step,evaluations,lr,loss,full_loss,grad_norm,fmax,fallback,factor,factor_max,
//                 beta1,p_mean,rho_mean,beta2_mean,beta2_min,ratio_mean
//   ablation.csv  variant,flags,runs,converged,mean_final_loss,mean_n[,metrics]
// Reals are printed with 17 significant digits; absent values are empty.

std::string format_real(double x);

void write_runs_csv(std::ostream& out, const BenchmarkReport& report);
void write_summary_csv(std::ostream& out, const BenchmarkReport& report);
void write_trace_csv(std::ostream& out, const RunRecord& record);
void write_ablation_csv(std::ostream& out, const AblationTable& table);

nlohmann::ordered_json to_json(const Aggregates& a);
nlohmann::ordered_json to_json(const BenchmarkReport& report);
nlohmann::ordered_json to_json(const AblationTable& table);
/// Run summary without the per-step log.
nlohmann::ordered_json to_json(const RunRecord& record);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace frankopt
