#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frankopt/harness/run.hpp"

namespace frankopt {

/// Normalized adaptive factor per step: mean xi for Frankenstein, mean
/// |m_hat| / (sqrt(v_hat) + eps) for the Adam family.
struct AdaptiveTrace {
  std::string optimizer;
  std::vector<std::uint64_t> steps;
  std::vector<double> factor;
  std::vector<double> factor_max;
  std::vector<double> ratio;  // mean |m| / sqrt(v)

  std::size_t size() const { return steps.size(); }
};

/// Throws std::invalid_argument if any logged step lacks diagnostics.
AdaptiveTrace adaptive_factor_trace(const RunRecord& record);

/// A peak is the maximum of a maximal run of consecutive values above
/// `threshold`. Returns the indices of those maxima in order.
std::vector<std::size_t> find_peaks(const std::vector<double>& values, double threshold);

}  // namespace frankopt
