#include "frankopt/analysis/trace.hpp"

#include <stdexcept>

namespace frankopt {

AdaptiveTrace adaptive_factor_trace(const RunRecord& record) {
  AdaptiveTrace t;
  t.optimizer = record.optimizer;
  if (record.log.empty() && record.steps > 0) {
    throw std::invalid_argument("trace: record of " + record.optimizer + " kept no step log");
  }
  for (const auto& s : record.log) {
    if (!s.diagnostics) {
      throw std::invalid_argument("trace: " + record.optimizer + " has no adaptive diagnostics at step " +
                                  std::to_string(s.step));
    }
    t.steps.push_back(s.step);
    t.factor.push_back(s.diagnostics->factor);
    t.factor_max.push_back(s.diagnostics->factor_max);
    t.ratio.push_back(s.diagnostics->ratio_mean);
  }
  return t;
}

std::vector<std::size_t> find_peaks(const std::vector<double>& values, double threshold) {
  std::vector<std::size_t> peaks;
  bool inside = false;
  std::size_t best = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > threshold) {
      if (!inside || values[i] > values[best]) best = i;
      inside = true;
    } else if (inside) {
      peaks.push_back(best);
      inside = false;
    }
  }
  if (inside) peaks.push_back(best);
  return peaks;
}

}  // namespace frankopt
