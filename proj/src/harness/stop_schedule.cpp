#include "frankopt/harness/stop_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace frankopt {

void StopRule::validate() const {
  if (loss_threshold && !std::isfinite(*loss_threshold)) {
    throw std::invalid_argument("stop.loss_threshold must be finite");
  }
  if (fmax_threshold && !(*fmax_threshold > 0.0 && std::isfinite(*fmax_threshold))) {
    throw std::invalid_argument("stop.fmax_threshold must be positive and finite");
  }
  if (patience && *patience == 0) throw std::invalid_argument("stop.patience must be >= 1");
  if (max_evaluations && *max_evaluations == 0) throw std::invalid_argument("stop.max_evaluations must be >= 1");
}

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::step: return "step";
    case ScheduleKind::cosine: return "cosine";
  }
  return "unknown";
}

std::optional<ScheduleKind> parse_schedule_kind(std::string_view tag) {
  if (tag == "constant") return ScheduleKind::constant;
  if (tag == "step") return ScheduleKind::step;
  if (tag == "cosine") return ScheduleKind::cosine;
  return std::nullopt;
}

void Schedule::validate() const {
  if (kind == ScheduleKind::step) {
    if (!(factor > 0.0 && factor <= 1.0)) throw std::invalid_argument("schedule.factor must lie in (0, 1]");
    if (interval == 0) throw std::invalid_argument("schedule.interval must be >= 1");
  }
  if (kind == ScheduleKind::cosine) {
    if (!(min_factor > 0.0 && min_factor <= 1.0)) {
      throw std::invalid_argument("schedule.min_factor must lie in (0, 1]");
    }
    if (total_steps == 0) throw std::invalid_argument("schedule.total_steps must be >= 1");
  }
}

double Schedule::multiplier(std::uint64_t t) const {
  switch (kind) {
    case ScheduleKind::constant:
      return 1.0;
    case ScheduleKind::step:
      return std::max(std::pow(factor, static_cast<double>(t / interval)),
                      std::numeric_limits<double>::min());
    case ScheduleKind::cosine: {
      if (t >= total_steps) return min_factor;
      const double c = std::cos(std::numbers::pi * static_cast<double>(t) / static_cast<double>(total_steps));
      return min_factor + (1.0 - min_factor) * 0.5 * (1.0 + c);
    }
  }
  return 1.0;
}

}  // namespace frankopt
