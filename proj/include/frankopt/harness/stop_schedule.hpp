#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace frankopt {

/// When a run ends. A run converges when the loss drops below
/// loss_threshold or the largest per-block gradient norm drops below
/// fmax_threshold; it stops unconverged when a budget runs out.
struct StopRule {
  std::uint64_t max_steps = 1000;
  std::optional<double> loss_threshold;
  std::optional<double> fmax_threshold;
  std::optional<std::uint64_t> patience;         // steps without a new best loss
  std::optional<std::uint64_t> max_evaluations;  // objective calls, probes included

  void validate() const;
  bool has_target() const { return loss_threshold.has_value() || fmax_threshold.has_value(); }
};

enum class ScheduleKind { constant, step, cosine };

std::string_view to_string(ScheduleKind kind);
std::optional<ScheduleKind> parse_schedule_kind(std::string_view tag);

/// Learning-rate multiplier applied to each optimizer's base rate.
///   constant  1
///   step      factor^floor(t / interval)
///   cosine    min_factor + (1 - min_factor)(1 + cos(pi t / total)) / 2,
///             held at min_factor for t >= total
struct Schedule {
  ScheduleKind kind = ScheduleKind::constant;
  double factor = 0.1;
  std::uint64_t interval = 1000;
  std::uint64_t total_steps = 1000;
  double min_factor = 1e-3;

  void validate() const;
  /// Multiplier for step index t (0-based); always > 0.
  double multiplier(std::uint64_t t) const;
};

}  // namespace frankopt
