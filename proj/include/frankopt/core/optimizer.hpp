#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace frankopt {

/// Raised when a gradient contains NaN or Inf.
class NonFiniteGradientError : public std::invalid_argument {
 public:
  explicit NonFiniteGradientError(std::size_t index);
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Throws NonFiniteGradientError naming the first non-finite entry.
void require_finite(std::span<const double> g);

/// Per-step summary of the adaptive quantities an optimizer applied.
/// `factor` is the normalized adaptive factor: mean xi for Frankenstein,
/// mean |m_hat| / (sqrt(v_hat) + eps) for the Adam family.
struct AdaptiveDiagnostics {
  double factor = 1.0;
  double factor_max = 1.0;
  double beta1 = 0.0;
  double p_mean = 0.5;
  double rho_mean = 1.0;
  double beta2_mean = 1.0;
  double beta2_min = 1.0;
  double ratio_mean = 0.0;  // mean |r_t| = |m_t| / sqrt(v_t)
};

/// Gradient-stream optimizer: consumes one gradient per step and moves its
/// parameters. Frankenstein and the first-order baselines share this.
class GradientOptimizer {
 public:
  virtual ~GradientOptimizer() = default;

  virtual std::string name() const = 0;
  virtual void reset(std::span<const double> theta0) = 0;
  virtual void update(std::span<const double> grad) = 0;
  virtual std::span<const double> parameters() const = 0;
  /// Replaces the parameters while keeping the optimizer's internal state.
  virtual void overwrite_parameters(std::span<const double> theta) = 0;
  virtual double learning_rate() const = 0;
  virtual void set_learning_rate(double lr) = 0;
  virtual std::optional<AdaptiveDiagnostics> diagnostics() const { return std::nullopt; }
};

/// Rejects non-positive or non-finite learning rates.
double checked_learning_rate(double lr);

}  // namespace frankopt
