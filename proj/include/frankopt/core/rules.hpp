#pragma once

// Elementwise building blocks of the Frankenstein update. Every kernel
// backend evaluates these exact expressions so results agree bitwise.

#include <algorithm>
#include <cmath>
#include <numbers>

namespace frankopt::rule {

inline constexpr double kReferenceLr = 1e-3;
inline const double kRhoLower = std::exp(0.8);
inline const double kRhoUpper = std::exp(1.05);
// Numerator of the acceleration factor, 1 + e^{-1/2}.
inline const double kXiNumerator = 1.0 + std::exp(-0.5);

/// Momentum coefficient for learning rate `lr`; 0.9 at the reference rate.
inline double beta1(double lr) {
  return 1.0 - std::clamp(0.1 * std::sqrt(lr / kReferenceLr), 0.05, 0.99);
}

/// Misalignment factor from the product m_{t-1} * g_t.
inline double p_factor(double momentum_times_grad) {
  return std::acos(std::tanh(momentum_times_grad)) / std::numbers::pi;
}

inline double rho(double x, double p) {
  const double arg = ((std::numbers::e + std::sqrt(x)) + 0.5) - p;
  return std::log(std::clamp(arg, kRhoLower, kRhoUpper));
}

inline double xi(double x_prev, double p) {
  return kXiNumerator / (1.0 + std::exp(-std::fabs(x_prev - p)));
}

inline double beta2(double x, double x_prev, double p) {
  return 1.0 - (x / x_prev) * std::fabs(0.5 - p);
}

}  // namespace frankopt::rule
