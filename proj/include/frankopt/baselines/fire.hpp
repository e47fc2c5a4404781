#pragma once

#include <span>
#include <string>
#include <vector>

#include "frankopt/baselines/config.hpp"
#include "frankopt/core/optimizer.hpp"

namespace frankopt {

/// Fast Inertial Relaxation Engine with unit masses. Forces are the negated
/// gradient. Velocity is zeroed and the timestep cut whenever the power
/// F.v is non-positive; otherwise velocity is mixed toward the force
/// direction and the timestep grows after n_min consecutive downhill steps.
class Fire final : public GradientOptimizer {
 public:
  explicit Fire(FireParams params = {});

  std::string name() const override { return "fire"; }
  void reset(std::span<const double> theta0) override;
  void update(std::span<const double> grad) override;
  std::span<const double> parameters() const override { return x_; }
  void overwrite_parameters(std::span<const double> theta) override;
  /// The learning rate of FIRE is its initial timestep.
  double learning_rate() const override { return params_.dt; }
  void set_learning_rate(double) override {}

  std::span<const double> velocity() const { return v_; }
  double timestep() const { return dt_; }
  double mixing() const { return alpha_; }
  /// Power F.v evaluated before the most recent velocity update.
  double last_power() const { return last_power_; }

 private:
  FireParams params_;
  std::vector<double> x_, v_;
  double dt_ = 0.0;
  double alpha_ = 0.0;
  int n_positive_ = 0;
  bool first_ = true;
  double last_power_ = 0.0;
};

}  // namespace frankopt
