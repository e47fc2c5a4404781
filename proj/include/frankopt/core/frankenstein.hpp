#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frankopt/core/optimizer.hpp"

namespace frankopt {

/// Hyperparameters and ablation switches. With every switch off the update
/// is the unmodified Frankenstein rule.
struct FrankensteinConfig {
  double base_lr = 1e-3;
  double epsilon = 1e-8;

  std::optional<double> fix_beta1;   // constant beta1 instead of the lr rule
  bool decouple_beta1_lr = false;    // beta1 from base_lr, ignoring the schedule
  std::optional<double> fix_beta2;   // constant beta2 instead of the dynamic rule
  std::optional<double> beta2_floor; // optional lower clip on the dynamic beta2
  bool disable_v = false;            // no second-moment preconditioning
  bool disable_vmax = false;         // drop max(v_{t-1}, x_t); EMA feeds the step
  bool disable_v_ema = false;        // keep max(v_{t-1}, x_t), skip the EMA
  bool disable_rho = false;          // rho = 1
  bool disable_xi = false;           // xi = 1

  /// Throws std::invalid_argument describing the first invalid field.
  void validate() const;
  bool any_ablation() const;
};

/// Full optimizer state: parameters, both momenta, the previous
/// squared-gradient term, the step counter and the current learning rate.
struct OptimizerState {
  std::vector<double> theta;
  std::vector<double> m;
  std::vector<double> v;
  std::vector<double> x_prev;
  std::uint64_t t = 0;
  double lr = 1e-3;

  /// m = v = 0 and x_prev = lr in every element.
  static OptimizerState initial(std::span<const double> theta0, double lr);
  std::size_t dimension() const { return theta.size(); }
};

/// Per-step quantities that the update computes but does not keep.
struct FrankensteinScratch {
  double beta1 = 0.0;
  std::vector<double> p_factor;
  std::vector<double> rho;
  std::vector<double> xi;
  std::vector<double> beta2;
  std::vector<double> x_t;
  std::vector<double> v_max;

  void resize(std::size_t n);
};

struct FrankensteinStep {
  OptimizerState state;
  FrankensteinScratch scratch;
};

double compute_beta1(double lr);
std::vector<double> compute_p_factor(std::span<const double> m_prev, std::span<const double> g);
std::vector<double> compute_rho(std::span<const double> x_t, std::span<const double> p);
std::vector<double> compute_xi(std::span<const double> x_prev, std::span<const double> p);
std::vector<double> compute_beta2(std::span<const double> x_t, std::span<const double> x_prev,
                                  std::span<const double> p);

/// beta1 the config applies at learning rate `lr`.
double effective_beta1(const FrankensteinConfig& config, double lr);

/// Pure transition: successor state plus diagnostics.
FrankensteinStep frankenstein_step(const OptimizerState& state, std::span<const double> g,
                                   const FrankensteinConfig& config);

/// In-place variant used on hot paths; `scratch` is resized as needed.
void frankenstein_step_inplace(OptimizerState& state, std::span<const double> g,
                               const FrankensteinConfig& config, FrankensteinScratch& scratch);

OptimizerState set_learning_rate(OptimizerState state, double lr);

class FrankensteinOptimizer final : public GradientOptimizer {
 public:
  explicit FrankensteinOptimizer(FrankensteinConfig config = {});

  std::string name() const override { return "frankenstein"; }
  void reset(std::span<const double> theta0) override;
  void update(std::span<const double> grad) override;
  std::span<const double> parameters() const override { return state_.theta; }
  void overwrite_parameters(std::span<const double> theta) override;
  double learning_rate() const override { return state_.lr; }
  void set_learning_rate(double lr) override;
  std::optional<AdaptiveDiagnostics> diagnostics() const override;

  const OptimizerState& state() const { return state_; }
  const FrankensteinScratch& scratch() const { return scratch_; }
  const FrankensteinConfig& config() const { return config_; }

 private:
  FrankensteinConfig config_;
  OptimizerState state_;
  FrankensteinScratch scratch_;
};

}  // namespace frankopt
