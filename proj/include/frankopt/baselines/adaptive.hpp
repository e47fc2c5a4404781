#pragma once

// First-order comparison optimizers. Each update consumes one gradient.
//
//   SGD-NAG    b <- mu b + g;  theta <- theta - lr (g + mu b)
//   RMSProp    v <- rho v + (1-rho) g^2;  theta <- theta - lr g / (sqrt(v) + eps)
//   Adam       m, v EMAs; m_hat = m/(1-b1^t), v_hat = v/(1-b2^t);
//              theta <- theta - lr m_hat / (sqrt(v_hat) + eps)
//   AMSGrad    as Adam with v_hat replaced by its running maximum
//   AdaBound   Adam step lr sqrt(1-b2^t)/(1-b1^t) / (sqrt(v)+eps), clipped
//              elementwise to [eta_l(t), eta_u(t)] around final_lr
//   Padam      running max of v_hat raised to the partial power p:
//              theta <- theta - lr m_hat / (max_v_hat^p + eps)
//   AdaBelief  s <- b2 s + (1-b2)(g-m)^2 + eps with bias correction
//   Lookahead  every k inner steps slow <- (1-alpha) slow + alpha fast

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "frankopt/baselines/config.hpp"
#include "frankopt/core/optimizer.hpp"

namespace frankopt {

/// Shared bookkeeping for optimizers whose state is parameters plus
/// per-element buffers.
class ElementwiseOptimizer : public GradientOptimizer {
 public:
  std::span<const double> parameters() const override { return theta_; }
  void overwrite_parameters(std::span<const double> theta) override;
  double learning_rate() const override { return lr_; }
  void set_learning_rate(double lr) override;
  std::uint64_t steps() const { return t_; }

 protected:
  explicit ElementwiseOptimizer(double lr);
  void reset_buffers(std::span<const double> theta0, std::initializer_list<std::vector<double>*> bufs);
  void begin_update(std::span<const double> grad);

  std::vector<double> theta_;
  double lr_;
  std::uint64_t t_ = 0;
};

class SgdNesterov final : public ElementwiseOptimizer {
 public:
  explicit SgdNesterov(double lr, double momentum = 0.9);
  std::string name() const override { return "sgd_nag"; }
  void reset(std::span<const double> theta0) override;
  void update(std::span<const double> grad) override;
  std::span<const double> buffer() const { return buf_; }

 private:
  double momentum_;
  std::vector<double> buf_;
};

class RmsProp final : public ElementwiseOptimizer {
 public:
  explicit RmsProp(double lr, double decay = 0.9, double epsilon = 1e-8);
  std::string name() const override { return "rmsprop"; }
  void reset(std::span<const double> theta0) override;
  void update(std::span<const double> grad) override;
  std::span<const double> second_moment() const { return v_; }

 private:
  double decay_, epsilon_;
  std::vector<double> v_;
};

/// Adam, or AMSGrad when `amsgrad` is set.
class Adam final : public ElementwiseOptimizer {
 public:
  Adam(double lr, double beta1, double beta2, double epsilon, bool amsgrad = false);
  std::string name() const override { return amsgrad_ ? "amsgrad" : "adam"; }
  void reset(std::span<const double> theta0) override;
  void update(std::span<const double> grad) override;
  std::optional<AdaptiveDiagnostics> diagnostics() const override;

  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }
  std::span<const double> v_hat_max() const { return v_hat_max_; }

 private:
  double beta1_, beta2_, epsilon_;
  bool amsgrad_;
  std::vector<double> m_, v_, v_hat_max_;
};

class AdaBound final : public ElementwiseOptimizer {
 public:
  AdaBound(double lr, double beta1, double beta2, double epsilon, double final_lr = 0.1,
           double gamma = 1e-3);
  std::string name() const override { return "adabound"; }
  void reset(std::span<const double> theta0) override;
  void update(std::span<const double> grad) override;

  /// Step-size bounds (lower, upper) at step t for the current lr.
  std::pair<double, double> bounds(std::uint64_t t) const;

 private:
  double beta1_, beta2_, epsilon_, final_lr_, gamma_, base_lr_;
  std::vector<double> m_, v_;
};

class Padam final : public ElementwiseOptimizer {
 public:
  Padam(double lr, double beta1, double beta2, double epsilon, double partial = 0.125);
  std::string name() const override { return "padam"; }
  void reset(std::span<const double> theta0) override;
  void update(std::span<const double> grad) override;

 private:
  double beta1_, beta2_, epsilon_, partial_;
  std::vector<double> m_, v_, v_hat_max_;
};

class AdaBelief final : public ElementwiseOptimizer {
 public:
  AdaBelief(double lr, double beta1, double beta2, double epsilon);
  std::string name() const override { return "adabelief"; }
  void reset(std::span<const double> theta0) override;
  void update(std::span<const double> grad) override;
  std::span<const double> belief() const { return s_; }
  /// factor = mean |m_hat| / (sqrt(s_hat) + eps).
  std::optional<AdaptiveDiagnostics> diagnostics() const override;

 private:
  double beta1_, beta2_, epsilon_;
  std::vector<double> m_, s_;
};

/// Wraps any gradient-stream optimizer with slow weights.
class Lookahead final : public GradientOptimizer {
 public:
  Lookahead(std::unique_ptr<GradientOptimizer> inner, int sync_period = 5, double slow_step = 0.5);

  std::string name() const override { return "lookahead_" + inner_->name(); }
  void reset(std::span<const double> theta0) override;
  void update(std::span<const double> grad) override;
  std::span<const double> parameters() const override { return inner_->parameters(); }
  void overwrite_parameters(std::span<const double> theta) override;
  double learning_rate() const override { return inner_->learning_rate(); }
  void set_learning_rate(double lr) override { inner_->set_learning_rate(lr); }
  std::optional<AdaptiveDiagnostics> diagnostics() const override { return inner_->diagnostics(); }

 private:
  std::unique_ptr<GradientOptimizer> inner_;
  int sync_period_;
  double slow_step_;
  std::vector<double> slow_;
  std::uint64_t count_ = 0;
};

}  // namespace frankopt
