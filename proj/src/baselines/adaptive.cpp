#include "frankopt/baselines/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "frankopt/simd/kernels.hpp"

namespace frankopt {

ElementwiseOptimizer::ElementwiseOptimizer(double lr) : lr_(checked_learning_rate(lr)) {}

void ElementwiseOptimizer::overwrite_parameters(std::span<const double> theta) {
  if (theta.size() != theta_.size()) {
    throw std::invalid_argument("overwrite_parameters: dimension mismatch");
  }
  std::copy(theta.begin(), theta.end(), theta_.begin());
}

void ElementwiseOptimizer::set_learning_rate(double lr) { lr_ = checked_learning_rate(lr); }

void ElementwiseOptimizer::reset_buffers(std::span<const double> theta0,
                                         std::initializer_list<std::vector<double>*> bufs) {
  theta_.assign(theta0.begin(), theta0.end());
  for (auto* b : bufs) b->assign(theta0.size(), 0.0);
  t_ = 0;
}

void ElementwiseOptimizer::begin_update(std::span<const double> grad) {
  if (grad.size() != theta_.size()) {
    throw std::invalid_argument(name() + ": gradient length " + std::to_string(grad.size()) +
                                " does not match dimension " + std::to_string(theta_.size()));
  }
  require_finite(grad);
  ++t_;
}

// ---------------------------------------------------------------- SGD-NAG

SgdNesterov::SgdNesterov(double lr, double momentum) : ElementwiseOptimizer(lr), momentum_(momentum) {
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must be in [0,1)");
}

void SgdNesterov::reset(std::span<const double> theta0) { reset_buffers(theta0, {&buf_}); }

void SgdNesterov::update(std::span<const double> grad) {
  begin_update(grad);
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    buf_[i] = momentum_ * buf_[i] + grad[i];
    theta_[i] = theta_[i] - lr_ * (grad[i] + momentum_ * buf_[i]);
  }
}

// ---------------------------------------------------------------- RMSProp

RmsProp::RmsProp(double lr, double decay, double epsilon)
    : ElementwiseOptimizer(lr), decay_(decay), epsilon_(epsilon) {}

void RmsProp::reset(std::span<const double> theta0) { reset_buffers(theta0, {&v_}); }

void RmsProp::update(std::span<const double> grad) {
  begin_update(grad);
  simd::RmspropArgs a;
  a.n = theta_.size();
  a.theta = theta_.data();
  a.v = v_.data();
  a.g = grad.data();
  a.lr = lr_;
  a.decay = decay_;
  a.epsilon = epsilon_;
  simd::kernels().rmsprop(a);
}

// ---------------------------------------------------------------- Adam / AMSGrad

Adam::Adam(double lr, double beta1, double beta2, double epsilon, bool amsgrad)
    : ElementwiseOptimizer(lr), beta1_(beta1), beta2_(beta2), epsilon_(epsilon), amsgrad_(amsgrad) {}

void Adam::reset(std::span<const double> theta0) {
  reset_buffers(theta0, {&m_, &v_});
  if (amsgrad_) {
    v_hat_max_.assign(theta0.size(), 0.0);
  } else {
    v_hat_max_.clear();
  }
}

void Adam::update(std::span<const double> grad) {
  begin_update(grad);
  simd::AdamArgs a;
  a.n = theta_.size();
  a.theta = theta_.data();
  a.m = m_.data();
  a.v = v_.data();
  a.v_hat_max = amsgrad_ ? v_hat_max_.data() : nullptr;
  a.g = grad.data();
  a.lr = lr_;
  a.beta1 = beta1_;
  a.beta2 = beta2_;
  a.epsilon = epsilon_;
  const double t = static_cast<double>(t_);
  a.bias1 = 1.0 - std::pow(beta1_, t);
  a.bias2 = 1.0 - std::pow(beta2_, t);
  simd::kernels().adam(a);
}

std::optional<AdaptiveDiagnostics> Adam::diagnostics() const {
  if (t_ == 0 || theta_.empty()) return std::nullopt;
  const double t = static_cast<double>(t_);
  const double bias1 = 1.0 - std::pow(beta1_, t);
  const double bias2 = 1.0 - std::pow(beta2_, t);
  AdaptiveDiagnostics d;
  d.beta1 = beta1_;
  d.beta2_mean = d.beta2_min = beta2_;
  double sum = 0.0;
  d.factor_max = 0.0;
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    const double v_hat = amsgrad_ ? v_hat_max_[i] : v_[i] / bias2;
    const double r = std::fabs(m_[i] / bias1) / (std::sqrt(v_hat) + epsilon_);
    sum += r;
    d.factor_max = std::max(d.factor_max, r);
  }
  d.factor = sum / static_cast<double>(theta_.size());
  d.ratio_mean = d.factor;
  return d;
}

// ---------------------------------------------------------------- AdaBound

AdaBound::AdaBound(double lr, double beta1, double beta2, double epsilon, double final_lr,
                   double gamma)
    : ElementwiseOptimizer(lr),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon),
      final_lr_(final_lr),
      gamma_(gamma),
      base_lr_(lr) {}

void AdaBound::reset(std::span<const double> theta0) { reset_buffers(theta0, {&m_, &v_}); }

std::pair<double, double> AdaBound::bounds(std::uint64_t t) const {
  // The final rate follows learning-rate schedules relative to the initial rate.
  const double final_lr = final_lr_ * lr_ / base_lr_;
  const double td = static_cast<double>(t);
  return {final_lr * (1.0 - 1.0 / (gamma_ * td + 1.0)), final_lr * (1.0 + 1.0 / (gamma_ * td))};
}

void AdaBound::update(std::span<const double> grad) {
  begin_update(grad);
  const double t = static_cast<double>(t_);
  const double bias1 = 1.0 - std::pow(beta1_, t);
  const double bias2 = 1.0 - std::pow(beta2_, t);
  const double step_size = lr_ * std::sqrt(bias2) / bias1;
  const auto [lower, upper] = bounds(t_);
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    const double g = grad[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * (g * g);
    const double rate = std::clamp(step_size / (std::sqrt(v_[i]) + epsilon_), lower, upper);
    theta_[i] = theta_[i] - rate * m_[i];
  }
}

// ---------------------------------------------------------------- Padam

Padam::Padam(double lr, double beta1, double beta2, double epsilon, double partial)
    : ElementwiseOptimizer(lr), beta1_(beta1), beta2_(beta2), epsilon_(epsilon), partial_(partial) {
  if (!(partial > 0.0 && partial <= 0.5)) throw std::invalid_argument("padam p must be in (0, 1/2]");
}

void Padam::reset(std::span<const double> theta0) { reset_buffers(theta0, {&m_, &v_, &v_hat_max_}); }

void Padam::update(std::span<const double> grad) {
  begin_update(grad);
  const double t = static_cast<double>(t_);
  const double bias1 = 1.0 - std::pow(beta1_, t);
  const double bias2 = 1.0 - std::pow(beta2_, t);
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    const double g = grad[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * (g * g);
    v_hat_max_[i] = std::max(v_hat_max_[i], v_[i] / bias2);
    theta_[i] = theta_[i] - (lr_ * (m_[i] / bias1)) / (std::pow(v_hat_max_[i], partial_) + epsilon_);
  }
}

// ---------------------------------------------------------------- AdaBelief

AdaBelief::AdaBelief(double lr, double beta1, double beta2, double epsilon)
    : ElementwiseOptimizer(lr), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

void AdaBelief::reset(std::span<const double> theta0) { reset_buffers(theta0, {&m_, &s_}); }

void AdaBelief::update(std::span<const double> grad) {
  begin_update(grad);
  simd::AdaBeliefArgs a;
  a.n = theta_.size();
  a.theta = theta_.data();
  a.m = m_.data();
  a.s = s_.data();
  a.g = grad.data();
  a.lr = lr_;
  a.beta1 = beta1_;
  a.beta2 = beta2_;
  a.epsilon = epsilon_;
  const double t = static_cast<double>(t_);
  a.bias1 = 1.0 - std::pow(beta1_, t);
  a.bias2 = 1.0 - std::pow(beta2_, t);
  simd::kernels().adabelief(a);
}

std::optional<AdaptiveDiagnostics> AdaBelief::diagnostics() const {
  if (t_ == 0 || theta_.empty()) return std::nullopt;
  const double t = static_cast<double>(t_);
  const double bias1 = 1.0 - std::pow(beta1_, t);
  const double bias2 = 1.0 - std::pow(beta2_, t);
  AdaptiveDiagnostics d;
  d.beta1 = beta1_;
  d.beta2_mean = d.beta2_min = beta2_;
  double sum = 0.0;
  d.factor_max = 0.0;
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    const double r = std::fabs(m_[i] / bias1) / (std::sqrt(s_[i] / bias2) + epsilon_);
    sum += r;
    d.factor_max = std::max(d.factor_max, r);
  }
  d.factor = sum / static_cast<double>(theta_.size());
  d.ratio_mean = d.factor;
  return d;
}

// ---------------------------------------------------------------- Lookahead

Lookahead::Lookahead(std::unique_ptr<GradientOptimizer> inner, int sync_period, double slow_step)
    : inner_(std::move(inner)), sync_period_(sync_period), slow_step_(slow_step) {
  if (!inner_) throw std::invalid_argument("lookahead needs an inner optimizer");
  if (sync_period < 1) throw std::invalid_argument("lookahead sync period must be >= 1");
  if (!(slow_step > 0.0 && slow_step <= 1.0)) {
    throw std::invalid_argument("lookahead slow step must be in (0, 1]");
  }
}

void Lookahead::reset(std::span<const double> theta0) {
  inner_->reset(theta0);
  slow_.assign(theta0.begin(), theta0.end());
  count_ = 0;
}

void Lookahead::overwrite_parameters(std::span<const double> theta) {
  inner_->overwrite_parameters(theta);
  slow_.assign(theta.begin(), theta.end());
}

void Lookahead::update(std::span<const double> grad) {
  inner_->update(grad);
  if (++count_ % static_cast<std::uint64_t>(sync_period_) != 0) return;
  const auto fast = inner_->parameters();
  for (std::size_t i = 0; i < slow_.size(); ++i) {
    slow_[i] = (1.0 - slow_step_) * slow_[i] + slow_step_ * fast[i];
  }
  inner_->overwrite_parameters(slow_);
}

}  // namespace frankopt
