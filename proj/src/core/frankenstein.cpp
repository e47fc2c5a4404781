#include "frankopt/core/frankenstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "frankopt/core/rules.hpp"
#include "frankopt/simd/kernels.hpp"

namespace frankopt {

NonFiniteGradientError::NonFiniteGradientError(std::size_t index)
    : std::invalid_argument("non-finite gradient at index " + std::to_string(index)),
      index_(index) {}

void require_finite(std::span<const double> g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i])) throw NonFiniteGradientError(i);
  }
}

double checked_learning_rate(double lr) {
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw std::invalid_argument("learning rate must be positive and finite, got " +
                                std::to_string(lr));
  }
  return lr;
}

void FrankensteinConfig::validate() const {
  checked_learning_rate(base_lr);
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  if (fix_beta1 && !(*fix_beta1 >= 0.0 && *fix_beta1 < 1.0)) {
    throw std::invalid_argument("fix_beta1 must lie in [0, 1)");
  }
  if (fix_beta2 && !(*fix_beta2 >= 0.0 && *fix_beta2 <= 1.0)) {
    throw std::invalid_argument("fix_beta2 must lie in [0, 1]");
  }
  if (beta2_floor && !std::isfinite(*beta2_floor)) {
    throw std::invalid_argument("beta2_floor must be finite");
  }
}

bool FrankensteinConfig::any_ablation() const {
  return fix_beta1 || decouple_beta1_lr || fix_beta2 || beta2_floor || disable_v ||
         disable_vmax || disable_v_ema || disable_rho || disable_xi;
}

OptimizerState OptimizerState::initial(std::span<const double> theta0, double lr) {
  checked_learning_rate(lr);
  OptimizerState s;
  s.theta.assign(theta0.begin(), theta0.end());
  s.m.assign(theta0.size(), 0.0);
  s.v.assign(theta0.size(), 0.0);
  s.x_prev.assign(theta0.size(), lr);
  s.t = 0;
  s.lr = lr;
  return s;
}

void FrankensteinScratch::resize(std::size_t n) {
  p_factor.resize(n);
  rho.resize(n);
  xi.resize(n);
  beta2.resize(n);
  x_t.resize(n);
  v_max.resize(n);
}

double compute_beta1(double lr) { return rule::beta1(checked_learning_rate(lr)); }

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

std::vector<double> compute_p_factor(std::span<const double> m_prev, std::span<const double> g) {
  require_same_size(m_prev.size(), g.size(), "compute_p_factor");
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = rule::p_factor(m_prev[i] * g[i]);
  return out;
}

std::vector<double> compute_rho(std::span<const double> x_t, std::span<const double> p) {
  require_same_size(x_t.size(), p.size(), "compute_rho");
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = rule::rho(x_t[i], p[i]);
  return out;
}

std::vector<double> compute_xi(std::span<const double> x_prev, std::span<const double> p) {
  require_same_size(x_prev.size(), p.size(), "compute_xi");
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = rule::xi(x_prev[i], p[i]);
  return out;
}

std::vector<double> compute_beta2(std::span<const double> x_t, std::span<const double> x_prev,
                                  std::span<const double> p) {
  require_same_size(x_t.size(), p.size(), "compute_beta2");
  require_same_size(x_prev.size(), p.size(), "compute_beta2");
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = rule::beta2(x_t[i], x_prev[i], p[i]);
  return out;
}

double effective_beta1(const FrankensteinConfig& config, double lr) {
  if (config.fix_beta1) return *config.fix_beta1;
  return compute_beta1(config.decouple_beta1_lr ? config.base_lr : lr);
}

void frankenstein_step_inplace(OptimizerState& state, std::span<const double> g,
                               const FrankensteinConfig& config, FrankensteinScratch& scratch) {
  const std::size_t n = state.dimension();
  if (state.m.size() != n || state.v.size() != n || state.x_prev.size() != n) {
    throw std::invalid_argument("optimizer state vectors have inconsistent lengths");
  }
  require_same_size(g.size(), n, "frankenstein_step");
  require_finite(g);
  checked_learning_rate(state.lr);

  scratch.resize(n);
  scratch.beta1 = effective_beta1(config, state.lr);

  simd::FrankensteinArgs args;
  args.n = n;
  args.theta = state.theta.data();
  args.m = state.m.data();
  args.v = state.v.data();
  args.x_prev = state.x_prev.data();
  args.g = g.data();
  args.beta1 = scratch.beta1;
  args.lr = state.lr;
  args.epsilon = config.epsilon;
  args.sw.disable_v = config.disable_v;
  args.sw.disable_vmax = config.disable_vmax;
  args.sw.disable_v_ema = config.disable_v_ema;
  args.sw.disable_rho = config.disable_rho;
  args.sw.disable_xi = config.disable_xi;
  if (config.fix_beta2) {
    args.sw.fix_beta2 = true;
    args.sw.beta2_value = *config.fix_beta2;
  }
  if (config.beta2_floor) {
    args.sw.floor_beta2 = true;
    args.sw.beta2_floor = *config.beta2_floor;
  }
  args.p = scratch.p_factor.data();
  args.rho = scratch.rho.data();
  args.xi = scratch.xi.data();
  args.beta2 = scratch.beta2.data();
  args.x = scratch.x_t.data();
  args.v_max = scratch.v_max.data();
  simd::kernels().frankenstein(args);

  ++state.t;
}

FrankensteinStep frankenstein_step(const OptimizerState& state, std::span<const double> g,
                                   const FrankensteinConfig& config) {
  FrankensteinStep out{state, {}};
  frankenstein_step_inplace(out.state, g, config, out.scratch);
  return out;
}

OptimizerState set_learning_rate(OptimizerState state, double lr) {
  state.lr = checked_learning_rate(lr);
  return state;
}

FrankensteinOptimizer::FrankensteinOptimizer(FrankensteinConfig config)
    : config_(std::move(config)) {
  config_.validate();
  state_.lr = config_.base_lr;
}

void FrankensteinOptimizer::reset(std::span<const double> theta0) {
  state_ = OptimizerState::initial(theta0, config_.base_lr);
  scratch_ = {};
}

void FrankensteinOptimizer::update(std::span<const double> grad) {
  frankenstein_step_inplace(state_, grad, config_, scratch_);
}

void FrankensteinOptimizer::overwrite_parameters(std::span<const double> theta) {
  if (theta.size() != state_.theta.size()) {
    throw std::invalid_argument("overwrite_parameters: dimension mismatch");
  }
  std::copy(theta.begin(), theta.end(), state_.theta.begin());
}

void FrankensteinOptimizer::set_learning_rate(double lr) {
  state_.lr = checked_learning_rate(lr);
}

std::optional<AdaptiveDiagnostics> FrankensteinOptimizer::diagnostics() const {
  const std::size_t n = scratch_.xi.size();
  if (n == 0) return std::nullopt;
  AdaptiveDiagnostics d;
  d.beta1 = scratch_.beta1;
  double xi_sum = 0.0, p_sum = 0.0, rho_sum = 0.0, b2_sum = 0.0, r_sum = 0.0;
  d.factor_max = -std::numeric_limits<double>::infinity();
  d.beta2_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    xi_sum += scratch_.xi[i];
    p_sum += scratch_.p_factor[i];
    rho_sum += scratch_.rho[i];
    b2_sum += scratch_.beta2[i];
    r_sum += std::fabs(state_.m[i]) / std::sqrt(scratch_.v_max[i]);
    d.factor_max = std::max(d.factor_max, scratch_.xi[i]);
    d.beta2_min = std::min(d.beta2_min, scratch_.beta2[i]);
  }
  const double dn = static_cast<double>(n);
  d.factor = xi_sum / dn;
  d.p_mean = p_sum / dn;
  d.rho_mean = rho_sum / dn;
  d.beta2_mean = b2_sum / dn;
  d.ratio_mean = r_sum / dn;
  return d;
}

}  // namespace frankopt
