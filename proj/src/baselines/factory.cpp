#include "frankopt/baselines/factory.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "frankopt/baselines/adaptive.hpp"
#include "frankopt/baselines/fire.hpp"
#include "frankopt/baselines/line_search.hpp"

namespace frankopt {
namespace {

constexpr std::array<std::pair<Method, std::string_view>, 13> kNames{{
    {Method::frankenstein, "frankenstein"},
    {Method::sgd_nag, "sgd_nag"},
    {Method::rmsprop, "rmsprop"},
    {Method::adam, "adam"},
    {Method::amsgrad, "amsgrad"},
    {Method::adabound, "adabound"},
    {Method::padam, "padam"},
    {Method::adabelief, "adabelief"},
    {Method::lookahead_adam, "lookahead_adam"},
    {Method::steepest_descent, "steepest_descent"},
    {Method::conjugate_gradient, "conjugate_gradient"},
    {Method::lbfgs, "lbfgs"},
    {Method::fire, "fire"},
}};

}  // namespace

std::string_view to_string(Method method) {
  for (const auto& [m, name] : kNames) {
    if (m == method) return name;
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view tag) {
  for (const auto& [m, name] : kNames) {
    if (name == tag) return m;
  }
  if (tag == "sd") return Method::steepest_descent;
  if (tag == "cg") return Method::conjugate_gradient;
  if (tag == "sgd" || tag == "nag") return Method::sgd_nag;
  if (tag == "lookahead") return Method::lookahead_adam;
  if (tag == "bfgs") return Method::lbfgs;
  return std::nullopt;
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = [] {
    std::vector<Method> out;
    for (const auto& entry : kNames) out.push_back(entry.first);
    return out;
  }();
  return methods;
}

bool is_gradient_stream(Method method) {
  switch (method) {
    case Method::steepest_descent:
    case Method::conjugate_gradient:
    case Method::lbfgs:
      return false;
    default:
      return true;
  }
}

void BaselineConfig::validate() const {
  checked_learning_rate(lr);
  auto unit = [](double x, const char* what) {
    if (!(x >= 0.0 && x < 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1)");
  };
  unit(beta1, "beta1");
  unit(beta2, "beta2");
  unit(momentum, "momentum");
  unit(rms_decay, "rms_decay");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(final_lr > 0.0)) throw std::invalid_argument("final_lr must be positive");
  if (!(padam_p > 0.0 && padam_p <= 0.5)) throw std::invalid_argument("padam_p must lie in (0, 0.5]");
  if (sync_period < 1) throw std::invalid_argument("sync_period must be >= 1");
  if (!(slow_step > 0.0 && slow_step <= 1.0)) throw std::invalid_argument("slow_step must lie in (0, 1]");
  if (lbfgs_memory < 1) throw std::invalid_argument("lbfgs_memory must be >= 1");
  if (!(line_search.c1 > 0.0 && line_search.c1 < line_search.c2 && line_search.c2 < 1.0)) {
    throw std::invalid_argument("line search needs 0 < c1 < c2 < 1");
  }
  if (!(line_search.c1 < line_search.cg_c2 && line_search.cg_c2 < 1.0)) {
    throw std::invalid_argument("line search needs c1 < cg_c2 < 1");
  }
  if (line_search.max_evaluations < 1) throw std::invalid_argument("line search max_evaluations must be >= 1");
  if (!(line_search.max_move > 0.0)) throw std::invalid_argument("max_move must be positive");
  if (!(fire.dt > 0.0 && fire.dt_max >= fire.dt)) throw std::invalid_argument("fire needs 0 < dt <= dt_max");
}

std::unique_ptr<GradientOptimizer> make_gradient_optimizer(const BaselineConfig& c) {
  c.validate();
  switch (c.method) {
    case Method::sgd_nag:
      return std::make_unique<SgdNesterov>(c.lr, c.momentum);
    case Method::rmsprop:
      return std::make_unique<RmsProp>(c.lr, c.rms_decay, c.epsilon);
    case Method::adam:
      return std::make_unique<Adam>(c.lr, c.beta1, c.beta2, c.epsilon, false);
    case Method::amsgrad:
      return std::make_unique<Adam>(c.lr, c.beta1, c.beta2, c.epsilon, true);
    case Method::adabound:
      return std::make_unique<AdaBound>(c.lr, c.beta1, c.beta2, c.epsilon, c.final_lr, c.bound_gamma);
    case Method::padam:
      return std::make_unique<Padam>(c.lr, c.beta1, c.beta2, c.epsilon, c.padam_p);
    case Method::adabelief:
      return std::make_unique<AdaBelief>(c.lr, c.beta1, c.beta2, c.epsilon);
    case Method::lookahead_adam:
      return std::make_unique<Lookahead>(
          std::make_unique<Adam>(c.lr, c.beta1, c.beta2, c.epsilon, false), c.sync_period, c.slow_step);
    case Method::fire:
      return std::make_unique<Fire>(c.fire);
    default:
      break;
  }
  throw std::invalid_argument(std::string(to_string(c.method)) + " is not a gradient-stream baseline");
}

std::unique_ptr<Minimizer> make_baseline_minimizer(const BaselineConfig& c) {
  c.validate();
  switch (c.method) {
    case Method::steepest_descent:
      return std::make_unique<SteepestDescent>(c);
    case Method::conjugate_gradient:
      return std::make_unique<ConjugateGradient>(c);
    case Method::lbfgs:
      return std::make_unique<Lbfgs>(c);
    default:
      return std::make_unique<GradientMinimizer>(make_gradient_optimizer(c));
  }
}

std::unique_ptr<Minimizer> make_frankenstein_minimizer(const FrankensteinConfig& config) {
  return std::make_unique<GradientMinimizer>(std::make_unique<FrankensteinOptimizer>(config));
}

}  // namespace frankopt
