#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace frankopt {

enum class Method {
  frankenstein,
  sgd_nag,
  rmsprop,
  adam,
  amsgrad,
  adabound,
  padam,
  adabelief,
  lookahead_adam,
  steepest_descent,
  conjugate_gradient,
  lbfgs,
  fire,
};

std::string_view to_string(Method method);

/// Accepts the canonical tags plus the short aliases sd, cg, sgd, lookahead.
std::optional<Method> parse_method(std::string_view tag);

const std::vector<Method>& all_methods();

/// True for methods that take one gradient per step with no line search.
bool is_gradient_stream(Method method);

struct FireParams {
  double dt = 0.1;
  double dt_max = 1.0;  // 10 * dt
  int n_min = 5;
  double f_inc = 1.1;
  double f_dec = 0.5;
  double alpha_start = 0.1;
  double f_alpha = 0.99;
  double max_move = 0.2;
};

struct LineSearchParams {
  double c1 = 1e-4;
  double c2 = 0.9;          // strong-Wolfe curvature constant (L-BFGS)
  int max_evaluations = 40; // per line search
  double max_move = 0.2;    // cap on the largest coordinate displacement per step
  bool exact = false;       // CG: secant search to a stationary point along d
  double cg_c2 = 0.1;       // CG: strong-Wolfe curvature constant
  bool cg_armijo_only = false;  // CG: plain backtracking instead of strong Wolfe
};

/// Hyperparameters for every baseline. Fields irrelevant to `method` are
/// ignored. Defaults follow the usual published settings.
struct BaselineConfig {
  Method method = Method::adam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double momentum = 0.9;      // SGD-NAG
  double rms_decay = 0.9;     // RMSProp smoothing constant
  double final_lr = 0.1;      // AdaBound
  double bound_gamma = 1e-3;  // AdaBound convergence speed of the bounds
  double padam_p = 0.125;     // Padam partial exponent
  int sync_period = 5;        // Lookahead k
  double slow_step = 0.5;     // Lookahead alpha
  FireParams fire;
  LineSearchParams line_search;
  int lbfgs_memory = 10;

  void validate() const;
};

}  // namespace frankopt
