#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frankopt/baselines/config.hpp"
#include "frankopt/core/minimizer.hpp"

namespace frankopt {

/// Result of a one-dimensional search along `direction` from `theta`.
struct LineSearchResult {
  bool ok = false;
  double step = 0.0;
  std::vector<double> theta;
  Evaluation eval;
  std::uint64_t evaluations = 0;
};

/// Backtracking until f(theta + s d) <= f0 + c1 s g.d, with safeguarded
/// quadratic interpolation between trials.
LineSearchResult armijo_backtracking(Objective& f, std::span<const double> theta,
                                     const Evaluation& at_theta, std::span<const double> direction,
                                     double initial_step, const LineSearchParams& params);

/// Strong-Wolfe search (bracketing plus zoom with cubic interpolation).
LineSearchResult strong_wolfe(Objective& f, std::span<const double> theta,
                              const Evaluation& at_theta, std::span<const double> direction,
                              double initial_step, double max_step, const LineSearchParams& params);

/// Secant iteration on the directional derivative; exact on quadratics.
LineSearchResult secant_exact(Objective& f, std::span<const double> theta,
                              const Evaluation& at_theta, std::span<const double> direction,
                              double initial_step, const LineSearchParams& params);

/// Largest step along `direction` that keeps every coordinate move within max_move.
double max_step_for(std::span<const double> direction, double max_move);

/// Fixed trial step with Armijo backtracking along -g.
class SteepestDescent final : public Minimizer {
 public:
  explicit SteepestDescent(const BaselineConfig& config);
  std::string name() const override { return "steepest_descent"; }
  void reset(std::span<const double> theta0) override;
  StepOutcome advance(Objective& f, const Evaluation& current) override;
  std::span<const double> parameters() const override { return theta_; }
  void set_learning_rate(double lr) override;

 private:
  double step_;
  LineSearchParams params_;
  std::vector<double> theta_;
};

/// Nonlinear conjugate gradient, Polak-Ribiere+ with restarts whenever the
/// new direction is not a descent direction. The line search is strong
/// Wolfe with c2 = cg_c2 unless `exact` or `cg_armijo_only` is set.
class ConjugateGradient final : public Minimizer {
 public:
  explicit ConjugateGradient(const BaselineConfig& config);
  std::string name() const override { return "conjugate_gradient"; }
  void reset(std::span<const double> theta0) override;
  StepOutcome advance(Objective& f, const Evaluation& current) override;
  std::span<const double> parameters() const override { return theta_; }
  void set_learning_rate(double lr) override;

  std::uint64_t restarts() const { return restarts_; }
  std::uint64_t fallbacks() const { return fallbacks_; }

 private:
  double initial_step_;
  LineSearchParams params_;
  std::vector<double> theta_, g_prev_, d_prev_;
  double gd_prev_ = 0.0;
  double step_prev_ = 0.0;
  bool restart_ = true;
  std::uint64_t restarts_ = 0;
  std::uint64_t fallbacks_ = 0;
};

/// Limited-memory BFGS with a strong-Wolfe line search.
class Lbfgs final : public Minimizer {
 public:
  explicit Lbfgs(const BaselineConfig& config);
  std::string name() const override { return "lbfgs"; }
  void reset(std::span<const double> theta0) override;
  StepOutcome advance(Objective& f, const Evaluation& current) override;
  std::span<const double> parameters() const override { return theta_; }
  void set_learning_rate(double lr) override;

  std::uint64_t fallbacks() const { return fallbacks_; }

 private:
  std::vector<double> two_loop(std::span<const double> g) const;

  double initial_scale_;
  int memory_;
  LineSearchParams params_;
  std::vector<double> theta_;
  std::deque<std::vector<double>> s_hist_, y_hist_;
  std::deque<double> rho_hist_;
  std::uint64_t fallbacks_ = 0;
};

}  // namespace frankopt
