#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frankopt/core/optimizer.hpp"

namespace frankopt {

/// Differentiable objective seen by a minimizer. Every call to evaluate()
/// is one gradient (force) evaluation.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::size_t dimension() const = 0;
  virtual double evaluate(std::span<const double> theta, std::span<double> grad) = 0;
};

/// Objective backed by a callable; counts its evaluations.
class FunctionObjective final : public Objective {
 public:
  using Fn = std::function<double(std::span<const double>, std::span<double>)>;
  FunctionObjective(std::size_t dimension, Fn fn) : dim_(dimension), fn_(std::move(fn)) {}

  std::size_t dimension() const override { return dim_; }
  double evaluate(std::span<const double> theta, std::span<double> grad) override {
    ++calls_;
    return fn_(theta, grad);
  }
  std::uint64_t calls() const { return calls_; }

 private:
  std::size_t dim_;
  Fn fn_;
  std::uint64_t calls_ = 0;
};

/// Objective value and gradient at a point.
struct Evaluation {
  double loss = 0.0;
  std::vector<double> grad;
};

Evaluation evaluate_at(Objective& f, std::span<const double> theta);

struct StepOutcome {
  Evaluation eval;           // at the new parameters
  std::uint64_t evaluations; // objective calls spent by this step
  bool fallback = false;     // line search failed; a steepest-descent step was used
  bool stalled = false;      // no acceptable step could be found
};

/// Iterative minimizer driven by the harness. advance() receives the
/// evaluation at the current parameters and returns the one at the next.
class Minimizer {
 public:
  virtual ~Minimizer() = default;

  virtual std::string name() const = 0;
  virtual void reset(std::span<const double> theta0) = 0;
  virtual StepOutcome advance(Objective& f, const Evaluation& current) = 0;
  virtual std::span<const double> parameters() const = 0;
  virtual void set_learning_rate(double lr) = 0;
  virtual std::optional<AdaptiveDiagnostics> diagnostics() const { return std::nullopt; }
};

/// Drives a gradient-stream optimizer: update with the current gradient,
/// then evaluate once at the new parameters.
class GradientMinimizer final : public Minimizer {
 public:
  explicit GradientMinimizer(std::unique_ptr<GradientOptimizer> inner);

  std::string name() const override { return inner_->name(); }
  void reset(std::span<const double> theta0) override { inner_->reset(theta0); }
  StepOutcome advance(Objective& f, const Evaluation& current) override;
  std::span<const double> parameters() const override { return inner_->parameters(); }
  void set_learning_rate(double lr) override { inner_->set_learning_rate(lr); }
  std::optional<AdaptiveDiagnostics> diagnostics() const override {
    return inner_->diagnostics();
  }

  GradientOptimizer& inner() { return *inner_; }

 private:
  std::unique_ptr<GradientOptimizer> inner_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

/// Largest per-block Euclidean norm; block 3 gives the per-atom force maximum.
double block_max_norm(std::span<const double> a, std::size_t block);

}  // namespace frankopt
