#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace frankopt {

/// Differentiable objective with analytic gradient. Implementations are
/// immutable after construction, so one instance may be evaluated from
/// several threads.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;

  /// Full objective value; writes the gradient into `grad`.
  virtual double evaluate(std::span<const double> theta, std::span<double> grad) const = 0;

  /// Starting point for run `seed`. Deterministic problems may ignore it.
  virtual std::vector<double> initial_point(std::uint64_t seed) const = 0;

  virtual std::optional<std::vector<double>> known_minimizer() const { return std::nullopt; }
  virtual std::optional<double> known_minimum() const { return std::nullopt; }

  /// Gradient entries grouped per physical body (3 for atoms); convergence
  /// uses the largest block norm.
  virtual std::size_t block_size() const { return 1; }

  /// Number of training samples for stochastic problems, 0 otherwise.
  virtual std::size_t sample_count() const { return 0; }

  /// Objective restricted to the listed training rows.
  virtual double evaluate_batch(std::span<const double> theta, std::span<const std::size_t> rows,
                                std::span<double> grad) const;
};

}  // namespace frankopt
