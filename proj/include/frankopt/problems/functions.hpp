#pragma once

#include <memory>
#include <vector>

#include "frankopt/problems/problem.hpp"

namespace frankopt {

/// f(theta) = 0.5 |theta|^2, started from (1, ..., 1).
class Quadratic final : public Problem {
 public:
  explicit Quadratic(std::size_t dimension);
  std::string name() const override { return "quadratic"; }
  std::size_t dimension() const override { return dim_; }
  double evaluate(std::span<const double> theta, std::span<double> grad) const override;
  std::vector<double> initial_point(std::uint64_t seed) const override;
  std::optional<std::vector<double>> known_minimizer() const override;
  std::optional<double> known_minimum() const override { return 0.0; }

 private:
  std::size_t dim_;
};

/// f(theta) = 0.5 theta^T A theta - b^T theta for symmetric positive-definite A.
class QuadraticForm final : public Problem {
 public:
  /// `a` is row-major dimension x dimension.
  QuadraticForm(std::vector<double> a, std::vector<double> b);
  std::string name() const override { return "quadratic_form"; }
  std::size_t dimension() const override { return b_.size(); }
  double evaluate(std::span<const double> theta, std::span<double> grad) const override;
  std::vector<double> initial_point(std::uint64_t seed) const override;

 private:
  std::vector<double> a_, b_;
};

/// Chained Rosenbrock sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2.
class Rosenbrock final : public Problem {
 public:
  explicit Rosenbrock(std::size_t dimension);
  std::string name() const override { return "rosenbrock"; }
  std::size_t dimension() const override { return dim_; }
  double evaluate(std::span<const double> theta, std::span<double> grad) const override;
  /// The classic start (-1.2, 1, -1.2, 1, ...).
  std::vector<double> initial_point(std::uint64_t seed) const override;
  std::optional<std::vector<double>> known_minimizer() const override;
  std::optional<double> known_minimum() const override { return 0.0; }

 private:
  std::size_t dim_;
};

/// One-dimensional staircase: flat plateaus centred on multiples of
/// `period`, a gentle downhill tilt between them, and one sharp drop of
/// `spike_depth` midway between consecutive plateau centres. The drop is a
/// raised-cosine gradient spike of half-width `spike_width`, so the
/// function is C2 and its gradient vanishes exactly at plateau centres.
struct Demo1dConfig {
  double period = 0.1;
  double spike_width = 0.01;
  double spike_depth = 0.05;
  double tilt = 0.1;
  double start = 0.01;
};

class Demo1d final : public Problem {
 public:
  explicit Demo1d(Demo1dConfig config = {});
  std::string name() const override { return "demo1d"; }
  std::size_t dimension() const override { return 1; }
  double evaluate(std::span<const double> theta, std::span<double> grad) const override;
  std::vector<double> initial_point(std::uint64_t seed) const override;
  const Demo1dConfig& config() const { return config_; }

 private:
  Demo1dConfig config_;
};

}  // namespace frankopt
