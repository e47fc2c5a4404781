#include "frankopt/problems/functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace frankopt {

double Problem::evaluate_batch(std::span<const double> theta, std::span<const std::size_t>,
                               std::span<double> grad) const {
  if (sample_count() != 0) {
    throw std::logic_error(name() + ": stochastic problem without batch evaluation");
  }
  return evaluate(theta, grad);
}

namespace {

void check_dims(std::size_t expected, std::size_t theta, std::size_t grad, const std::string& who) {
  if (theta != expected || grad != expected) {
    throw std::invalid_argument(who + ": expected dimension " + std::to_string(expected));
  }
}

}  // namespace

// ---------------------------------------------------------------- quadratic

Quadratic::Quadratic(std::size_t dimension) : dim_(dimension) {
  if (dimension < 1) throw std::invalid_argument("quadratic: dimension must be >= 1");
}

double Quadratic::evaluate(std::span<const double> theta, std::span<double> grad) const {
  check_dims(dim_, theta.size(), grad.size(), "quadratic");
  double f = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    f += theta[i] * theta[i];
    grad[i] = theta[i];
  }
  return 0.5 * f;
}

std::vector<double> Quadratic::initial_point(std::uint64_t) const { return std::vector<double>(dim_, 1.0); }

std::optional<std::vector<double>> Quadratic::known_minimizer() const {
  return std::vector<double>(dim_, 0.0);
}

QuadraticForm::QuadraticForm(std::vector<double> a, std::vector<double> b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (b_.empty() || a_.size() != b_.size() * b_.size()) {
    throw std::invalid_argument("quadratic_form: A must be n x n for b of length n");
  }
}

double QuadraticForm::evaluate(std::span<const double> theta, std::span<double> grad) const {
  const std::size_t n = b_.size();
  check_dims(n, theta.size(), grad.size(), "quadratic_form");
  double f = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += a_[i * n + j] * theta[j];
    grad[i] = row - b_[i];
    f += theta[i] * (0.5 * row - b_[i]);
  }
  return f;
}

std::vector<double> QuadraticForm::initial_point(std::uint64_t) const {
  return std::vector<double>(b_.size(), 0.0);
}

// ---------------------------------------------------------------- Rosenbrock

Rosenbrock::Rosenbrock(std::size_t dimension) : dim_(dimension) {
  if (dimension < 2) throw std::invalid_argument("rosenbrock: dimension must be >= 2");
}

double Rosenbrock::evaluate(std::span<const double> x, std::span<double> grad) const {
  check_dims(dim_, x.size(), grad.size(), "rosenbrock");
  double f = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) grad[i] = 0.0;
  for (std::size_t i = 0; i + 1 < dim_; ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    f += 100.0 * a * a + b * b;
    grad[i] += -400.0 * x[i] * a - 2.0 * b;
    grad[i + 1] += 200.0 * a;
  }
  return f;
}

std::vector<double> Rosenbrock::initial_point(std::uint64_t) const {
  std::vector<double> x(dim_);
  for (std::size_t i = 0; i < dim_; ++i) x[i] = (i % 2 == 0) ? -1.2 : 1.0;
  return x;
}

std::optional<std::vector<double>> Rosenbrock::known_minimizer() const {
  return std::vector<double>(dim_, 1.0);
}

// ---------------------------------------------------------------- staircase

Demo1d::Demo1d(Demo1dConfig config) : config_(config) {
  if (!(config_.period > 0.0)) throw std::invalid_argument("demo1d: period must be positive");
  if (!(config_.spike_width > 0.0 && config_.spike_width < 0.5 * config_.period)) {
    throw std::invalid_argument("demo1d: spike_width must lie in (0, period/2)");
  }
  if (!(config_.spike_depth >= 0.0) || !(config_.tilt >= 0.0)) {
    throw std::invalid_argument("demo1d: spike_depth and tilt must be non-negative");
  }
}

double Demo1d::evaluate(std::span<const double> theta, std::span<double> grad) const {
  check_dims(1, theta.size(), grad.size(), "demo1d");
  const double L = config_.period;
  const double w = config_.spike_width;
  const double x = theta[0];
  const double cell = std::floor(x / L);
  const double r = x - cell * L;  // offset from the plateau centre, in [0, L)

  const double phase = std::numbers::pi * r / L;
  const double tilt_f = -config_.tilt * (0.5 * x - L / (4.0 * std::numbers::pi) * std::sin(2.0 * phase));
  const double sin_phase = std::sin(phase);
  const double tilt_g = -config_.tilt * sin_phase * sin_phase;

  const double u = r - 0.5 * L;
  double drop = 0.0, drop_g = 0.0;
  if (u >= w) {
    drop = 1.0;
  } else if (u > -w) {
    const double a = std::numbers::pi * u / w;
    drop = (u + w + (w / std::numbers::pi) * std::sin(a)) / (2.0 * w);
    drop_g = (1.0 + std::cos(a)) / (2.0 * w);
  }
  grad[0] = tilt_g - config_.spike_depth * drop_g;
  return tilt_f - config_.spike_depth * (cell + drop);
}

std::vector<double> Demo1d::initial_point(std::uint64_t) const { return {config_.start}; }

}  // namespace frankopt
