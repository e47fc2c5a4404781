#include "frankopt/core/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace frankopt {

Evaluation evaluate_at(Objective& f, std::span<const double> theta) {
  Evaluation e;
  e.grad.resize(theta.size());
  e.loss = f.evaluate(theta, e.grad);
  return e;
}

GradientMinimizer::GradientMinimizer(std::unique_ptr<GradientOptimizer> inner)
    : inner_(std::move(inner)) {
  if (!inner_) throw std::invalid_argument("GradientMinimizer needs an optimizer");
}

StepOutcome GradientMinimizer::advance(Objective& f, const Evaluation& current) {
  inner_->update(current.grad);
  return StepOutcome{evaluate_at(f, inner_->parameters()), 1};
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::fabs(x));
  return m;
}

double block_max_norm(std::span<const double> a, std::size_t block) {
  if (block <= 1) return norm_inf(a);
  double m = 0.0;
  for (std::size_t i = 0; i + block <= a.size(); i += block) {
    double s = 0.0;
    for (std::size_t k = 0; k < block; ++k) s += a[i + k] * a[i + k];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

}  // namespace frankopt
