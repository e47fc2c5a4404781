#include "frankopt/baselines/line_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace frankopt {
namespace {

struct Probe {
  double step = 0.0;
  double f = 0.0;
  double slope = 0.0;  // directional derivative at the probe
  std::vector<double> theta;
  Evaluation eval;
};

class LineFunction {
 public:
  LineFunction(Objective& f, std::span<const double> theta, std::span<const double> d)
      : f_(f), theta_(theta), d_(d) {}

  Probe at(double s) {
    Probe p;
    p.step = s;
    p.theta.resize(theta_.size());
    for (std::size_t i = 0; i < theta_.size(); ++i) p.theta[i] = theta_[i] + s * d_[i];
    p.eval = evaluate_at(f_, p.theta);
    p.f = p.eval.loss;
    p.slope = dot(p.eval.grad, d_);
    ++evaluations;
    return p;
  }

  std::uint64_t evaluations = 0;

 private:
  Objective& f_;
  std::span<const double> theta_;
  std::span<const double> d_;
};

LineSearchResult accept(Probe&& p, std::uint64_t evaluations) {
  LineSearchResult r;
  r.ok = true;
  r.step = p.step;
  r.theta = std::move(p.theta);
  r.eval = std::move(p.eval);
  r.evaluations = evaluations;
  return r;
}

LineSearchResult failure(std::uint64_t evaluations) {
  LineSearchResult r;
  r.evaluations = evaluations;
  return r;
}

bool finite(const Probe& p) { return std::isfinite(p.f) && std::isfinite(p.slope); }

double cubic_minimizer(const Probe& lo, const Probe& hi) {
  const double a = lo.step, b = hi.step;
  const double d1 = lo.slope + hi.slope - 3.0 * (lo.f - hi.f) / (a - b);
  const double disc = d1 * d1 - lo.slope * hi.slope;
  const double lo_end = std::min(a, b), hi_end = std::max(a, b);
  const double width = hi_end - lo_end;
  const double mid = 0.5 * (a + b);
  if (!(disc >= 0.0) || !finite(lo) || !finite(hi)) return mid;
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double denom = hi.slope - lo.slope + 2.0 * d2;
  if (denom == 0.0) return mid;
  const double s = b - (b - a) * (hi.slope + d2 - d1) / denom;
  if (!std::isfinite(s) || s < lo_end + 0.1 * width || s > hi_end - 0.1 * width) return mid;
  return s;
}

}  // namespace

double max_step_for(std::span<const double> direction, double max_move) {
  const double d_inf = norm_inf(direction);
  if (d_inf == 0.0 || !std::isfinite(max_move)) return std::numeric_limits<double>::infinity();
  return max_move / d_inf;
}

LineSearchResult armijo_backtracking(Objective& f, std::span<const double> theta,
                                     const Evaluation& at_theta, std::span<const double> direction,
                                     double initial_step, const LineSearchParams& params) {
  const double slope0 = dot(at_theta.grad, direction);
  LineFunction line(f, theta, direction);
  if (!(slope0 < 0.0)) return failure(0);
  double s = initial_step;
  for (int k = 0; k < params.max_evaluations; ++k) {
    Probe p = line.at(s);
    if (std::isfinite(p.f) && p.f <= at_theta.loss + params.c1 * s * slope0) {
      return accept(std::move(p), line.evaluations);
    }
    if (!std::isfinite(p.f)) {
      s *= 0.1;
      continue;
    }
    const double s_quad = -slope0 * s * s / (2.0 * (p.f - at_theta.loss - slope0 * s));
    s = std::clamp(s_quad, 0.1 * s, 0.5 * s);
  }
  return failure(line.evaluations);
}

LineSearchResult strong_wolfe(Objective& f, std::span<const double> theta,
                              const Evaluation& at_theta, std::span<const double> direction,
                              double initial_step, double max_step, const LineSearchParams& params) {
  const double f0 = at_theta.loss;
  const double slope0 = dot(at_theta.grad, direction);
  if (!(slope0 < 0.0)) return failure(0);
  LineFunction line(f, theta, direction);

  auto sufficient = [&](const Probe& p) { return p.f <= f0 + params.c1 * p.step * slope0; };
  auto curvature = [&](const Probe& p) { return std::fabs(p.slope) <= -params.c2 * slope0; };

  auto zoom = [&](Probe lo, Probe hi) -> LineSearchResult {
    while (line.evaluations < static_cast<std::uint64_t>(params.max_evaluations)) {
      const double s = cubic_minimizer(lo, hi);
      if (std::fabs(hi.step - lo.step) <= 1e-14 * std::max(1.0, std::fabs(lo.step))) break;
      Probe p = line.at(s);
      if (!finite(p) || !sufficient(p) || p.f >= lo.f) {
        hi = std::move(p);
      } else {
        if (curvature(p)) return accept(std::move(p), line.evaluations);
        if (p.slope * (hi.step - lo.step) >= 0.0) hi = lo;
        lo = std::move(p);
      }
    }
    // Budget exhausted: the low end still satisfies sufficient decrease.
    if (lo.step > 0.0) return accept(std::move(lo), line.evaluations);
    return failure(line.evaluations);
  };

  Probe prev;
  prev.step = 0.0;
  prev.f = f0;
  prev.slope = slope0;
  prev.theta.assign(theta.begin(), theta.end());
  prev.eval = at_theta;

  double s = std::min(initial_step, max_step);
  for (int i = 0; line.evaluations < static_cast<std::uint64_t>(params.max_evaluations); ++i) {
    Probe p = line.at(s);
    if (!finite(p) || !sufficient(p) || (i > 0 && p.f >= prev.f)) return zoom(std::move(prev), std::move(p));
    if (curvature(p)) return accept(std::move(p), line.evaluations);
    if (p.slope >= 0.0) return zoom(std::move(p), std::move(prev));
    if (s >= max_step) return accept(std::move(p), line.evaluations);
    prev = std::move(p);
    s = std::min(2.0 * s, max_step);
  }
  if (prev.step > 0.0) return accept(std::move(prev), line.evaluations);
  return failure(line.evaluations);
}

LineSearchResult secant_exact(Objective& f, std::span<const double> theta,
                              const Evaluation& at_theta, std::span<const double> direction,
                              double initial_step, const LineSearchParams& params) {
  const double slope0 = dot(at_theta.grad, direction);
  if (!(slope0 < 0.0)) return failure(0);
  LineFunction line(f, theta, direction);
  const double tol = 1e-10 * std::fabs(slope0);
  double s_prev = 0.0, slope_prev = slope0;
  Probe p = line.at(initial_step);
  while (finite(p) && std::fabs(p.slope) > tol &&
         line.evaluations < static_cast<std::uint64_t>(params.max_evaluations)) {
    const double denom = p.slope - slope_prev;
    if (denom == 0.0) break;
    const double s_next = p.step - p.slope * (p.step - s_prev) / denom;
    if (!(s_next > 0.0) || !std::isfinite(s_next)) break;
    s_prev = p.step;
    slope_prev = p.slope;
    p = line.at(s_next);
  }
  if (finite(p) && p.f <= at_theta.loss) return accept(std::move(p), line.evaluations);
  return failure(line.evaluations);
}

// ---------------------------------------------------------------- steepest descent

SteepestDescent::SteepestDescent(const BaselineConfig& config)
    : step_(checked_learning_rate(config.lr)), params_(config.line_search) {}

void SteepestDescent::reset(std::span<const double> theta0) { theta_.assign(theta0.begin(), theta0.end()); }

void SteepestDescent::set_learning_rate(double lr) { step_ = checked_learning_rate(lr); }

namespace {

StepOutcome steepest_step(Objective& f, std::vector<double>& theta, const Evaluation& current,
                          double step, const LineSearchParams& params, std::uint64_t spent) {
  std::vector<double> d(current.grad.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = -current.grad[i];
  const double s0 = std::min(step, max_step_for(d, params.max_move));
  LineSearchResult r = armijo_backtracking(f, theta, current, d, s0, params);
  StepOutcome out{{}, spent + r.evaluations};
  if (!r.ok) {
    out.eval = current;
    out.stalled = true;
    return out;
  }
  theta = std::move(r.theta);
  out.eval = std::move(r.eval);
  return out;
}

}  // namespace

StepOutcome SteepestDescent::advance(Objective& f, const Evaluation& current) {
  require_finite(current.grad);
  return steepest_step(f, theta_, current, step_, params_, 0);
}

// ---------------------------------------------------------------- conjugate gradient

ConjugateGradient::ConjugateGradient(const BaselineConfig& config)
    : initial_step_(checked_learning_rate(config.lr)), params_(config.line_search) {}

void ConjugateGradient::reset(std::span<const double> theta0) {
  theta_.assign(theta0.begin(), theta0.end());
  g_prev_.clear();
  d_prev_.clear();
  restart_ = true;
  restarts_ = fallbacks_ = 0;
  gd_prev_ = step_prev_ = 0.0;
}

void ConjugateGradient::set_learning_rate(double lr) { initial_step_ = checked_learning_rate(lr); }

namespace {

LineSearchResult cg_search(Objective& f, std::span<const double> theta, const Evaluation& cur,
                           std::span<const double> d, double s0, const LineSearchParams& p) {
  if (p.exact) return secant_exact(f, theta, cur, d, s0, p);
  if (p.cg_armijo_only) return armijo_backtracking(f, theta, cur, d, s0, p);
  LineSearchParams q = p;
  q.c2 = p.cg_c2;
  return strong_wolfe(f, theta, cur, d, s0, max_step_for(d, p.max_move), q);
}

}  // namespace

StepOutcome ConjugateGradient::advance(Objective& f, const Evaluation& current) {
  const auto& g = current.grad;
  require_finite(g);
  const std::size_t n = g.size();
  std::vector<double> d(n);
  bool steepest = restart_;
  if (!restart_) {
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) num += g[i] * (g[i] - g_prev_[i]);
    const double beta = std::max(0.0, num / dot(g_prev_, g_prev_));
    for (std::size_t i = 0; i < n; ++i) d[i] = -g[i] + beta * d_prev_[i];
    if (!(dot(g, d) < 0.0)) {
      steepest = true;
      ++restarts_;
    }
  }
  if (steepest) {
    for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
  }
  const double gd = dot(g, d);

  double s0 = initial_step_;
  if (!restart_ && step_prev_ > 0.0 && gd_prev_ < 0.0) s0 = step_prev_ * gd_prev_ / gd;
  s0 = std::min(s0, max_step_for(d, params_.max_move));

  LineSearchResult r = cg_search(f, theta_, current, d, s0, params_);
  if (!r.ok) {
    ++fallbacks_;
    restart_ = true;
    StepOutcome out = steepest_step(f, theta_, current, initial_step_, params_, r.evaluations);
    out.fallback = true;
    return out;
  }
  g_prev_ = g;
  d_prev_ = std::move(d);
  gd_prev_ = gd;
  step_prev_ = r.step;
  restart_ = false;
  theta_ = std::move(r.theta);
  return StepOutcome{std::move(r.eval), r.evaluations};
}

// ---------------------------------------------------------------- L-BFGS

Lbfgs::Lbfgs(const BaselineConfig& config)
    : initial_scale_(checked_learning_rate(config.lr)),
      memory_(config.lbfgs_memory),
      params_(config.line_search) {
  if (memory_ < 1) throw std::invalid_argument("lbfgs memory must be >= 1");
}

void Lbfgs::reset(std::span<const double> theta0) {
  theta_.assign(theta0.begin(), theta0.end());
  s_hist_.clear();
  y_hist_.clear();
  rho_hist_.clear();
  fallbacks_ = 0;
}

void Lbfgs::set_learning_rate(double lr) { initial_scale_ = checked_learning_rate(lr); }

std::vector<double> Lbfgs::two_loop(std::span<const double> g) const {
  std::vector<double> q(g.begin(), g.end());
  const std::size_t k = s_hist_.size();
  std::vector<double> alpha(k);
  for (std::size_t j = k; j-- > 0;) {
    alpha[j] = rho_hist_[j] * dot(s_hist_[j], q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[j] * y_hist_[j][i];
  }
  double gamma = initial_scale_;
  if (k > 0) gamma = dot(s_hist_.back(), y_hist_.back()) / dot(y_hist_.back(), y_hist_.back());
  for (double& x : q) x *= gamma;
  for (std::size_t j = 0; j < k; ++j) {
    const double beta = rho_hist_[j] * dot(y_hist_[j], q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += s_hist_[j][i] * (alpha[j] - beta);
  }
  for (double& x : q) x = -x;
  return q;
}

StepOutcome Lbfgs::advance(Objective& f, const Evaluation& current) {
  require_finite(current.grad);
  std::vector<double> d = two_loop(current.grad);
  if (!(dot(current.grad, d) < 0.0)) {
    s_hist_.clear();
    y_hist_.clear();
    rho_hist_.clear();
    d = two_loop(current.grad);
  }
  const double max_step = max_step_for(d, params_.max_move);
  LineSearchResult r = strong_wolfe(f, theta_, current, d, 1.0, max_step, params_);
  if (!r.ok) {
    ++fallbacks_;
    s_hist_.clear();
    y_hist_.clear();
    rho_hist_.clear();
    StepOutcome out = steepest_step(f, theta_, current, initial_scale_, params_, r.evaluations);
    out.fallback = true;
    return out;
  }
  std::vector<double> s(theta_.size()), y(theta_.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = r.theta[i] - theta_[i];
    y[i] = r.eval.grad[i] - current.grad[i];
  }
  const double sy = dot(s, y);
  if (sy > 1e-12 * norm2(s) * norm2(y)) {
    s_hist_.push_back(std::move(s));
    y_hist_.push_back(std::move(y));
    rho_hist_.push_back(1.0 / sy);
    if (static_cast<int>(s_hist_.size()) > memory_) {
      s_hist_.pop_front();
      y_hist_.pop_front();
      rho_hist_.pop_front();
    }
  }
  theta_ = std::move(r.theta);
  return StepOutcome{std::move(r.eval), r.evaluations};
}

}  // namespace frankopt
