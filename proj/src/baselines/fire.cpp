#include "frankopt/baselines/fire.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "frankopt/core/minimizer.hpp"

namespace frankopt {

Fire::Fire(FireParams params) : params_(params) {
  if (!(params_.dt > 0.0) || !(params_.dt_max >= params_.dt)) {
    throw std::invalid_argument("fire: need 0 < dt <= dt_max");
  }
  if (!(params_.max_move > 0.0)) throw std::invalid_argument("fire: max_move must be positive");
}

void Fire::reset(std::span<const double> theta0) {
  x_.assign(theta0.begin(), theta0.end());
  v_.assign(theta0.size(), 0.0);
  dt_ = params_.dt;
  alpha_ = params_.alpha_start;
  n_positive_ = 0;
  first_ = true;
  last_power_ = 0.0;
}

void Fire::overwrite_parameters(std::span<const double> theta) {
  if (theta.size() != x_.size()) throw std::invalid_argument("fire: dimension mismatch");
  std::copy(theta.begin(), theta.end(), x_.begin());
}

void Fire::update(std::span<const double> grad) {
  if (grad.size() != x_.size()) throw std::invalid_argument("fire: gradient length mismatch");
  require_finite(grad);
  const std::size_t n = x_.size();
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = -grad[i];

  if (!first_) {
    last_power_ = dot(f, v_);
    if (last_power_ > 0.0) {
      const double f_norm = norm2(f);
      const double v_norm = norm2(v_);
      const double mix = f_norm > 0.0 ? alpha_ * v_norm / f_norm : 0.0;
      for (std::size_t i = 0; i < n; ++i) v_[i] = (1.0 - alpha_) * v_[i] + mix * f[i];
      if (n_positive_ > params_.n_min) {
        dt_ = std::min(dt_ * params_.f_inc, params_.dt_max);
        alpha_ *= params_.f_alpha;
      }
      ++n_positive_;
    } else {
      std::fill(v_.begin(), v_.end(), 0.0);
      alpha_ = params_.alpha_start;
      dt_ *= params_.f_dec;
      n_positive_ = 0;
    }
  }
  first_ = false;

  std::vector<double> dr(n);
  for (std::size_t i = 0; i < n; ++i) {
    v_[i] += dt_ * f[i];
    dr[i] = dt_ * v_[i];
  }
  const double dr_norm = norm2(dr);
  const double scale = dr_norm > params_.max_move ? params_.max_move / dr_norm : 1.0;
  for (std::size_t i = 0; i < n; ++i) x_[i] += scale * dr[i];
}

}  // namespace frankopt
