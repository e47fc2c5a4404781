#pragma once

// Per-element reference operations shared by every kernel backend. Vector
// variants use these for loop tails and must reproduce them lane by lane.

#include <algorithm>
#include <cmath>

#include "frankopt/core/rules.hpp"
#include "frankopt/simd/kernels.hpp"

namespace frankopt::simd {
namespace {

struct FrankensteinFactors {
  double p, rho, xi, beta2;
};

[[maybe_unused]] inline FrankensteinFactors frankenstein_factors(const FrankensteinSwitches& sw,
                                                                 double m, double g, double x,
                                                                 double x_prev) {
  FrankensteinFactors f;
  f.p = rule::p_factor(m * g);
  f.rho = sw.disable_rho ? 1.0 : rule::rho(x, f.p);
  f.xi = sw.disable_xi ? 1.0 : rule::xi(x_prev, f.p);
  f.beta2 = sw.fix_beta2 ? sw.beta2_value : rule::beta2(x, x_prev, f.p);
  if (sw.floor_beta2) f.beta2 = std::max(f.beta2, sw.beta2_floor);
  return f;
}

[[maybe_unused]] inline void frankenstein_element(const FrankensteinArgs& a, std::size_t k) {
  const auto& sw = a.sw;
  const double g = a.g[k];
  const double x = g * g + a.epsilon;
  const FrankensteinFactors f = frankenstein_factors(sw, a.m[k], g, x, a.x_prev[k]);

  double v_max;
  double v_next;
  if (!sw.disable_vmax) {
    v_max = std::max(a.v[k], x);
    v_next = sw.disable_v_ema ? v_max : f.beta2 * v_max + (1.0 - f.beta2) * x;
  } else if (!sw.disable_v_ema) {
    v_next = f.beta2 * a.v[k] + (1.0 - f.beta2) * x;
    v_max = std::max(v_next, a.epsilon);
  } else {
    v_max = x;
    v_next = x;
  }

  const double denom = sw.disable_v ? 1.0 : std::sqrt(v_max);
  const double step = ((a.lr * g) * f.xi) / denom;
  const double m = ((f.rho * a.beta1) * a.m[k]) - step;
  a.theta[k] = (a.theta[k] + a.beta1 * m) - step;
  a.m[k] = m;
  a.v[k] = v_next;
  a.x_prev[k] = x;

  a.p[k] = f.p;
  a.rho[k] = f.rho;
  a.xi[k] = f.xi;
  a.beta2[k] = f.beta2;
  a.x[k] = x;
  a.v_max[k] = v_max;
}

[[maybe_unused]] inline void rmsprop_element(const RmspropArgs& a, std::size_t k) {
  const double g = a.g[k];
  const double v = a.decay * a.v[k] + (1.0 - a.decay) * (g * g);
  a.v[k] = v;
  a.theta[k] = a.theta[k] - (a.lr * g) / (std::sqrt(v) + a.epsilon);
}

[[maybe_unused]] inline void adam_element(const AdamArgs& a, std::size_t k) {
  const double g = a.g[k];
  const double m = a.beta1 * a.m[k] + (1.0 - a.beta1) * g;
  const double v = a.beta2 * a.v[k] + (1.0 - a.beta2) * (g * g);
  a.m[k] = m;
  a.v[k] = v;
  const double m_hat = m / a.bias1;
  double v_hat = v / a.bias2;
  if (a.v_hat_max != nullptr) {
    v_hat = std::max(a.v_hat_max[k], v_hat);
    a.v_hat_max[k] = v_hat;
  }
  a.theta[k] = a.theta[k] - (a.lr * m_hat) / (std::sqrt(v_hat) + a.epsilon);
}

[[maybe_unused]] inline void adabelief_element(const AdaBeliefArgs& a, std::size_t k) {
  const double g = a.g[k];
  const double m = a.beta1 * a.m[k] + (1.0 - a.beta1) * g;
  const double d = g - m;
  const double s = (a.beta2 * a.s[k] + (1.0 - a.beta2) * (d * d)) + a.epsilon;
  a.m[k] = m;
  a.s[k] = s;
  const double m_hat = m / a.bias1;
  const double s_hat = s / a.bias2;
  a.theta[k] = a.theta[k] - (a.lr * m_hat) / (std::sqrt(s_hat) + a.epsilon);
}

[[maybe_unused]] inline void lj_pair_element(const LjRowArgs& a, std::size_t j) {
  const std::size_t k = j - a.i - 1;
  const double dx = a.xs[a.i] - a.xs[j];
  const double dy = a.ys[a.i] - a.ys[j];
  const double dz = a.zs[a.i] - a.zs[j];
  const double r2 = (dx * dx + dy * dy) + dz * dz;
  const double inv_r2 = 1.0 / r2;
  const double inv_r6 = (inv_r2 * inv_r2) * inv_r2;
  const double inv_r12 = inv_r6 * inv_r6;
  a.energy[k] = 4.0 * (inv_r12 - inv_r6);
  a.scale[k] = (24.0 * (2.0 * inv_r12 - inv_r6)) * inv_r2;
  a.dx[k] = dx;
  a.dy[k] = dy;
  a.dz[k] = dz;
  a.r2[k] = r2;
}

}  // namespace
}  // namespace frankopt::simd
