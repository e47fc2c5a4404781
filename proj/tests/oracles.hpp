#pragma once

// Reference implementations used only by the tests. They are written from
// the published update rules, element by element, with no shared code from
// src/. Where a test demands bitwise agreement the arithmetic is spelled out
// in the natural left-to-right order of the formula.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace oracle {

// ------------------------------------------------------------------ Frankenstein

struct FrankSwitches {
  bool fixed_beta1 = false;
  double beta1_value = 0.9;
  bool decouple = false;  // beta1 from the base rate
  bool fixed_beta2 = false;
  double beta2_value = 0.999;
  bool no_v = false;
  bool no_vmax = false;
  bool no_v_ema = false;
};

struct FrankScalar {
  double theta, m = 0.0, v = 0.0, x_prev;
};

inline double frank_beta1(double lr) {
  double c = 0.1 * std::sqrt(lr / 1e-3);
  if (c < 0.05) c = 0.05;
  if (c > 0.99) c = 0.99;
  return 1.0 - c;
}

/// One element of the Frankenstein update with the reduced-rule switches.
/// `lr` is the scheduled rate, `base_lr` the configured one.
inline void frank_update(FrankScalar& s, double g, double lr, double base_lr, double eps,
                         const FrankSwitches& sw = {}) {
  const double e = std::numbers::e;
  double b1 = sw.fixed_beta1 ? sw.beta1_value : frank_beta1(sw.decouple ? base_lr : lr);
  const double P = std::acos(std::tanh(s.m * g)) / std::numbers::pi;
  const double x = g * g + eps;

  double arg = e + std::sqrt(x) + 0.5 - P;
  if (arg < std::exp(0.8)) arg = std::exp(0.8);
  if (arg > std::exp(1.05)) arg = std::exp(1.05);
  const double rho = std::log(arg);
  const double xi = (1.0 + std::exp(-0.5)) / (1.0 + std::exp(-std::fabs(s.x_prev - P)));
  const double beta2 = sw.fixed_beta2 ? sw.beta2_value : 1.0 - x / s.x_prev * std::fabs(0.5 - P);

  double v_used, v_kept;
  if (sw.no_vmax && sw.no_v_ema) {
    v_used = x;
    v_kept = x;
  } else if (sw.no_vmax) {
    v_kept = beta2 * s.v + (1.0 - beta2) * x;
    v_used = v_kept > eps ? v_kept : eps;
  } else {
    const double vm = s.v > x ? s.v : x;
    v_used = vm;
    v_kept = sw.no_v_ema ? vm : beta2 * vm + (1.0 - beta2) * x;
  }
  const double sq = sw.no_v ? 1.0 : std::sqrt(v_used);
  s.m = rho * b1 * s.m - lr * g * xi / sq;
  s.theta = s.theta + b1 * s.m - lr * g * xi / sq;
  s.v = v_kept;
  s.x_prev = x;
}

// ------------------------------------------------------------------ baselines

struct SgdNag {
  double lr, mu;
  std::vector<double> theta, buf;
  void step(std::span<const double> g) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      buf[i] = mu * buf[i] + g[i];
      theta[i] = theta[i] - lr * (g[i] + mu * buf[i]);
    }
  }
};

struct RmsPropRef {
  double lr, decay, eps;
  std::vector<double> theta, v;
  void step(std::span<const double> g) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      v[i] = decay * v[i] + (1.0 - decay) * (g[i] * g[i]);
      theta[i] = theta[i] - lr * g[i] / (std::sqrt(v[i]) + eps);
    }
  }
};

/// Adam with bias correction; `ams` keeps the running max of v_hat.
struct AdamRef {
  double lr, b1, b2, eps;
  bool ams = false;
  std::vector<double> theta, m, v, vmax;
  int t = 0;
  void step(std::span<const double> g) {
    ++t;
    const double c1 = 1.0 - std::pow(b1, t), c2 = 1.0 - std::pow(b2, t);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * (g[i] * g[i]);
      double vh = v[i] / c2;
      if (ams) {
        vmax[i] = std::max(vmax[i], vh);
        vh = vmax[i];
      }
      theta[i] = theta[i] - lr * (m[i] / c1) / (std::sqrt(vh) + eps);
    }
  }
};

/// AdaBound: Adam step size clipped into bounds that close on final_lr.
struct AdaBoundRef {
  double lr, b1, b2, eps, final_lr, gamma;
  std::vector<double> theta, m, v;
  int t = 0;
  void step(std::span<const double> g) {
    ++t;
    const double c1 = 1.0 - std::pow(b1, t), c2 = 1.0 - std::pow(b2, t);
    // The published code rescales the final rate by lr / initial lr.
    const double fl = final_lr * lr / lr;
    const double lo = fl * (1.0 - 1.0 / (gamma * t + 1.0));
    const double hi = fl * (1.0 + 1.0 / (gamma * t));
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * (g[i] * g[i]);
      double r = lr * std::sqrt(c2) / c1 / (std::sqrt(v[i]) + eps);
      r = std::min(std::max(r, lo), hi);
      theta[i] = theta[i] - r * m[i];
    }
  }
};

/// Padam: AMSGrad max rule with the partial power p on v_hat.
struct PadamRef {
  double lr, b1, b2, eps, p;
  std::vector<double> theta, m, v, vmax;
  int t = 0;
  void step(std::span<const double> g) {
    ++t;
    const double c1 = 1.0 - std::pow(b1, t), c2 = 1.0 - std::pow(b2, t);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * (g[i] * g[i]);
      vmax[i] = std::max(vmax[i], v[i] / c2);
      theta[i] = theta[i] - lr * (m[i] / c1) / (std::pow(vmax[i], p) + eps);
    }
  }
};

/// AdaBelief: second moment of (g - m), with eps added inside the EMA.
struct AdaBeliefRef {
  double lr, b1, b2, eps;
  std::vector<double> theta, m, s;
  int t = 0;
  void step(std::span<const double> g) {
    ++t;
    const double c1 = 1.0 - std::pow(b1, t), c2 = 1.0 - std::pow(b2, t);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      const double d = g[i] - m[i];
      s[i] = b2 * s[i] + (1.0 - b2) * (d * d) + eps;
      theta[i] = theta[i] - lr * (m[i] / c1) / (std::sqrt(s[i] / c2) + eps);
    }
  }
};

// ------------------------------------------------------------------ helpers

inline std::uint64_t ulp_distance(double a, double b) {
  if (a == b) return 0;
  if (std::isnan(a) || std::isnan(b)) return UINT64_MAX;
  auto key = [](double x) {
    std::int64_t i;
    std::memcpy(&i, &x, sizeof i);
    return i < 0 ? INT64_MIN - i : i;
  };
  const std::int64_t ka = key(a), kb = key(b);
  return ka > kb ? static_cast<std::uint64_t>(ka - kb) : static_cast<std::uint64_t>(kb - ka);
}

inline std::uint64_t max_ulp(std::span<const double> a, std::span<const double> b) {
  std::uint64_t worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, ulp_distance(a[i], b[i]));
  return worst;
}

/// Fourth-order central differences of f at x.
inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    auto at = [&](double d) {
      x[i] = x0 + d;
      return f(x);
    };
    const double f1 = at(h) - at(-h);
    const double f2 = at(2 * h) - at(-2 * h);
    x[i] = x0;
    g[i] = (8.0 * f1 - f2) / (12.0 * h);
  }
  return g;
}

inline double rel_error(std::span<const double> approx, std::span<const double> exact, double floor) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    diff += (approx[i] - exact[i]) * (approx[i] - exact[i]);
    norm += exact[i] * exact[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), floor);
}

// ------------------------------------------------------------------ Lennard-Jones

/// Direct double loop over pairs, forces accumulated on both atoms.
inline double lj_energy(std::span<const double> p, std::vector<double>* forces = nullptr) {
  const std::size_t n = p.size() / 3;
  if (forces) forces->assign(p.size(), 0.0);
  double e = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double d[3], r2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        d[k] = p[3 * a + k] - p[3 * b + k];
        r2 += d[k] * d[k];
      }
      const double s6 = 1.0 / (r2 * r2 * r2);
      e += 4.0 * (s6 * s6 - s6);
      if (forces) {
        const double f_over_r = 24.0 * (2.0 * s6 * s6 - s6) / r2;
        for (int k = 0; k < 3; ++k) {
          (*forces)[3 * a + k] += f_over_r * d[k];
          (*forces)[3 * b + k] -= f_over_r * d[k];
        }
      }
    }
  }
  return e;
}

// ------------------------------------------------------------------ eigen

/// Cyclic Jacobi rotations on a dense symmetric matrix (row-major).
/// Returns eigenvalues in descending order with unit eigenvectors as columns of `vecs`.
inline std::vector<double> jacobi_eigen(std::vector<double> a, std::size_t n, std::vector<double>& vecs) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x * n + x] > a[y * n + y]; });
  std::vector<double> vals(n);
  vecs.assign(n * n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    vals[c] = a[order[c] * n + order[c]];
    for (std::size_t r = 0; r < n; ++r) vecs[r * n + c] = v[r * n + order[c]];
  }
  return vals;
}

}  // namespace oracle
