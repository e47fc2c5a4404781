// AVX2 variants. Compiled with -mavx2 only (no FMA) so every lane performs
// exactly the multiply/add/divide/sqrt sequence of the scalar reference.

#include <immintrin.h>

#include <array>

#include "element_ops.hpp"

namespace frankopt::simd {
namespace {

constexpr std::size_t kLanes = 4;

void frankenstein_avx2(const FrankensteinArgs& a) {
  const auto& sw = a.sw;
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d eps = _mm256_set1_pd(a.epsilon);
  const __m256d lr = _mm256_set1_pd(a.lr);
  const __m256d beta1 = _mm256_set1_pd(a.beta1);

  std::size_t k = 0;
  for (; k + kLanes <= a.n; k += kLanes) {
    const __m256d g = _mm256_loadu_pd(a.g + k);
    const __m256d m_prev = _mm256_loadu_pd(a.m + k);
    const __m256d x = _mm256_add_pd(_mm256_mul_pd(g, g), eps);
    _mm256_storeu_pd(a.x + k, x);

    // Transcendental factors go through the shared scalar reference.
    alignas(32) std::array<double, kLanes> mg, xs;
    _mm256_store_pd(mg.data(), m_prev);
    _mm256_store_pd(xs.data(), x);
    for (std::size_t l = 0; l < kLanes; ++l) {
      const FrankensteinFactors f =
          frankenstein_factors(sw, mg[l], a.g[k + l], xs[l], a.x_prev[k + l]);
      a.p[k + l] = f.p;
      a.rho[k + l] = f.rho;
      a.xi[k + l] = f.xi;
      a.beta2[k + l] = f.beta2;
    }
    const __m256d rho = _mm256_loadu_pd(a.rho + k);
    const __m256d xi = _mm256_loadu_pd(a.xi + k);
    const __m256d beta2 = _mm256_loadu_pd(a.beta2 + k);
    const __m256d v_prev = _mm256_loadu_pd(a.v + k);
    const __m256d one_minus_beta2 = _mm256_sub_pd(one, beta2);

    __m256d v_max;
    __m256d v_next;
    if (!sw.disable_vmax) {
      v_max = _mm256_max_pd(v_prev, x);
      v_next = sw.disable_v_ema
                   ? v_max
                   : _mm256_add_pd(_mm256_mul_pd(beta2, v_max), _mm256_mul_pd(one_minus_beta2, x));
    } else if (!sw.disable_v_ema) {
      v_next = _mm256_add_pd(_mm256_mul_pd(beta2, v_prev), _mm256_mul_pd(one_minus_beta2, x));
      v_max = _mm256_max_pd(v_next, eps);
    } else {
      v_max = x;
      v_next = x;
    }

    const __m256d step = sw.disable_v
                             ? _mm256_mul_pd(_mm256_mul_pd(lr, g), xi)
                             : _mm256_div_pd(_mm256_mul_pd(_mm256_mul_pd(lr, g), xi),
                                             _mm256_sqrt_pd(v_max));
    const __m256d m = _mm256_sub_pd(_mm256_mul_pd(_mm256_mul_pd(rho, beta1), m_prev), step);
    const __m256d theta = _mm256_loadu_pd(a.theta + k);
    _mm256_storeu_pd(a.theta + k,
                     _mm256_sub_pd(_mm256_add_pd(theta, _mm256_mul_pd(beta1, m)), step));
    _mm256_storeu_pd(a.m + k, m);
    _mm256_storeu_pd(a.v + k, v_next);
    _mm256_storeu_pd(a.x_prev + k, x);
    _mm256_storeu_pd(a.v_max + k, v_max);
  }
  for (; k < a.n; ++k) frankenstein_element(a, k);
}

void rmsprop_avx2(const RmspropArgs& a) {
  const __m256d decay = _mm256_set1_pd(a.decay);
  const __m256d one_minus_decay = _mm256_set1_pd(1.0 - a.decay);
  const __m256d lr = _mm256_set1_pd(a.lr);
  const __m256d eps = _mm256_set1_pd(a.epsilon);
  std::size_t k = 0;
  for (; k + kLanes <= a.n; k += kLanes) {
    const __m256d g = _mm256_loadu_pd(a.g + k);
    const __m256d v = _mm256_add_pd(_mm256_mul_pd(decay, _mm256_loadu_pd(a.v + k)),
                                    _mm256_mul_pd(one_minus_decay, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(a.v + k, v);
    const __m256d delta = _mm256_div_pd(_mm256_mul_pd(lr, g), _mm256_add_pd(_mm256_sqrt_pd(v), eps));
    _mm256_storeu_pd(a.theta + k, _mm256_sub_pd(_mm256_loadu_pd(a.theta + k), delta));
  }
  for (; k < a.n; ++k) rmsprop_element(a, k);
}

void adam_avx2(const AdamArgs& a) {
  const __m256d b1 = _mm256_set1_pd(a.beta1);
  const __m256d one_minus_b1 = _mm256_set1_pd(1.0 - a.beta1);
  const __m256d b2 = _mm256_set1_pd(a.beta2);
  const __m256d one_minus_b2 = _mm256_set1_pd(1.0 - a.beta2);
  const __m256d bias1 = _mm256_set1_pd(a.bias1);
  const __m256d bias2 = _mm256_set1_pd(a.bias2);
  const __m256d lr = _mm256_set1_pd(a.lr);
  const __m256d eps = _mm256_set1_pd(a.epsilon);
  std::size_t k = 0;
  for (; k + kLanes <= a.n; k += kLanes) {
    const __m256d g = _mm256_loadu_pd(a.g + k);
    const __m256d m = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(a.m + k)),
                                    _mm256_mul_pd(one_minus_b1, g));
    const __m256d v = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(a.v + k)),
                                    _mm256_mul_pd(one_minus_b2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(a.m + k, m);
    _mm256_storeu_pd(a.v + k, v);
    const __m256d m_hat = _mm256_div_pd(m, bias1);
    __m256d v_hat = _mm256_div_pd(v, bias2);
    if (a.v_hat_max != nullptr) {
      // std::max(prev, v_hat) keeps prev on ties; max_pd(v_hat, prev) keeps prev too.
      v_hat = _mm256_max_pd(v_hat, _mm256_loadu_pd(a.v_hat_max + k));
      _mm256_storeu_pd(a.v_hat_max + k, v_hat);
    }
    const __m256d delta =
        _mm256_div_pd(_mm256_mul_pd(lr, m_hat), _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps));
    _mm256_storeu_pd(a.theta + k, _mm256_sub_pd(_mm256_loadu_pd(a.theta + k), delta));
  }
  for (; k < a.n; ++k) adam_element(a, k);
}

void adabelief_avx2(const AdaBeliefArgs& a) {
  const __m256d b1 = _mm256_set1_pd(a.beta1);
  const __m256d one_minus_b1 = _mm256_set1_pd(1.0 - a.beta1);
  const __m256d b2 = _mm256_set1_pd(a.beta2);
  const __m256d one_minus_b2 = _mm256_set1_pd(1.0 - a.beta2);
  const __m256d bias1 = _mm256_set1_pd(a.bias1);
  const __m256d bias2 = _mm256_set1_pd(a.bias2);
  const __m256d lr = _mm256_set1_pd(a.lr);
  const __m256d eps = _mm256_set1_pd(a.epsilon);
  std::size_t k = 0;
  for (; k + kLanes <= a.n; k += kLanes) {
    const __m256d g = _mm256_loadu_pd(a.g + k);
    const __m256d m = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(a.m + k)),
                                    _mm256_mul_pd(one_minus_b1, g));
    const __m256d d = _mm256_sub_pd(g, m);
    const __m256d s = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(a.s + k)),
                      _mm256_mul_pd(one_minus_b2, _mm256_mul_pd(d, d))),
        eps);
    _mm256_storeu_pd(a.m + k, m);
    _mm256_storeu_pd(a.s + k, s);
    const __m256d m_hat = _mm256_div_pd(m, bias1);
    const __m256d s_hat = _mm256_div_pd(s, bias2);
    const __m256d delta =
        _mm256_div_pd(_mm256_mul_pd(lr, m_hat), _mm256_add_pd(_mm256_sqrt_pd(s_hat), eps));
    _mm256_storeu_pd(a.theta + k, _mm256_sub_pd(_mm256_loadu_pd(a.theta + k), delta));
  }
  for (; k < a.n; ++k) adabelief_element(a, k);
}

void lj_row_avx2(const LjRowArgs& a) {
  const __m256d xi = _mm256_set1_pd(a.xs[a.i]);
  const __m256d yi = _mm256_set1_pd(a.ys[a.i]);
  const __m256d zi = _mm256_set1_pd(a.zs[a.i]);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d four = _mm256_set1_pd(4.0);
  const __m256d twenty_four = _mm256_set1_pd(24.0);
  std::size_t j = a.i + 1;
  for (; j + kLanes <= a.n; j += kLanes) {
    const std::size_t k = j - a.i - 1;
    const __m256d dx = _mm256_sub_pd(xi, _mm256_loadu_pd(a.xs + j));
    const __m256d dy = _mm256_sub_pd(yi, _mm256_loadu_pd(a.ys + j));
    const __m256d dz = _mm256_sub_pd(zi, _mm256_loadu_pd(a.zs + j));
    const __m256d r2 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                     _mm256_mul_pd(dz, dz));
    const __m256d inv_r2 = _mm256_div_pd(one, r2);
    const __m256d inv_r6 = _mm256_mul_pd(_mm256_mul_pd(inv_r2, inv_r2), inv_r2);
    const __m256d inv_r12 = _mm256_mul_pd(inv_r6, inv_r6);
    _mm256_storeu_pd(a.energy + k, _mm256_mul_pd(four, _mm256_sub_pd(inv_r12, inv_r6)));
    _mm256_storeu_pd(
        a.scale + k,
        _mm256_mul_pd(_mm256_mul_pd(twenty_four, _mm256_sub_pd(_mm256_mul_pd(two, inv_r12), inv_r6)),
                      inv_r2));
    _mm256_storeu_pd(a.dx + k, dx);
    _mm256_storeu_pd(a.dy + k, dy);
    _mm256_storeu_pd(a.dz + k, dz);
    _mm256_storeu_pd(a.r2 + k, r2);
  }
  for (; j < a.n; ++j) lj_pair_element(a, j);
}

}  // namespace

namespace detail {
const KernelTable kAvx2Table{Backend::avx2, frankenstein_avx2, rmsprop_avx2,
                             adam_avx2,     adabelief_avx2,    lj_row_avx2};
}  // namespace detail

}  // namespace frankopt::simd
