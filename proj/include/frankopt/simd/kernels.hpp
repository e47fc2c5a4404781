#pragma once

// Elementwise update kernels with one scalar reference implementation and
// vector variants selected at runtime. Every variant performs the same IEEE
// operations in the same order, so all backends agree bitwise.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace frankopt::simd {

enum class Backend { scalar, avx2 };

std::string_view to_string(Backend backend);
std::optional<Backend> parse_backend(std::string_view name);

/// Switches that reshape the Frankenstein update; all off is the full rule.
struct FrankensteinSwitches {
  bool disable_v = false;
  bool disable_vmax = false;
  bool disable_v_ema = false;
  bool disable_rho = false;
  bool disable_xi = false;
  bool fix_beta2 = false;
  double beta2_value = 0.999;
  bool floor_beta2 = false;
  double beta2_floor = 0.0;
};

/// One Frankenstein step over `n` elements. State arrays are updated in
/// place; scratch arrays receive the per-element diagnostics.
struct FrankensteinArgs {
  std::size_t n = 0;
  double* theta = nullptr;
  double* m = nullptr;
  double* v = nullptr;
  double* x_prev = nullptr;
  const double* g = nullptr;
  double beta1 = 0.9;
  double lr = 1e-3;
  double epsilon = 1e-8;
  FrankensteinSwitches sw;
  double* p = nullptr;
  double* rho = nullptr;
  double* xi = nullptr;
  double* beta2 = nullptr;
  double* x = nullptr;
  double* v_max = nullptr;
};

// Adam-family updates. Bias corrections are passed in as the divisors
// 1 - beta^t so the kernels stay free of transcendental calls.
struct RmspropArgs {
  std::size_t n = 0;
  double* theta = nullptr;
  double* v = nullptr;
  const double* g = nullptr;
  double lr = 1e-3, decay = 0.9, epsilon = 1e-8;
};

struct AdamArgs {
  std::size_t n = 0;
  double* theta = nullptr;
  double* m = nullptr;
  double* v = nullptr;
  double* v_hat_max = nullptr;  // non-null selects the AMSGrad max rule
  const double* g = nullptr;
  double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
  double bias1 = 1.0, bias2 = 1.0;
};

struct AdaBeliefArgs {
  std::size_t n = 0;
  double* theta = nullptr;
  double* m = nullptr;
  double* s = nullptr;
  const double* g = nullptr;
  double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
  double bias1 = 1.0, bias2 = 1.0;
};

/// Lennard-Jones pair terms between atom `i` and atoms i+1..n-1, with
/// positions in structure-of-arrays layout. Output k corresponds to atom
/// i+1+k: energy term 4(r^-12 - r^-6), force scale 24(2r^-12 - r^-6)/r^2
/// and displacement r_i - r_j.
struct LjRowArgs {
  std::size_t n = 0;
  std::size_t i = 0;
  const double* xs = nullptr;
  const double* ys = nullptr;
  const double* zs = nullptr;
  double* energy = nullptr;
  double* scale = nullptr;
  double* dx = nullptr;
  double* dy = nullptr;
  double* dz = nullptr;
  double* r2 = nullptr;
};

struct KernelTable {
  Backend backend;
  void (*frankenstein)(const FrankensteinArgs&);
  void (*rmsprop)(const RmspropArgs&);
  void (*adam)(const AdamArgs&);
  void (*adabelief)(const AdaBeliefArgs&);
  void (*lj_row)(const LjRowArgs&);
};

/// Backends compiled in and supported by the running CPU.
std::vector<Backend> available_backends();

/// Table for a specific backend; throws if it is unavailable here.
const KernelTable& kernels(Backend backend);

/// Active table: the best available backend, unless the FRANKOPT_SIMD
/// environment variable (scalar|avx2) names another one.
const KernelTable& kernels();

namespace detail {
extern const KernelTable kScalarTable;
#if defined(FRANKOPT_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
}  // namespace detail

}  // namespace frankopt::simd
