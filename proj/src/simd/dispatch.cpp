#include <cstdlib>
#include <stdexcept>
#include <string>

#include "frankopt/simd/kernels.hpp"

namespace frankopt::simd {

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "unknown";
}

std::optional<Backend> parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::scalar;
  if (name == "avx2") return Backend::avx2;
  return std::nullopt;
}

namespace {

bool cpu_has_avx2() {
#if defined(FRANKOPT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& select_active() {
  if (const char* env = std::getenv("FRANKOPT_SIMD"); env != nullptr && *env != '\0') {
    const auto requested = parse_backend(env);
    if (!requested) {
      throw std::invalid_argument(std::string("FRANKOPT_SIMD: unknown backend '") + env + "'");
    }
    return kernels(*requested);
  }
  return kernels(available_backends().back());
}

}  // namespace

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::scalar};
  if (cpu_has_avx2()) out.push_back(Backend::avx2);
  return out;
}

const KernelTable& kernels(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return detail::kScalarTable;
    case Backend::avx2:
#if defined(FRANKOPT_HAVE_AVX2)
      if (cpu_has_avx2()) return detail::kAvx2Table;
#endif
      break;
  }
  throw std::runtime_error("SIMD backend '" + std::string(to_string(backend)) +
                           "' is not available on this machine");
}

const KernelTable& kernels() {
  static const KernelTable& active = select_active();
  return active;
}

}  // namespace frankopt::simd
