#include "element_ops.hpp"

namespace frankopt::simd {
namespace {

void frankenstein_scalar(const FrankensteinArgs& a) {
  for (std::size_t k = 0; k < a.n; ++k) frankenstein_element(a, k);
}

void rmsprop_scalar(const RmspropArgs& a) {
  for (std::size_t k = 0; k < a.n; ++k) rmsprop_element(a, k);
}

void adam_scalar(const AdamArgs& a) {
  for (std::size_t k = 0; k < a.n; ++k) adam_element(a, k);
}

void adabelief_scalar(const AdaBeliefArgs& a) {
  for (std::size_t k = 0; k < a.n; ++k) adabelief_element(a, k);
}

void lj_row_scalar(const LjRowArgs& a) {
  for (std::size_t j = a.i + 1; j < a.n; ++j) lj_pair_element(a, j);
}

}  // namespace

namespace detail {
const KernelTable kScalarTable{Backend::scalar, frankenstein_scalar, rmsprop_scalar,
                               adam_scalar,     adabelief_scalar,    lj_row_scalar};
}  // namespace detail

}  // namespace frankopt::simd
