#pragma once

#include "dagsel/kernels/kernels.hpp"

namespace dagsel::kernels::detail {

// x^e for e >= 0 by binary exponentiation, low bit first. The vector variants
// replay the same multiplication sequence lane-wise.
inline double ipow(double x, int e) {
  double result = 1.0;
  double base = x;
  while (e > 0) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e > 0) base *= base;
  }
  return result;
}

#if defined(DAGSEL_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace dagsel::kernels::detail
