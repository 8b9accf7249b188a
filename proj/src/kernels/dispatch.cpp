#include <cstdlib>
#include <string_view>

#include "dagsel/kernels/kernels.hpp"
#include "kernels_internal.hpp"

namespace dagsel::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& select() {
  const KernelTable* avx2 = avx2_kernels();
  if (const char* forced = std::getenv("DAGSEL_KERNELS")) {
    const std::string_view want(forced);
    if (want == "scalar") return scalar_kernels();
    if (want == "avx2" && avx2 != nullptr) return *avx2;
  }
  return avx2 != nullptr ? *avx2 : scalar_kernels();
}

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(DAGSEL_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace dagsel::kernels
