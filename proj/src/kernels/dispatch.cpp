#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace smi::kernels {
namespace {

[[maybe_unused]] bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  if (const char* env = std::getenv("SMI_KERNELS"); env && std::string_view(env) == "scalar") {
    return scalar();
  }
  if (const KernelTable* t = avx2()) return *t;
  return scalar();
}

}  // namespace

const KernelTable* avx2() {
#if defined(SMI_HAVE_AVX2_KERNELS)
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace smi::kernels
