#pragma once

#include "smi/kernels.hpp"

namespace smi::kernels::detail {

#if defined(SMI_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table();
#endif

}  // namespace smi::kernels::detail
