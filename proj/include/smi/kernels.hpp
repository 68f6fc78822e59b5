#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops shared by the readout chain and the analysis
// pipeline. Every entry has a scalar reference implementation; an AVX2/FMA
// variant is compiled in when the toolchain supports it and picked at
// startup when the CPU does. Set SMI_KERNELS=scalar to force the reference.
namespace smi::kernels {

struct KernelTable {
  std::string_view name;

  double (*sum)(std::span<const double> x);
  // sum_i (x_i - mean)^2
  double (*sum_sq_dev)(std::span<const double> x, double mean);
  void (*scale)(std::span<const double> x, double gain, std::span<double> out);
  // Mid-tread quantizer: out = clamp(nearbyint(x / lsb), lo_code, hi_code) * lsb.
  // Returns the number of samples that hit a rail.
  std::size_t (*quantize)(std::span<const double> x, double lsb, double lo_code,
                          double hi_code, std::span<double> out);
  double (*dot)(std::span<const double> a, std::span<const double> b);
};

const KernelTable& scalar();

// nullptr when the variant was not built or the CPU lacks AVX2+FMA.
const KernelTable* avx2();

// Selected once per process.
const KernelTable& active();

}  // namespace smi::kernels
