#include <cmath>

#include "kernels_impl.hpp"

namespace smi::kernels {
namespace {

double sum_ref(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc;
}

double sum_sq_dev_ref(std::span<const double> x, double mean) {
  double acc = 0.0;
  for (double v : x) {
    const double d = v - mean;
    acc += d * d;
  }
  return acc;
}

void scale_ref(std::span<const double> x, double gain, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * gain;
}

std::size_t quantize_ref(std::span<const double> x, double lsb, double lo_code, double hi_code,
                         std::span<double> out) {
  const double inv = 1.0 / lsb;
  std::size_t clipped = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double code = std::nearbyint(x[i] * inv);
    if (code <= lo_code) {
      clipped += code < lo_code;
      code = lo_code;
    } else if (code >= hi_code) {
      clipped += code > hi_code;
      code = hi_code;
    }
    out[i] = code * lsb;
  }
  return clipped;
}

double dot_ref(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

const KernelTable& scalar() {
  static const KernelTable table{"scalar", sum_ref, sum_sq_dev_ref, scale_ref, quantize_ref,
                                 dot_ref};
  return table;
}

}  // namespace smi::kernels
