#include <immintrin.h>

#include <bit>
#include <cmath>

#include "kernels_impl.hpp"

namespace smi::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(std::span<const double> x) {
  const double* p = x.data();
  const std::size_t n = x.size();
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(p + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(p + i + 4));
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += p[i];
  return acc;
}

double sum_sq_dev_avx2(std::span<const double> x, double mean) {
  const double* p = x.data();
  const std::size_t n = x.size();
  const __m256d m = _mm256_set1_pd(mean);
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(p + i), m);
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(p + i + 4), m);
    a0 = _mm256_fmadd_pd(d0, d0, a0);
    a1 = _mm256_fmadd_pd(d1, d1, a1);
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) {
    const double d = p[i] - mean;
    acc += d * d;
  }
  return acc;
}

void scale_avx2(std::span<const double> x, double gain, std::span<double> out) {
  const double* p = x.data();
  double* q = out.data();
  const std::size_t n = x.size();
  const __m256d g = _mm256_set1_pd(gain);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(q + i, _mm256_mul_pd(_mm256_loadu_pd(p + i), g));
  for (; i < n; ++i) q[i] = p[i] * gain;
}

std::size_t quantize_avx2(std::span<const double> x, double lsb, double lo_code, double hi_code,
                          std::span<double> out) {
  const double* p = x.data();
  double* q = out.data();
  const std::size_t n = x.size();
  const double inv = 1.0 / lsb;
  const __m256d vinv = _mm256_set1_pd(inv);
  const __m256d vlsb = _mm256_set1_pd(lsb);
  const __m256d vlo = _mm256_set1_pd(lo_code);
  const __m256d vhi = _mm256_set1_pd(hi_code);
  std::size_t clipped = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d code = _mm256_round_pd(_mm256_mul_pd(_mm256_loadu_pd(p + i), vinv),
                                   _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    const int below = _mm256_movemask_pd(_mm256_cmp_pd(code, vlo, _CMP_LT_OQ));
    const int above = _mm256_movemask_pd(_mm256_cmp_pd(code, vhi, _CMP_GT_OQ));
    clipped += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(below | above)));
    code = _mm256_min_pd(_mm256_max_pd(code, vlo), vhi);
    _mm256_storeu_pd(q + i, _mm256_mul_pd(code, vlsb));
  }
  for (; i < n; ++i) {
    double code = std::nearbyint(p[i] * inv);
    if (code < lo_code) {
      ++clipped;
      code = lo_code;
    } else if (code > hi_code) {
      ++clipped;
      code = hi_code;
    }
    q[i] = code * lsb;
  }
  return clipped;
}

double dot_avx2(std::span<const double> a, std::span<const double> b) {
  const double* p = a.data();
  const double* r = b.data();
  const std::size_t n = a.size();
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(p + i), _mm256_loadu_pd(r + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(p + i + 4), _mm256_loadu_pd(r + i + 4), a1);
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += p[i] * r[i];
  return acc;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", sum_avx2, sum_sq_dev_avx2, scale_avx2, quantize_avx2,
                                 dot_avx2};
  return table;
}

}  // namespace smi::kernels::detail
