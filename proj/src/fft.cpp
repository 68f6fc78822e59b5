#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace smi::fft {
namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using Buffer = std::unique_ptr<T[], FftwFree>;

}  // namespace

std::vector<std::complex<double>> forward(std::span<const double> x) {
  const std::size_t n = x.size();
  const std::size_t nb = n / 2 + 1;
  if (n == 0) return {};
  Buffer<double> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  Buffer<fftw_complex> out(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nb)));
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  std::copy(x.begin(), x.end(), in.get());
  fftw_execute(plan.get());
  std::vector<std::complex<double>> bins(nb);
  for (std::size_t k = 0; k < nb; ++k) bins[k] = {out[k][0], out[k][1]};
  return bins;
}

std::vector<double> inverse(std::span<const std::complex<double>> bins, std::size_t n) {
  if (n == 0) return {};
  const std::size_t nb = n / 2 + 1;
  Buffer<fftw_complex> in(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nb)));
  Buffer<double> out(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    // c2r destroys its input; the plan is built before the copy below.
    plan.reset(fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  for (std::size_t k = 0; k < nb; ++k) {
    const auto v = k < bins.size() ? bins[k] : std::complex<double>{};
    in[k][0] = v.real();
    in[k][1] = v.imag();
  }
  fftw_execute(plan.get());
  std::vector<double> x(out.get(), out.get() + n);
  const double s = 1.0 / static_cast<double>(n);
  for (auto& v : x) v *= s;
  return x;
}

}  // namespace smi::fft
