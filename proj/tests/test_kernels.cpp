#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "smi/kernels.hpp"

using namespace smi;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

// Sizes that straddle the 4- and 8-wide vector bodies and their tails.
const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 100, 1023, 4096};

void check_reference_kernels(const kernels::KernelTable& k) {
  for (std::size_t n : kSizes) {
    const auto x = random_vec(n, n + 1, 3.0);
    long double s = 0.0L;
    for (double v : x) s += v;
    CHECK(k.sum(x) == doctest::Approx(static_cast<double>(s)).epsilon(1e-12));
    if (n > 0) {
      const double m = oracle::mean(x);
      const double sd = oracle::pop_std(x);
      CHECK(k.sum_sq_dev(x, m) / static_cast<double>(n) ==
            doctest::Approx(sd * sd).epsilon(1e-12));
    }
  }
}

}  // namespace

TEST_CASE("scalar kernels agree with long-double sums") { check_reference_kernels(kernels::scalar()); }

TEST_CASE("active table is one of the built variants") {
  const auto& a = kernels::active();
  CHECK((&a == &kernels::scalar() || &a == kernels::avx2()));
  MESSAGE("active kernels: " << a.name);
}

TEST_CASE("avx2 kernels match the scalar reference") {
  const auto* v = kernels::avx2();
  if (!v) {
    MESSAGE("AVX2 kernels unavailable, skipping");
    return;
  }
  const auto& s = kernels::scalar();
  check_reference_kernels(*v);
  for (std::size_t n : kSizes) {
    const auto x = random_vec(n, 100 + n, 2.0);
    const auto y = random_vec(n, 200 + n, 2.0);

    // Element-wise maps are bit-identical.
    std::vector<double> o1(n), o2(n);
    s.scale(x, 1.7, o1);
    v->scale(x, 1.7, o2);
    CHECK(o1 == o2);

    const double lsb = 5.0 / 4096.0;
    const auto c1 = s.quantize(x, lsb, -2048.0, 2047.0, o1);
    const auto c2 = v->quantize(x, lsb, -2048.0, 2047.0, o2);
    CHECK(o1 == o2);
    CHECK(c1 == c2);
    const auto c3 = s.quantize(x, 0.5, -4.0, 3.0, o1);
    const auto c4 = v->quantize(x, 0.5, -4.0, 3.0, o2);
    CHECK(o1 == o2);
    CHECK(c3 == c4);

    // Reductions differ only by summation order.
    const double tol = 1e-12 * (1.0 + static_cast<double>(n));
    CHECK(v->sum(x) == doctest::Approx(s.sum(x)).epsilon(tol).scale(10.0));
    CHECK(v->dot(x, y) == doctest::Approx(s.dot(x, y)).epsilon(tol).scale(10.0));
    CHECK(v->sum_sq_dev(x, 0.3) == doctest::Approx(s.sum_sq_dev(x, 0.3)).epsilon(tol));
  }
}

TEST_CASE("quantize rounds to the nearest code and counts rail hits") {
  const auto& k = kernels::active();
  const std::vector<double> x = {0.0, 0.24, 0.26, -0.26, 10.0, -10.0, 1.5, -2.0};
  std::vector<double> out(x.size());
  const auto clipped = k.quantize(x, 0.5, -4.0, 3.0, out);
  const std::vector<double> want = {0.0, 0.0, 0.5, -0.5, 1.5, -2.0, 1.5, -2.0};
  CHECK(out == want);
  CHECK(clipped == 2);  // only values beyond the rails
}
