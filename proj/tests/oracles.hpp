// Independent reference implementations used as test oracles. Each one is
// deliberately naive: slow, obvious, and sharing no code with the library.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

// Root of phi + C sin(phi + atan(alpha)) - phi0 by plain bisection. The left
// side is strictly increasing for C < 1 and the root lies within C of phi0.
inline double excess_phase_bisect(double phi0, double c, double alpha) {
  const double shift = std::atan(alpha);
  auto f = [&](double x) { return x + c * std::sin(x + shift) - phi0; };
  double lo = phi0 - c - 1e-12;
  double hi = phi0 + c + 1e-12;
  for (int i = 0; i < 400 && hi - lo > 1e-15 * (1.0 + std::abs(phi0)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Bilinear designs map the digital frequency f onto the analog prototype at
// w = tan(pi f / fs) / tan(pi fc / fs), so the analog magnitudes give the
// exact digital response.
inline double warped(double f, double fc, double fs) {
  return std::tan(kPi * f / fs) / std::tan(kPi * fc / fs);
}

inline double highpass1_db(double f, double fc, double fs) {
  const double w = warped(f, fc, fs);
  return 20.0 * std::log10(w / std::sqrt(1.0 + w * w));
}

inline double lowpass2_db(double f, double fc, double q, double fs) {
  const double w = warped(f, fc, fs);
  return -10.0 * std::log10((1.0 - w * w) * (1.0 - w * w) + (w / q) * (w / q));
}

// |X[k]| for k = 0 .. n/2 by direct summation.
inline std::vector<double> dft_magnitude(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> mag(n / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ang = -2.0 * kPi * static_cast<double>((k * i) % n) / static_cast<double>(n);
      acc += x[i] * std::polar(1.0, ang);
    }
    mag[k] = std::abs(acc);
  }
  return mag;
}

inline double mean(const std::vector<double>& x) {
  long double s = 0.0L;
  for (double v : x) s += v;
  return static_cast<double>(s / static_cast<long double>(x.size()));
}

// Population standard deviation, two passes in long double.
inline double pop_std(const std::vector<double>& x) {
  const long double m = mean(x);
  long double s = 0.0L;
  for (double v : x) s += (v - m) * (v - m);
  return static_cast<double>(std::sqrt(s / static_cast<long double>(x.size())));
}

inline double rms(const std::vector<double>& x) {
  long double s = 0.0L;
  for (double v : x) s += static_cast<long double>(v) * v;
  return static_cast<double>(std::sqrt(s / static_cast<long double>(x.size())));
}

// Amplitude of the f-component of x by least squares against sin and cos.
inline double tone_amplitude(const std::vector<double>& x, double f, double fs,
                             std::size_t begin = 0) {
  double ss = 0, cc = 0, sc = 0, xs = 0, xc = 0;
  for (std::size_t i = begin; i < x.size(); ++i) {
    const double t = 2.0 * kPi * f * static_cast<double>(i) / fs;
    const double s = std::sin(t), c = std::cos(t);
    ss += s * s; cc += c * c; sc += s * c; xs += x[i] * s; xc += x[i] * c;
  }
  const double det = ss * cc - sc * sc;
  const double a = (xs * cc - xc * sc) / det;
  const double b = (xc * ss - xs * sc) / det;
  return std::hypot(a, b);
}

}  // namespace oracle
