#include "smi/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "smi/error.hpp"
#include "smi/kernels.hpp"

namespace smi {
namespace {

double mean_sq_dev(std::span<const double> x) {
  const auto& k = kernels::active();
  const double n = static_cast<double>(x.size());
  double mean = k.sum(x) / n;
  // One correction pass pulls the mean back onto the data; a constant window
  // then has exactly zero spread.
  double resid = 0.0;
  for (double v : x) resid += v - mean;
  mean += resid / n;
  return k.sum_sq_dev(x, mean) / n;
}

}  // namespace

double power_to_db(double ratio) { return 10.0 * std::log10(ratio); }

NoiseEstimate noise_floor(const SampleTrace& trace, IndexRange window) {
  require_in_bounds(trace, window, "noise_floor");
  if (window.size() < 2) throw InvalidArgument("noise_floor: window needs at least 2 samples");
  return {std::sqrt(mean_sq_dev(trace.view(window))), window, NoisePolicy::explicit_window};
}

NoiseEstimate worst_case_noise(const SampleTrace& trace, IndexRange rest_region,
                               std::size_t window_len) {
  require_in_bounds(trace, rest_region, "worst_case_noise");
  if (window_len < 2) throw InvalidArgument("worst_case_noise: window_len must be >= 2");
  if (rest_region.size() < window_len) {
    throw InvalidArgument("worst_case_noise: rest region of " +
                          std::to_string(rest_region.size()) + " samples is shorter than one " +
                          std::to_string(window_len) + "-sample window");
  }
  const std::size_t stride = std::max<std::size_t>(1, window_len / 2);
  NoiseEstimate worst{-1.0, {}, NoisePolicy::worst_case_sliding};
  auto consider = [&](std::size_t begin) {
    const IndexRange w{begin, begin + window_len};
    const double s = std::sqrt(mean_sq_dev(trace.view(w)));
    if (s > worst.sqrt_p_noise) {
      worst.sqrt_p_noise = s;
      worst.window = w;
    }
  };
  std::size_t begin = rest_region.begin;
  for (; begin + window_len <= rest_region.end; begin += stride) consider(begin);
  if (begin - stride + window_len < rest_region.end) consider(rest_region.end - window_len);
  return worst;
}

SampleTrace normalize(const SampleTrace& trace, const NoiseEstimate& noise) {
  if (!(noise.sqrt_p_noise > 0.0)) {
    throw DegenerateInput("normalize: zero noise floor, recording has no usable rest region");
  }
  std::vector<double> out(trace.size());
  kernels::active().scale(trace.samples(), 1.0 / noise.sqrt_p_noise, out);
  return SampleTrace(trace.sample_rate_hz(), Unit::dimensionless, std::move(out));
}

SnrReport snr_db(const SampleTrace& trace, IndexRange signal_window, const NoiseEstimate& noise,
                 const std::vector<IndexRange>& exclude) {
  require_in_bounds(trace, signal_window, "snr_db");
  if (!(noise.sqrt_p_noise > 0.0)) throw DegenerateInput("snr_db: zero noise power");

  double p_signal;
  if (exclude.empty()) {
    if (signal_window.size() < 2) throw InvalidArgument("snr_db: signal window too short");
    p_signal = mean_sq_dev(trace.view(signal_window));
  } else {
    std::vector<double> kept;
    kept.reserve(signal_window.size());
    for (std::size_t i = signal_window.begin; i < signal_window.end; ++i) {
      const bool skip = std::any_of(exclude.begin(), exclude.end(),
                                    [i](const IndexRange& r) { return r.contains(i); });
      if (!skip) kept.push_back(trace[i]);
    }
    if (kept.size() < 2) throw InvalidArgument("snr_db: exclusions leave no signal samples");
    p_signal = mean_sq_dev(kept);
  }
  SnrReport r;
  r.p_signal = p_signal;
  r.p_noise = noise.p_noise();
  r.snr_db = power_to_db(r.p_signal / r.p_noise);
  r.signal_window = signal_window;
  r.noise_window = noise.window;
  r.method = SnrMethod::window_power;
  return r;
}

SnrReport peak_snr(const SampleTrace& trace, const std::vector<std::size_t>& peaks,
                   const NoiseEstimate& noise) {
  if (peaks.empty()) throw InvalidArgument("peak_snr: empty peak list");
  if (!(noise.sqrt_p_noise > 0.0)) throw DegenerateInput("peak_snr: zero noise power");
  double sum = 0.0;
  for (std::size_t idx : peaks) {
    if (idx >= trace.size()) throw InvalidArgument("peak_snr: peak index out of range");
    sum += trace[idx] * trace[idx];
  }
  const double n = static_cast<double>(peaks.size());
  SnrReport r;
  r.p_noise = noise.p_noise();
  r.p_signal = sum / n;
  r.snr_db = power_to_db(r.p_signal / r.p_noise);
  r.signal_window = {*std::min_element(peaks.begin(), peaks.end()),
                     *std::max_element(peaks.begin(), peaks.end()) + 1};
  r.noise_window = noise.window;
  r.method = SnrMethod::peak_based;
  return r;
}

std::vector<std::size_t> find_peaks(const SampleTrace& trace, std::size_t count,
                                    std::size_t min_separation, IndexRange region) {
  require_in_bounds(trace, region, "find_peaks");
  std::vector<std::size_t> candidates;
  for (std::size_t i = region.begin; i < region.end; ++i) {
    const double a = std::abs(trace[i]);
    const bool left = i == region.begin || std::abs(trace[i - 1]) <= a;
    const bool right = i + 1 == region.end || std::abs(trace[i + 1]) < a;
    if (a > 0.0 && left && right) candidates.push_back(i);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(trace[a]) > std::abs(trace[b]);
  });
  std::vector<std::size_t> chosen;
  for (std::size_t c : candidates) {
    if (chosen.size() == count) break;
    const bool clear = std::all_of(chosen.begin(), chosen.end(), [&](std::size_t p) {
      return (c > p ? c - p : p - c) >= min_separation;
    });
    if (clear) chosen.push_back(c);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

SpectrumReport spectrum(const SampleTrace& trace, double window_start_s, double window_len_s) {
  const double rate = trace.sample_rate_hz();
  const auto start = static_cast<std::size_t>(std::llround(std::max(0.0, window_start_s) * rate));
  const auto n = static_cast<std::size_t>(std::llround(window_len_s * rate));
  if (n < 64) throw InvalidArgument("spectrum: window shorter than 64 samples");
  if (window_start_s < 0.0 || start + n > trace.size()) {
    throw InvalidArgument("spectrum: window extends past the trace");
  }
  const auto x = trace.view({start, start + n});
  const double mean = kernels::active().sum(x) / static_cast<double>(n);
  double scale = 0.0;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hann =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    w[i] = (x[i] - mean) * hann;
    scale = std::max(scale, std::abs(x[i]));
  }
  const auto bins = fft::forward(w);

  SpectrumReport r;
  r.window_s = static_cast<double>(n) / rate;
  r.freqs_hz.resize(bins.size());
  r.normalized_magnitudes.resize(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    r.freqs_hz[k] = static_cast<double>(k) * rate / static_cast<double>(n);
    r.normalized_magnitudes[k] = k == 0 ? 0.0 : std::abs(bins[k]);
  }
  const auto peak_it = std::max_element(r.normalized_magnitudes.begin(), r.normalized_magnitudes.end());
  r.peak_bin = static_cast<std::size_t>(peak_it - r.normalized_magnitudes.begin());
  r.peak_magnitude = *peak_it;
  if (!(r.peak_magnitude > 1e-10 * scale * static_cast<double>(n))) {
    r.degenerate = true;
    r.peak_bin = 0;
    std::fill(r.normalized_magnitudes.begin(), r.normalized_magnitudes.end(), 0.0);
    return r;
  }
  for (auto& m : r.normalized_magnitudes) m /= r.peak_magnitude;
  return r;
}

std::vector<double> moving_rms(std::span<const double> x, std::size_t samples) {
  const std::size_t n = x.size();
  std::vector<double> env(n);
  if (n == 0) return env;
  samples = std::max<std::size_t>(1, samples);
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i] * x[i];
  const std::size_t before = samples / 2;
  const std::size_t after = samples - before;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= before ? i - before : 0;
    const std::size_t hi = std::min(n, i + after);
    env[i] = std::sqrt(std::max(0.0, prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo));
  }
  return env;
}

EventList detect_events(const SampleTrace& normalized, const EventParams& params) {
  EventList list;
  if (normalized.empty()) return list;
  const double rate = normalized.sample_rate_hz();
  const auto env = moving_rms(normalized.samples(),
                              static_cast<std::size_t>(std::llround(params.envelope_s * rate)));
  const auto hold = static_cast<std::size_t>(std::llround(params.hold_s * rate));
  const auto min_len = static_cast<std::size_t>(std::llround(params.min_duration_s * rate));

  std::vector<IndexRange> runs;
  for (std::size_t i = 0; i < env.size();) {
    if (env[i] > params.release) {
      std::size_t j = i;
      while (j < env.size() && env[j] > params.release) ++j;
      if (!runs.empty() && i - runs.back().end < hold) {
        runs.back().end = j;
      } else {
        runs.push_back({i, j});
      }
      i = j;
    } else {
      ++i;
    }
  }
  for (const auto& r : runs) {
    if (r.size() < min_len) continue;
    double peak_env = 0.0;
    double peak_amp = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i) {
      peak_env = std::max(peak_env, env[i]);
      peak_amp = std::max(peak_amp, std::abs(normalized[i]));
    }
    if (peak_env < params.threshold) continue;
    list.events.push_back({r.begin, r.end, peak_amp, params.kind});
  }
  return list;
}

EventList detect_events(const SampleTrace& normalized, double threshold, double min_duration_s,
                        double hold_s) {
  EventParams p;
  p.threshold = threshold;
  p.min_duration_s = min_duration_s;
  p.hold_s = hold_s;
  return detect_events(normalized, p);
}

}  // namespace smi
