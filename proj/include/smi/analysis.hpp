#pragma once

#include <cstddef>
#include <vector>

#include "smi/trace.hpp"

namespace smi {

enum class NoisePolicy { explicit_window, worst_case_sliding };

struct NoiseEstimate {
  double sqrt_p_noise = 0.0;
  IndexRange window;
  NoisePolicy policy = NoisePolicy::explicit_window;

  double p_noise() const { return sqrt_p_noise * sqrt_p_noise; }
};

enum class SnrMethod { window_power, peak_based };

struct SnrReport {
  double p_signal = 0.0;
  double p_noise = 0.0;
  double snr_db = 0.0;
  IndexRange signal_window;
  IndexRange noise_window;
  SnrMethod method = SnrMethod::window_power;
};

struct SpectrumReport {
  std::vector<double> freqs_hz;
  std::vector<double> normalized_magnitudes;
  double window_s = 1.0;
  double peak_magnitude = 0.0;  // un-normalized magnitude of the strongest bin
  std::size_t peak_bin = 0;
  bool degenerate = false;  // no content besides DC

  double resolution_hz() const { return 1.0 / window_s; }
  double peak_freq_hz() const { return freqs_hz.empty() ? 0.0 : freqs_hz[peak_bin]; }
};

enum class EventKind { slip, contact, impulse };

struct Event {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  double peak_normalized_amplitude = 0.0;
  EventKind kind = EventKind::slip;
};

struct EventList {
  std::vector<Event> events;
};

struct EventParams {
  double threshold = 4.0;       // envelope level that confirms an event
  double release = 2.0;         // envelope level that bounds it
  double min_duration_s = 0.02;
  double hold_s = 0.05;         // gaps shorter than this are merged
  double envelope_s = 0.02;     // moving-RMS length
  EventKind kind = EventKind::slip;
};

// Population standard deviation of trace[window]: sqrt((1/N) sum |x_i - mean|^2).
NoiseEstimate noise_floor(const SampleTrace& trace, IndexRange window);

// Largest noise_floor over windows of window_len sliding by window_len / 2
// through rest_region. The last window is aligned to the region's end so the
// tail is covered.
NoiseEstimate worst_case_noise(const SampleTrace& trace, IndexRange rest_region,
                               std::size_t window_len);

SampleTrace normalize(const SampleTrace& trace, const NoiseEstimate& noise);

// Mean squared deviation over signal_window (minus `exclude`) against P_noise.
SnrReport snr_db(const SampleTrace& trace, IndexRange signal_window, const NoiseEstimate& noise,
                 const std::vector<IndexRange>& exclude = {});

// sum |p_i|^2 / (P_noise * n) in dB, with p_i = trace[peaks[i]].
SnrReport peak_snr(const SampleTrace& trace, const std::vector<std::size_t>& peaks,
                   const NoiseEstimate& noise);

// Indices of the `count` largest |x| maxima at least min_separation apart, in
// time order.
std::vector<std::size_t> find_peaks(const SampleTrace& trace, std::size_t count,
                                    std::size_t min_separation, IndexRange region);

// Hann-windowed magnitude spectrum of [window_start_s, window_start_s + window_len_s),
// mean removed, DC bin excluded, normalised to a unit peak.
SpectrumReport spectrum(const SampleTrace& trace, double window_start_s,
                        double window_len_s = 1.0);

// Moving RMS of length `samples`, centred.
std::vector<double> moving_rms(std::span<const double> x, std::size_t samples);

// Events on a noise-normalised trace: envelope runs above `release`, merged
// across gaps shorter than hold_s, kept when they last min_duration_s and
// reach `threshold`.
EventList detect_events(const SampleTrace& normalized, const EventParams& params = {});
EventList detect_events(const SampleTrace& normalized, double threshold, double min_duration_s,
                        double hold_s);

double power_to_db(double ratio);

}  // namespace smi
