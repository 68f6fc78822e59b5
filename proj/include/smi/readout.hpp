#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "smi/smi_core.hpp"
#include "smi/trace.hpp"

namespace smi {

// TIA -> first-order HP -> signal amplifier -> Sallen-Key AA -> ADC.
// The ADC parameters are not taken from hardware; they are pinned here so
// that fixtures are reproducible.
struct ReadoutConfig {
  double tia_gain_v_per_a = 40'000.0;
  double hp_cutoff_hz = 150.0;
  double sa_gain = 30.0;
  double aa_cutoff_hz = 2'000.0;
  double aa_quality = 0.7071;
  double adc_rate_hz = 10'000.0;
  int adc_bits = 12;
  double adc_fullscale_v = 5.0;
  // White noise referred to the ADC input, V RMS. Off by default.
  double noise_v_rms = 0.0;

  void validate() const;  // throws InvalidConfig
  double lsb_v() const;
  // Analyses skip this much of every chain output: 5 time constants of the
  // slowest stage.
  double settling_time_s() const;
  friend bool operator==(const ReadoutConfig&, const ReadoutConfig&) = default;
};

// y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct BiquadCoeffs {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
  double design_rate_hz = 1.0;

  double pole_radius() const;
  bool is_stable() const { return pole_radius() < 1.0; }
};

BiquadCoeffs identity_filter(double rate_hz);

// First-order high-pass, bilinear transform prewarped at the cutoff.
BiquadCoeffs design_highpass(double cutoff_hz, double rate_hz);

// Second-order low-pass with quality factor q, bilinear transform prewarped
// at the cutoff.
BiquadCoeffs design_sallen_key_lowpass(double cutoff_hz, double q, double rate_hz);

// Transposed direct form II, zero initial state.
SampleTrace apply_filter(const BiquadCoeffs& coeffs, const SampleTrace& input);

// 20 log10 |H(exp(j 2 pi f / fs))|
double frequency_response(const BiquadCoeffs& coeffs, double freq_hz);

// Streaming form of apply_filter for one producer.
class BiquadFilter {
 public:
  explicit BiquadFilter(const BiquadCoeffs& c) : c_(c) {}
  double process(double x) {
    const double y = c_.b0 * x + s1_;
    s1_ = c_.b1 * x - c_.a1 * y + s2_;
    s2_ = c_.b2 * x - c_.a2 * y;
    return y;
  }
  void reset() { s1_ = s2_ = 0.0; }

 private:
  BiquadCoeffs c_;
  double s1_ = 0.0;
  double s2_ = 0.0;
};

// Ratio above which a guard FIR runs ahead of the decimator.
inline constexpr double kGuardFirRatio = 20.0;

// Windowed-sinc low-pass used as the decimation guard.
std::vector<double> design_guard_fir(std::size_t decimation);

// Keeps every M-th sample, M = input rate / out_rate_hz (an integer). With
// guard_fir the input first goes through design_guard_fir(M).
SampleTrace decimate(const SampleTrace& input, double out_rate_hz, bool guard_fir);

// Analog chain up to the ADC input: gains and filters at the input rate,
// then integer decimation to adc_rate_hz. No quantization.
SampleTrace apply_chain(const SampleTrace& photocurrent, const ReadoutConfig& cfg);

struct QuantizeResult {
  SampleTrace trace;
  std::size_t clipped = 0;
};

// Mid-tread quantizer over [-fullscale/2, +fullscale/2) with 2^bits codes.
QuantizeResult quantize(const SampleTrace& trace, const ReadoutConfig& cfg);

struct LaserChannelResult {
  SampleTrace trace;            // volts at adc_rate_hz
  std::size_t clipped = 0;
  double peak_fringe_rate_hz = 0.0;
  // Fringes faster than the AA cutoff are smeared and folded by the chain.
  bool fringe_rate_exceeds_aa = false;
};

// quantize(apply_chain(simulate_smi(vibration)) + electronic noise). The
// electronic noise is drawn only when cfg.noise_v_rms > 0 and a seed is given.
LaserChannelResult laser_channel(const SampleTrace& vibration, const LaserConfig& laser,
                                 const ReadoutConfig& cfg,
                                 std::optional<std::uint64_t> noise_seed = std::nullopt);

}  // namespace smi
