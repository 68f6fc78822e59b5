#include "smi/readout.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "smi/error.hpp"
#include "smi/kernels.hpp"
#include "smi/rng.hpp"

namespace smi {
namespace {

constexpr double kPi = std::numbers::pi;

void check_cutoff(double cutoff_hz, double rate_hz, const char* who) {
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
    throw InvalidArgument(std::string(who) + ": sample rate must be positive");
  }
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < rate_hz / 2.0)) {
    throw InvalidArgument(std::string(who) + ": cutoff " + std::to_string(cutoff_hz) +
                          " Hz must lie in (0, Nyquist = " + std::to_string(rate_hz / 2.0) +
                          " Hz)");
  }
}

std::size_t decimation_factor(double input_rate, double output_rate) {
  const double ratio = input_rate / output_rate;
  const double m = std::round(ratio);
  if (m < 1.0 || std::abs(ratio - m) > 1e-9 * ratio) {
    throw InvalidArgument("decimation: input rate " + std::to_string(input_rate) +
                          " Hz is not an integer multiple of the ADC rate " +
                          std::to_string(output_rate) + " Hz");
  }
  return static_cast<std::size_t>(m);
}

}  // namespace

void ReadoutConfig::validate() const {
  auto fail = [](const std::string& m) { throw InvalidConfig("readout: " + m); };
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(tia_gain_v_per_a)) fail("tia_gain_v_per_a must be > 0");
  if (!positive(sa_gain)) fail("sa_gain must be > 0");
  if (!positive(hp_cutoff_hz) || !positive(aa_cutoff_hz) || !positive(adc_rate_hz)) {
    fail("cutoffs and ADC rate must be > 0");
  }
  if (!(hp_cutoff_hz < aa_cutoff_hz && aa_cutoff_hz < adc_rate_hz / 2.0)) {
    fail("need hp_cutoff_hz < aa_cutoff_hz < adc_rate_hz / 2");
  }
  if (!positive(aa_quality)) fail("aa_quality must be > 0");
  if (adc_bits < 2 || adc_bits > 32) fail("adc_bits must be in [2, 32]");
  if (!positive(adc_fullscale_v)) fail("adc_fullscale_v must be > 0");
  if (!(noise_v_rms >= 0.0) || !std::isfinite(noise_v_rms)) fail("noise_v_rms must be >= 0");
}

double ReadoutConfig::lsb_v() const { return adc_fullscale_v / std::ldexp(1.0, adc_bits); }

double ReadoutConfig::settling_time_s() const { return 5.0 / hp_cutoff_hz; }

double BiquadCoeffs::pole_radius() const {
  // Roots of z^2 + a1 z + a2.
  const std::complex<double> disc = std::sqrt(std::complex<double>(a1 * a1 - 4.0 * a2, 0.0));
  const auto r1 = (-a1 + disc) / 2.0;
  const auto r2 = (-a1 - disc) / 2.0;
  return std::max(std::abs(r1), std::abs(r2));
}

BiquadCoeffs identity_filter(double rate_hz) {
  BiquadCoeffs c;
  c.design_rate_hz = rate_hz;
  return c;
}

BiquadCoeffs design_highpass(double cutoff_hz, double rate_hz) {
  check_cutoff(cutoff_hz, rate_hz, "design_highpass");
  // H(s) = s / (s + wc), s -> (1 - z^-1) / (1 + z^-1) after prewarping K = tan(pi fc / fs).
  const double k = std::tan(kPi * cutoff_hz / rate_hz);
  const double norm = 1.0 / (1.0 + k);
  BiquadCoeffs c;
  c.b0 = norm;
  c.b1 = -norm;
  c.b2 = 0.0;
  c.a1 = (k - 1.0) * norm;
  c.a2 = 0.0;
  c.design_rate_hz = rate_hz;
  return c;
}

BiquadCoeffs design_sallen_key_lowpass(double cutoff_hz, double q, double rate_hz) {
  check_cutoff(cutoff_hz, rate_hz, "design_sallen_key_lowpass");
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw InvalidArgument("design_sallen_key_lowpass: q must be > 0");
  }
  // H(s) = wc^2 / (s^2 + s wc / Q + wc^2)
  const double k = std::tan(kPi * cutoff_hz / rate_hz);
  const double k2 = k * k;
  const double norm = 1.0 / (1.0 + k / q + k2);
  BiquadCoeffs c;
  c.b0 = k2 * norm;
  c.b1 = 2.0 * c.b0;
  c.b2 = c.b0;
  c.a1 = 2.0 * (k2 - 1.0) * norm;
  c.a2 = (1.0 - k / q + k2) * norm;
  c.design_rate_hz = rate_hz;
  return c;
}

SampleTrace apply_filter(const BiquadCoeffs& coeffs, const SampleTrace& input) {
  if (input.sample_rate_hz() != coeffs.design_rate_hz) {
    throw InvalidArgument("apply_filter: trace rate " + std::to_string(input.sample_rate_hz()) +
                          " Hz differs from design rate " +
                          std::to_string(coeffs.design_rate_hz) + " Hz");
  }
  BiquadFilter f(coeffs);
  std::vector<double> out(input.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.process(input[i]);
  return SampleTrace(input.sample_rate_hz(), input.unit(), std::move(out));
}

double frequency_response(const BiquadCoeffs& c, double freq_hz) {
  const double w = 2.0 * kPi * freq_hz / c.design_rate_hz;
  const std::complex<double> z1 = std::polar(1.0, -w);
  const std::complex<double> z2 = z1 * z1;
  const auto num = c.b0 + c.b1 * z1 + c.b2 * z2;
  const auto den = 1.0 + c.a1 * z1 + c.a2 * z2;
  return 20.0 * std::log10(std::abs(num) / std::abs(den));
}

std::vector<double> design_guard_fir(std::size_t decimation) {
  const std::size_t len = 8 * decimation + 1;
  const double fc = 0.45 / static_cast<double>(decimation);  // cycles per input sample
  const double mid = static_cast<double>(len - 1) / 2.0;
  std::vector<double> h(len);
  double total = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double t = static_cast<double>(k) - mid;
    const double sinc = t == 0.0 ? 2.0 * fc : std::sin(2.0 * kPi * fc * t) / (kPi * t);
    const double u = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(len - 1);
    const double blackman = 0.42 - 0.5 * std::cos(u) + 0.08 * std::cos(2.0 * u);
    h[k] = sinc * blackman;
    total += h[k];
  }
  for (auto& v : h) v /= total;
  return h;
}

SampleTrace decimate(const SampleTrace& input, double out_rate_hz, bool guard_fir) {
  const std::size_t m = decimation_factor(input.sample_rate_hz(), out_rate_hz);
  const auto& k = kernels::active();
  const auto v = input.samples();
  const std::size_t n_out = (v.size() + m - 1) / m;
  std::vector<double> out(n_out);
  if (guard_fir && m > 1) {
    const auto h = design_guard_fir(m);
    const std::size_t half = (h.size() - 1) / 2;
    for (std::size_t n = 0; n < n_out; ++n) {
      const std::size_t centre = n * m;
      if (centre >= half && centre - half + h.size() <= v.size()) {
        out[n] = k.dot(h, v.subspan(centre - half, h.size()));
      } else {
        double acc = 0.0;
        for (std::size_t j = 0; j < h.size(); ++j) {
          const auto idx = static_cast<std::ptrdiff_t>(centre + j) - static_cast<std::ptrdiff_t>(half);
          if (idx >= 0 && static_cast<std::size_t>(idx) < v.size()) acc += h[j] * v[static_cast<std::size_t>(idx)];
        }
        out[n] = acc;
      }
    }
  } else {
    for (std::size_t n = 0; n < n_out; ++n) out[n] = v[n * m];
  }
  return SampleTrace(out_rate_hz, input.unit(), std::move(out));
}

SampleTrace apply_chain(const SampleTrace& photocurrent, const ReadoutConfig& cfg) {
  if (photocurrent.unit() != Unit::amps) {
    throw InvalidArgument("apply_chain: photocurrent must be in amps");
  }
  cfg.validate();
  const double rate = photocurrent.sample_rate_hz();
  if (rate < 2.0 * cfg.aa_cutoff_hz) {
    throw InvalidConfig("apply_chain: input rate " + std::to_string(rate) +
                        " Hz is below twice the AA cutoff");
  }
  const std::size_t m = decimation_factor(rate, cfg.adc_rate_hz);
  const auto& k = kernels::active();

  std::vector<double> v(photocurrent.size());
  k.scale(photocurrent.samples(), cfg.tia_gain_v_per_a, v);
  BiquadFilter hp(design_highpass(cfg.hp_cutoff_hz, rate));
  for (auto& x : v) x = hp.process(x);
  k.scale(v, cfg.sa_gain, v);
  BiquadFilter aa(design_sallen_key_lowpass(cfg.aa_cutoff_hz, cfg.aa_quality, rate));
  for (auto& x : v) x = aa.process(x);

  return decimate(SampleTrace(rate, Unit::volts, std::move(v)), cfg.adc_rate_hz,
                  static_cast<double>(m) > kGuardFirRatio);
}

QuantizeResult quantize(const SampleTrace& trace, const ReadoutConfig& cfg) {
  const double lsb = cfg.lsb_v();
  const double half_codes = std::ldexp(1.0, cfg.adc_bits - 1);
  std::vector<double> out(trace.size());
  const std::size_t clipped =
      kernels::active().quantize(trace.samples(), lsb, -half_codes, half_codes - 1.0, out);
  return {SampleTrace(trace.sample_rate_hz(), Unit::volts, std::move(out)), clipped};
}

LaserChannelResult laser_channel(const SampleTrace& vibration, const LaserConfig& laser,
                                 const ReadoutConfig& cfg,
                                 std::optional<std::uint64_t> noise_seed) {
  LaserChannelResult result;
  const auto current = simulate_smi(vibration, laser);
  auto volts = apply_chain(current, cfg);
  if (cfg.noise_v_rms > 0.0 && noise_seed) {
    auto noise = gaussian_noise(volts.size(), cfg.noise_v_rms, *noise_seed);
    for (std::size_t i = 0; i < noise.size(); ++i) noise[i] += volts[i];
    volts = SampleTrace(volts.sample_rate_hz(), Unit::volts, std::move(noise));
  }
  auto q = quantize(volts, cfg);
  result.trace = std::move(q.trace);
  result.clipped = q.clipped;

  double max_step = 0.0;
  for (std::size_t i = 1; i < vibration.size(); ++i) {
    max_step = std::max(max_step, std::abs(vibration[i] - vibration[i - 1]));
  }
  result.peak_fringe_rate_hz = max_step * vibration.sample_rate_hz() / (laser.wavelength_m / 2.0);
  result.fringe_rate_exceeds_aa = result.peak_fringe_rate_hz > cfg.aa_cutoff_hz;
  return result;
}

}  // namespace smi
