#include "smi/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "smi/error.hpp"
#include "smi/rng.hpp"

namespace smi {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRampS = 0.010;

std::size_t samples_for(double seconds, double rate_hz) {
  return static_cast<std::size_t>(std::llround(seconds * rate_hz));
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

void require_rate(double rate_hz, const char* who) {
  require(rate_hz > 0.0 && std::isfinite(rate_hz), std::string(who) + ": rate must be > 0");
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::sinusoid: return "sinusoid";
    case ScenarioKind::stepper: return "stepper";
    case ScenarioKind::slip_burst: return "slip_burst";
    case ScenarioKind::impulse_train: return "impulse_train";
    case ScenarioKind::silence: return "silence";
  }
  return "silence";
}

ScenarioKind scenario_kind_from_string(std::string_view name) {
  for (auto k : {ScenarioKind::sinusoid, ScenarioKind::stepper, ScenarioKind::slip_burst,
                 ScenarioKind::impulse_train, ScenarioKind::silence}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidConfig("unknown scenario kind '" + std::string(name) + "'");
}

void ScenarioSpec::validate() const {
  auto fail = [](const std::string& m) { throw InvalidConfig("scenario: " + m); };
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) fail("duration_s must be > 0");
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) fail("rate_hz must be > 0");
  if (!std::isfinite(offset_m)) fail("offset_m must be finite");
  const double nyquist = rate_hz / 2.0;
  switch (kind) {
    case ScenarioKind::sinusoid:
      if (!(sinusoid.freq_hz > 0.0 && sinusoid.freq_hz < nyquist)) fail("freq_hz outside (0, Nyquist)");
      if (!(sinusoid.amplitude_pp_m >= 0.0)) fail("amplitude_pp_m must be >= 0");
      break;
    case ScenarioKind::stepper:
      if (!(stepper.steps_per_s > 0.0 && 3.0 * stepper.steps_per_s < nyquist)) {
        fail("steps_per_s must leave room for 3 harmonics below Nyquist");
      }
      if (!(stepper.fundamental_amplitude_m >= 0.0)) fail("fundamental_amplitude_m must be >= 0");
      if (stepper.harmonics < 1) fail("harmonics must be >= 1");
      break;
    case ScenarioKind::slip_burst:
      if (!(slip.band_lo_hz > 0.0 && slip.band_lo_hz < slip.band_hi_hz && slip.band_hi_hz < nyquist)) {
        fail("band edges must satisfy 0 < lo < hi < Nyquist");
      }
      if (!(slip.rms_m >= 0.0)) fail("rms_m must be >= 0");
      if (!(slip.onset_s >= 0.0 && slip.burst_s > 0.0 &&
            slip.onset_s + slip.burst_s <= duration_s + 1e-12)) {
        fail("burst must fit inside duration_s");
      }
      break;
    case ScenarioKind::impulse_train:
      if (impulses.peaks_m.empty()) fail("peaks_m must not be empty");
      if (!(impulses.spacing_s > 5.0 * impulses.decay_tau_s)) fail("spacing_s must exceed 5 decay_tau_s");
      if (!(impulses.ring_freq_hz > 0.0 && impulses.ring_freq_hz < nyquist)) fail("ring_freq_hz outside (0, Nyquist)");
      break;
    case ScenarioKind::silence:
      break;
  }
}

void MicModel::validate() const {
  if (!(sensitivity > 0.0) || !(self_noise_rms >= 0.0) || !(ambient_coupling >= 0.0) ||
      !std::isfinite(sensitivity) || !std::isfinite(self_noise_rms) ||
      !std::isfinite(ambient_coupling)) {
    throw InvalidConfig("mic: need sensitivity > 0, self_noise_rms >= 0, ambient_coupling >= 0");
  }
}

SampleTrace gen_sinusoid(double freq_hz, double amplitude_pp_m, double duration_s,
                         double rate_hz, std::uint64_t /*seed*/) {
  require_rate(rate_hz, "gen_sinusoid");
  require(freq_hz >= 0.0 && freq_hz < rate_hz / 2.0, "gen_sinusoid: frequency aliases");
  const std::size_t n = samples_for(duration_s, rate_hz);
  std::vector<double> d(n, 0.0);
  if (amplitude_pp_m != 0.0) {
    const double a = amplitude_pp_m / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = a * std::sin(2.0 * kPi * freq_hz * static_cast<double>(i) / rate_hz);
    }
  }
  return SampleTrace(rate_hz, Unit::meters, std::move(d));
}

SampleTrace gen_stepper(double steps_per_s, double fundamental_amplitude_m,
                        double harmonic_rolloff_db, double duration_s, double rate_hz,
                        std::uint64_t seed, int harmonics) {
  require_rate(rate_hz, "gen_stepper");
  require(steps_per_s > 0.0 && 3.0 * steps_per_s < rate_hz / 2.0,
          "gen_stepper: need room for 3 harmonics below Nyquist");
  const std::size_t n = samples_for(duration_s, rate_hz);
  // Noise floor 40 dB below the fundamental's power.
  const double noise_rms = fundamental_amplitude_m / std::sqrt(2.0) * 1e-2;
  std::vector<double> d = gaussian_noise(n, noise_rms, seed);
  for (int k = 1; k <= harmonics; ++k) {
    const double f = k * steps_per_s;
    if (f >= rate_hz / 2.0) break;
    const double a = fundamental_amplitude_m * std::pow(10.0, -harmonic_rolloff_db * (k - 1) / 20.0);
    for (std::size_t i = 0; i < n; ++i) {
      d[i] += a * std::sin(2.0 * kPi * f * static_cast<double>(i) / rate_hz);
    }
  }
  return SampleTrace(rate_hz, Unit::meters, std::move(d));
}

SampleTrace gen_slip_burst(double band_lo_hz, double band_hi_hz, double rms_m, double onset_s,
                           double duration_s, double total_s, double rate_hz,
                           std::uint64_t seed) {
  require_rate(rate_hz, "gen_slip_burst");
  require(band_lo_hz > 0.0 && band_lo_hz < band_hi_hz && band_hi_hz < rate_hz / 2.0,
          "gen_slip_burst: band must satisfy 0 < lo < hi < Nyquist");
  require(onset_s >= 0.0 && duration_s > 0.0 && onset_s + duration_s <= total_s + 1e-12,
          "gen_slip_burst: burst must fit inside the trace");
  const std::size_t n = samples_for(total_s, rate_hz);
  std::vector<double> d(n, 0.0);
  const std::size_t start = std::min(samples_for(onset_s, rate_hz), n);
  const std::size_t len = std::min(samples_for(duration_s, rate_hz), n - start);
  if (rms_m == 0.0 || len < 2) return SampleTrace(rate_hz, Unit::meters, std::move(d));

  auto bins = fft::forward(gaussian_noise(len, 1.0, seed));
  const double df = rate_hz / static_cast<double>(len);
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const double f = static_cast<double>(k) * df;
    if (f < band_lo_hz || f > band_hi_hz) bins[k] = 0.0;
  }
  auto burst = fft::inverse(bins, len);

  const std::size_t ramp = std::min(samples_for(kRampS, rate_hz), len / 2);
  for (std::size_t i = 0; i < ramp; ++i) {
    const double w = 0.5 - 0.5 * std::cos(kPi * static_cast<double>(i) / static_cast<double>(ramp));
    burst[i] *= w;
    burst[len - 1 - i] *= w;
  }
  double power = 0.0;
  for (double v : burst) power += v * v;
  power /= static_cast<double>(len);
  const double gain = power > 0.0 ? rms_m / std::sqrt(power) : 0.0;
  for (std::size_t i = 0; i < len; ++i) d[start + i] = burst[i] * gain;
  return SampleTrace(rate_hz, Unit::meters, std::move(d));
}

std::vector<std::size_t> impulse_onsets(std::size_t count, double spacing_s, double rate_hz,
                                        double lead_s) {
  std::vector<std::size_t> onsets(count);
  for (std::size_t i = 0; i < count; ++i) {
    onsets[i] = samples_for(lead_s + static_cast<double>(i) * spacing_s, rate_hz);
  }
  return onsets;
}

SampleTrace gen_impulse_train(const std::vector<double>& peak_amplitudes_m, double spacing_s,
                              double ring_freq_hz, double decay_tau_s, double rate_hz,
                              double lead_s) {
  require_rate(rate_hz, "gen_impulse_train");
  require(!peak_amplitudes_m.empty(), "gen_impulse_train: no peaks");
  require(decay_tau_s > 0.0 && spacing_s > 5.0 * decay_tau_s,
          "gen_impulse_train: spacing must exceed 5 decay constants");
  require(ring_freq_hz > 0.0 && ring_freq_hz < rate_hz / 2.0,
          "gen_impulse_train: ring frequency aliases");
  const std::size_t count = peak_amplitudes_m.size();
  const std::size_t n =
      samples_for(lead_s + static_cast<double>(count) * spacing_s, rate_hz);

  // One wavelet shape for every event, normalised to a unit sampled peak.
  std::vector<double> wavelet(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    wavelet[i] = std::exp(-t / decay_tau_s) * std::sin(2.0 * kPi * ring_freq_hz * t);
    peak = std::max(peak, std::abs(wavelet[i]));
  }
  for (auto& v : wavelet) v /= peak;

  std::vector<double> d(n, 0.0);
  const auto onsets = impulse_onsets(count, spacing_s, rate_hz, lead_s);
  for (std::size_t e = 0; e < count; ++e) {
    const double p = peak_amplitudes_m[e];
    if (p == 0.0) continue;
    for (std::size_t i = onsets[e]; i < n; ++i) d[i] += p * wavelet[i - onsets[e]];
  }
  return SampleTrace(rate_hz, Unit::meters, std::move(d));
}

double ambient_scale(double anl_db) { return std::pow(10.0, (anl_db - kReferenceAnlDb) / 20.0); }

SampleTrace mic_channel(const SampleTrace& vibration, double ambient_anl_db,
                        const MicModel& model, std::uint64_t seed) {
  model.validate();
  const std::size_t n = vibration.size();
  const auto ambient = gaussian_noise(n, 1.0, derive_seed(seed, Stream::mic_ambient));
  const auto self = gaussian_noise(n, 1.0, derive_seed(seed, Stream::mic_self));
  const double amb = model.ambient_coupling * ambient_scale(ambient_anl_db);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = model.sensitivity * vibration[i] + amb * ambient[i] + model.self_noise_rms * self[i];
  }
  return SampleTrace(vibration.sample_rate_hz(), Unit::dimensionless, std::move(out));
}

SampleTrace generate(const ScenarioSpec& spec) {
  spec.validate();
  SampleTrace d;
  switch (spec.kind) {
    case ScenarioKind::sinusoid:
      d = gen_sinusoid(spec.sinusoid.freq_hz, spec.sinusoid.amplitude_pp_m, spec.duration_s,
                       spec.rate_hz, spec.seed);
      break;
    case ScenarioKind::stepper:
      d = gen_stepper(spec.stepper.steps_per_s, spec.stepper.fundamental_amplitude_m,
                      spec.stepper.harmonic_rolloff_db, spec.duration_s, spec.rate_hz, spec.seed,
                      spec.stepper.harmonics);
      break;
    case ScenarioKind::slip_burst:
      d = gen_slip_burst(spec.slip.band_lo_hz, spec.slip.band_hi_hz, spec.slip.rms_m,
                         spec.slip.onset_s, spec.slip.burst_s, spec.duration_s, spec.rate_hz,
                         spec.seed);
      break;
    case ScenarioKind::impulse_train:
      d = gen_impulse_train(spec.impulses.peaks_m, spec.impulses.spacing_s,
                            spec.impulses.ring_freq_hz, spec.impulses.decay_tau_s, spec.rate_hz,
                            spec.impulses.lead_s);
      break;
    case ScenarioKind::silence:
      d = SampleTrace(spec.rate_hz, Unit::meters,
                      std::vector<double>(samples_for(spec.duration_s, spec.rate_hz), 0.0));
      break;
  }
  if (spec.offset_m == 0.0) return d;
  std::vector<double> v = d.values();
  for (auto& x : v) x += spec.offset_m;
  return SampleTrace(d.sample_rate_hz(), Unit::meters, std::move(v));
}

}  // namespace smi
