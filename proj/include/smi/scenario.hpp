#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "smi/trace.hpp"

namespace smi {

inline constexpr double kPhysicsRateHz = 200'000.0;
inline constexpr double kReferenceAnlDb = 57.0;

enum class ScenarioKind { sinusoid, stepper, slip_burst, impulse_train, silence };

std::string_view to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(std::string_view name);

struct SinusoidParams {
  double freq_hz = 500.0;
  double amplitude_pp_m = 3 * 650e-9;
};

struct StepperParams {
  double steps_per_s = 500.0;
  double fundamental_amplitude_m = 20e-9;
  double harmonic_rolloff_db = 6.0;
  int harmonics = 5;  // components including the fundamental
};

struct SlipBurstParams {
  double band_lo_hz = 200.0;
  double band_hi_hz = 1000.0;
  double rms_m = 1e-9;
  double onset_s = 1.0;
  double burst_s = 0.5;
};

struct ImpulseTrainParams {
  std::vector<double> peaks_m = std::vector<double>(10, 5e-9);
  double spacing_s = 0.1;
  double ring_freq_hz = 1200.0;
  double decay_tau_s = 0.005;
  double lead_s = 1.0;  // quiet lead-in before the first event
};

// Declarative description of one synthetic experiment. Every kind carries
// its own parameter block; only the one matching `kind` is used.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::sinusoid;
  double duration_s = 0.01;
  double rate_hz = kPhysicsRateHz;
  double offset_m = 0.0;  // static stand-off added to the displacement
  std::uint64_t seed = 0;
  SinusoidParams sinusoid;
  StepperParams stepper;
  SlipBurstParams slip;
  ImpulseTrainParams impulses;

  void validate() const;  // throws InvalidConfig
};

// Vibration to microphone amplitude, ambient pressure to microphone amplitude.
struct MicModel {
  double sensitivity = 5e8;  // per meter of surface displacement
  double self_noise_rms = 0.01;
  double ambient_coupling = 0.01;  // RMS at the reference ANL

  void validate() const;
  friend bool operator==(const MicModel&, const MicModel&) = default;
};

SampleTrace gen_sinusoid(double freq_hz, double amplitude_pp_m, double duration_s,
                         double rate_hz, std::uint64_t seed = 0);

SampleTrace gen_stepper(double steps_per_s, double fundamental_amplitude_m,
                        double harmonic_rolloff_db, double duration_s, double rate_hz,
                        std::uint64_t seed, int harmonics = 5);

SampleTrace gen_slip_burst(double band_lo_hz, double band_hi_hz, double rms_m, double onset_s,
                           double duration_s, double total_s, double rate_hz,
                           std::uint64_t seed);

SampleTrace gen_impulse_train(const std::vector<double>& peak_amplitudes_m, double spacing_s,
                              double ring_freq_hz, double decay_tau_s, double rate_hz,
                              double lead_s = 0.0);

// Sample index of each impulse onset for gen_impulse_train with these arguments.
std::vector<std::size_t> impulse_onsets(std::size_t count, double spacing_s, double rate_hz,
                                        double lead_s = 0.0);

// RMS scale of ambient noise at `anl_db` relative to the reference level.
double ambient_scale(double anl_db);

SampleTrace mic_channel(const SampleTrace& vibration, double ambient_anl_db,
                        const MicModel& model, std::uint64_t seed);

// Displacement for a spec, including the static offset.
SampleTrace generate(const ScenarioSpec& spec);

}  // namespace smi
