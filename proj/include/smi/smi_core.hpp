#pragma once

#include <cstddef>
#include <vector>

#include "smi/trace.hpp"

namespace smi {

// Parameters of the weak-feedback self-mixing model. Defaults describe a
// 650 nm diode in the moderate-feedback regime; the feedback level, the
// linewidth-enhancement factor and the modulation depth are free model
// parameters, not measured values.
struct LaserConfig {
  double wavelength_m = 650e-9;
  double feedback_c = 0.5;
  double alpha = 4.6;
  double mod_depth = 0.1;
  double dc_power = 50e-6;  // photocurrent baseline, A
  // Displacement RMS (m) coupled into the beam path by ambient sound at the
  // reference level. Zero means the laser ignores ambient noise.
  double acoustic_coupling_m = 0.0;

  void validate() const;  // throws InvalidConfig
  friend bool operator==(const LaserConfig&, const LaserConfig&) = default;
};

struct FringeDetectorParams {
  double k = 6.0;               // hysteresis in units of the robust noise scale
  std::size_t min_separation = 3;  // samples between accepted fringes
};

struct FringeReport {
  std::size_t fringe_count = 0;
  std::vector<std::size_t> fringe_indices;  // absolute sample indices
  IndexRange window;
};

// Unique root phi_F of phi_F + C sin(phi_F + atan(alpha)) = phi0, for C < 1.
// Safeguarded Newton on the bracket [phi0 - C, phi0 + C].
double solve_excess_phase(double phi0, const LaserConfig& laser);

// dc_power * (1 + mod_depth * cos(phase))
double smi_photocurrent(double phase, const LaserConfig& laser);

// Round-trip interferometric phase 4 pi D / lambda for a target displacement D.
double round_trip_phase(double displacement_m, const LaserConfig& laser);

// Photodiode current for a displacement trace, sample by sample.
SampleTrace simulate_smi(const SampleTrace& displacement, const LaserConfig& laser);

// Counts fringes in signal[window]. Each fringe shows up in the first
// difference as one lobe of each sign; the lobes of the steeper polarity mark
// the fringe edges. Lobes are split with a Schmitt trigger whose band is
// k times a robust noise scale taken from the second difference.
FringeReport count_fringes(const SampleTrace& signal, IndexRange window,
                           const FringeDetectorParams& detector = {});

// One fringe per half wavelength of travel.
double displacement_from_fringes(std::size_t fringe_count, const LaserConfig& laser);

}  // namespace smi
