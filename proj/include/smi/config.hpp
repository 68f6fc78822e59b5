#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smi/analysis.hpp"
#include "smi/error.hpp"
#include "smi/readout.hpp"
#include "smi/scenario.hpp"
#include "smi/smi_core.hpp"

namespace smi {

class ConfigError : public InvalidConfig {
 public:
  using InvalidConfig::InvalidConfig;
};

struct AnalysisConfig {
  // Rest region searched for the worst-case noise window, seconds.
  double rest_start_s = 0.1;
  double rest_end_s = 1.0;
  double noise_window_s = 0.5;
  double signal_start_s = 1.0;
  double signal_end_s = 1.5;
  std::vector<std::pair<double, double>> exclusion_windows;  // seconds

  double spectrum_start_s = 0.25;
  double spectrum_len_s = 1.0;

  EventParams events;

  FringeDetectorParams fringes;
  double fringe_window_start_s = 0.0;
  double fringe_window_end_s = -1.0;  // negative: end of trace

  // Peak-based SNR for impulse trains.
  std::size_t peak_count = 10;
  double peak_min_separation_s = 0.05;
};

struct RunConfig {
  std::string name = "run";
  std::uint64_t seed = 42;
  double anl_db = kReferenceAnlDb;
  double mic_rate_hz = 10'000.0;
  LaserConfig laser;
  ReadoutConfig readout;
  MicModel mic;
  ScenarioSpec scenario;
  bool scenario_seed_set = false;  // otherwise derived from `seed`
  AnalysisConfig analysis;

  // "section.key" for every key the config file set explicitly.
  std::set<std::string> explicit_keys;

  void validate() const;  // throws ConfigError
  std::uint64_t scenario_seed() const;
};

// Sectioned key = value text:
//   # comment
//   [laser]
//   feedback_c = 0.5
//   [scenario.slip_burst]
//   band_lo_hz = 200
//   [analysis]
//   exclusion_windows = [[0.0, 0.1], [1.9, 2.0]]
// Values are numbers, "strings", true/false, or bracketed lists. Unknown
// sections and keys are errors.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical text form; parse_run_config(to_text(c)) reproduces c.
std::string to_text(const RunConfig& config);

}  // namespace smi
