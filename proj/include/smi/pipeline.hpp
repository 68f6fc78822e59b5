#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "smi/analysis.hpp"
#include "smi/config.hpp"
#include "smi/decision_map.hpp"
#include "smi/readout.hpp"

namespace smi {

enum class Subcommand { simulate, analyze, spectrum, fringes, decision_map, validate };

std::string_view to_string(Subcommand s);
// Accepts "decision-map" as well as "decision_map".
Subcommand subcommand_from_string(std::string_view s);

struct PipelineOptions {
  std::filesystem::path out_dir = "out";
  // Recorded traces used instead of simulating the channels.
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> mic_input;
  // Experiment records for decision_map; the built-in fixture otherwise.
  std::optional<std::filesystem::path> records;
  bool allow_missing_baseline = false;
};

struct PipelineResult {
  int exit_code = 0;  // 0 ok, 1 a check failed
  nlohmann::ordered_json report;
  std::vector<std::filesystem::path> artifacts;
};

struct Channels {
  SampleTrace displacement;  // physics rate, includes the stand-off
  LaserChannelResult laser;
  SampleTrace mic;
};

// Both sensors observing the configured scenario.
Channels build_channels(const RunConfig& config);

struct ChannelAnalysis {
  NoiseEstimate noise;
  SnrReport snr;
  EventList events;
};

ChannelAnalysis analyze_channel(const SampleTrace& trace, const AnalysisConfig& analysis,
                                bool peak_based);

// Throws InvalidConfig, InvalidArgument, IoError, ... on bad input; check
// failures are reported through exit_code instead.
PipelineResult run_pipeline(const RunConfig& config, Subcommand sub,
                            const PipelineOptions& options = {});

}  // namespace smi
