#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smi/error.hpp"

namespace smi {

// One experiment: SNRs of both sensors and their difference (mic - laser).
// The absolute SNRs may be unknown when only the difference was reported.
struct ExperimentRecord {
  std::string name;
  std::string family;  // records sharing a family share a vertical coordinate
  double anl_db = 57.0;
  std::optional<double> mic_snr_db;
  std::optional<double> laser_snr_db;
  double diff_db = 0.0;

  void validate() const;  // throws InvalidArgument when the diff does not reconstruct
};

enum class Winner { laser, microphone };

std::string_view to_string(Winner w);
Winner winner_from_string(std::string_view s);

struct Classification {
  Winner winner = Winner::laser;
  bool tie = false;  // |diff| <= 0.1 dB
};

inline constexpr double kTieToleranceDb = 0.1;

Classification classify(const ExperimentRecord& record);
Classification classify_diff(double diff_db);

struct MapPoint {
  std::string name;
  double anl_db = 0.0;
  double mic_baseline_snr_db = 0.0;  // NaN when the family has no baseline record
  double diff_db = 0.0;
  Winner winner = Winner::laser;
  bool tie = false;
};

bool operator==(const MapPoint& a, const MapPoint& b);  // NaN == NaN here

struct DecisionMapData {
  std::vector<MapPoint> points;
  double baseline_anl_db = 57.0;

  friend bool operator==(const DecisionMapData&, const DecisionMapData&) = default;
};

class MissingBaseline : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct BuildOptions {
  double baseline_anl_db = 57.0;
  double baseline_tolerance_db = 0.5;
  // Families without a baseline record get a NaN vertical coordinate instead
  // of raising MissingBaseline.
  bool allow_missing_baseline = false;
};

DecisionMapData build_map(const std::vector<ExperimentRecord>& records,
                          const BuildOptions& options = {});

enum class MapFormat { csv, svg };

std::string emit_map(const DecisionMapData& map, MapFormat format);
void write_map(const DecisionMapData& map, MapFormat format, const std::filesystem::path& path);
DecisionMapData parse_map_csv(std::string_view csv, double baseline_anl_db = 57.0);

// name,family,anl_db,mic_snr_db,laser_snr_db,diff_db; '#' starts a comment,
// an empty SNR field means "not reported".
std::vector<ExperimentRecord> parse_records_csv(std::string_view csv);
std::string emit_records_csv(const std::vector<ExperimentRecord>& records);

// The nine experiments of the SMI-versus-microphone comparison.
std::vector<ExperimentRecord> reference_experiments();

}  // namespace smi
