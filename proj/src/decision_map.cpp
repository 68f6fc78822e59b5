#include "smi/decision_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "smi/format.hpp"

namespace smi {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string_view> data_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(start, nl - start));
    if (!line.empty() && line.front() != '#') lines.push_back(line);
    start = nl + 1;
  }
  return lines;
}

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string nan_field(double v) { return std::isnan(v) ? std::string() : format_double(v); }

std::string svg_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string emit_svg(const DecisionMapData& map) {
  constexpr double kW = 640, kH = 480, kLeft = 70, kRight = 20, kTop = 60, kBottom = 60;
  double x_lo = map.baseline_anl_db - 5, x_hi = map.baseline_anl_db + 30;
  double y_lo = 0, y_hi = 50;
  for (const auto& p : map.points) {
    x_lo = std::min(x_lo, p.anl_db - 5);
    x_hi = std::max(x_hi, p.anl_db + 5);
    if (!std::isnan(p.mic_baseline_snr_db)) {
      y_lo = std::min(y_lo, p.mic_baseline_snr_db - 5);
      y_hi = std::max(y_hi, p.mic_baseline_snr_db + 5);
    }
  }
  auto sx = [&](double v) { return kLeft + (v - x_lo) / (x_hi - x_lo) * (kW - kLeft - kRight); };
  auto sy = [&](double v) { return kH - kBottom - (v - y_lo) / (y_hi - y_lo) * (kH - kTop - kBottom); };
  auto colour = [](Winner w) { return w == Winner::laser ? "#d95f02" : "#1b9e77"; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kW
     << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Per-point winner shading.
  for (const auto& p : map.points) {
    const double cy = std::isnan(p.mic_baseline_snr_db) ? kTop - 30 : sy(p.mic_baseline_snr_db);
    os << "<rect x=\"" << fixed(sx(p.anl_db) - 28, 2) << "\" y=\"" << fixed(cy - 28, 2)
       << "\" width=\"56\" height=\"56\" fill=\"" << colour(p.winner)
       << "\" fill-opacity=\"0.18\"/>\n";
  }
  const double x0 = kLeft, x1 = kW - kRight, y0 = kH - kBottom, y1 = kTop;
  os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
     << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
     << "\" stroke=\"black\"/>\n";
  for (double t = std::ceil(x_lo / 5) * 5; t <= x_hi; t += 5) {
    os << "<text x=\"" << fixed(sx(t), 2) << "\" y=\"" << y0 + 18
       << "\" font-size=\"11\" text-anchor=\"middle\">" << fixed(t, 0) << "</text>\n";
  }
  for (double t = std::ceil(y_lo / 10) * 10; t <= y_hi; t += 10) {
    os << "<text x=\"" << x0 - 8 << "\" y=\"" << fixed(sy(t) + 4, 2)
       << "\" font-size=\"11\" text-anchor=\"end\">" << fixed(t, 0) << "</text>\n";
  }
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kH - 15
     << "\" font-size=\"13\" text-anchor=\"middle\">ambient noise level (dB)</text>\n"
     << "<text x=\"18\" y=\"" << (y0 + y1) / 2 << "\" font-size=\"13\" text-anchor=\"middle\" "
     << "transform=\"rotate(-90 18 " << (y0 + y1) / 2 << ")\">microphone SNR at "
     << fixed(map.baseline_anl_db, 0) << " dB ANL (dB)</text>\n";
  for (const auto& p : map.points) {
    const double cx = sx(p.anl_db);
    const double cy = std::isnan(p.mic_baseline_snr_db) ? kTop - 30 : sy(p.mic_baseline_snr_db);
    os << "<g><title>" << svg_escape(p.name) << "</title>"
       << "<circle cx=\"" << fixed(cx, 2) << "\" cy=\"" << fixed(cy, 2)
       << "\" r=\"16\" fill=\"white\" stroke=\"black\" stroke-width=\"2\"/>"
       << "<text x=\"" << fixed(cx, 2) << "\" y=\"" << fixed(cy + 4, 2)
       << "\" font-size=\"10\" text-anchor=\"middle\">" << fixed(p.diff_db, 1) << "</text></g>\n";
  }
  os << "<rect x=\"" << x1 - 120 << "\" y=\"" << y1 << "\" width=\"12\" height=\"12\" fill=\""
     << colour(Winner::laser) << "\" fill-opacity=\"0.5\"/><text x=\"" << x1 - 104 << "\" y=\""
     << y1 + 10 << "\" font-size=\"11\">laser</text>\n"
     << "<rect x=\"" << x1 - 120 << "\" y=\"" << y1 + 16 << "\" width=\"12\" height=\"12\" fill=\""
     << colour(Winner::microphone) << "\" fill-opacity=\"0.5\"/><text x=\"" << x1 - 104
     << "\" y=\"" << y1 + 26 << "\" font-size=\"11\">microphone</text>\n"
     << "</svg>\n";
  return os.str();
}

}  // namespace

void ExperimentRecord::validate() const {
  if (!std::isfinite(anl_db) || !std::isfinite(diff_db)) {
    throw InvalidArgument("record '" + name + "': anl_db and diff_db must be finite");
  }
  if (mic_snr_db && laser_snr_db) {
    const double rebuilt = *mic_snr_db - *laser_snr_db;
    if (std::abs(rebuilt - diff_db) > kTieToleranceDb + 1e-9) {
      throw InvalidArgument("record '" + name + "': diff_db " + format_double(diff_db) +
                            " does not match mic - laser = " + format_double(rebuilt));
    }
  }
}

std::string_view to_string(Winner w) { return w == Winner::laser ? "laser" : "microphone"; }

Winner winner_from_string(std::string_view s) {
  if (s == "laser") return Winner::laser;
  if (s == "microphone") return Winner::microphone;
  throw InvalidArgument("unknown winner '" + std::string(s) + "'");
}

Classification classify_diff(double diff_db) {
  // An exact 0 dB difference goes to the laser.
  return {diff_db > 0.0 ? Winner::microphone : Winner::laser,
          std::abs(diff_db) <= kTieToleranceDb};
}

Classification classify(const ExperimentRecord& record) { return classify_diff(record.diff_db); }

bool operator==(const MapPoint& a, const MapPoint& b) {
  const bool same_y = (std::isnan(a.mic_baseline_snr_db) && std::isnan(b.mic_baseline_snr_db)) ||
                      a.mic_baseline_snr_db == b.mic_baseline_snr_db;
  return a.name == b.name && a.anl_db == b.anl_db && same_y && a.diff_db == b.diff_db &&
         a.winner == b.winner && a.tie == b.tie;
}

DecisionMapData build_map(const std::vector<ExperimentRecord>& records,
                          const BuildOptions& options) {
  if (records.empty()) throw InvalidArgument("build_map: no records");
  std::map<std::string, double> baseline;
  for (const auto& r : records) {
    r.validate();
    if (std::abs(r.anl_db - options.baseline_anl_db) <= options.baseline_tolerance_db &&
        r.mic_snr_db && !baseline.contains(r.family)) {
      baseline[r.family] = *r.mic_snr_db;
    }
  }
  DecisionMapData map;
  map.baseline_anl_db = options.baseline_anl_db;
  for (const auto& r : records) {
    MapPoint p;
    p.name = r.name;
    p.anl_db = r.anl_db;
    p.diff_db = r.diff_db;
    const auto c = classify(r);
    p.winner = c.winner;
    p.tie = c.tie;
    if (auto it = baseline.find(r.family); it != baseline.end()) {
      p.mic_baseline_snr_db = it->second;
    } else if (options.allow_missing_baseline) {
      p.mic_baseline_snr_db = kNaN;
    } else {
      throw MissingBaseline("build_map: family '" + r.family + "' of record '" + r.name +
                            "' has no record at the baseline ANL");
    }
    map.points.push_back(std::move(p));
  }
  return map;
}

std::string emit_map(const DecisionMapData& map, MapFormat format) {
  if (format == MapFormat::svg) return emit_svg(map);
  std::string out = "name,anl_db,mic_baseline_snr_db,diff_db,winner\n";
  for (const auto& p : map.points) {
    out += p.name + ',' + format_double(p.anl_db) + ',' + nan_field(p.mic_baseline_snr_db) + ',' +
           format_double(p.diff_db) + ',' + std::string(to_string(p.winner)) + '\n';
  }
  return out;
}

void write_map(const DecisionMapData& map, MapFormat format, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << emit_map(map, format);
  if (!f.flush()) throw IoError("failed writing '" + path.string() + "'");
}

DecisionMapData parse_map_csv(std::string_view csv, double baseline_anl_db) {
  DecisionMapData map;
  map.baseline_anl_db = baseline_anl_db;
  const auto lines = data_lines(csv);
  if (lines.empty() || lines.front() != "name,anl_db,mic_baseline_snr_db,diff_db,winner") {
    throw InvalidArgument("decision-map CSV: missing or unexpected header row");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_fields(lines[i]);
    if (f.size() != 5) throw InvalidArgument("decision-map CSV: expected 5 columns");
    MapPoint p;
    p.name = std::string(f[0]);
    p.anl_db = parse_double(f[1]);
    p.mic_baseline_snr_db = f[2].empty() ? kNaN : parse_double(f[2]);
    p.diff_db = parse_double(f[3]);
    p.winner = winner_from_string(f[4]);
    p.tie = classify_diff(p.diff_db).tie;
    if (classify_diff(p.diff_db).winner != p.winner) {
      throw InvalidArgument("decision-map CSV: winner of '" + p.name + "' contradicts diff_db");
    }
    map.points.push_back(std::move(p));
  }
  return map;
}

std::vector<ExperimentRecord> parse_records_csv(std::string_view csv) {
  const auto lines = data_lines(csv);
  if (lines.empty() || lines.front() != "name,family,anl_db,mic_snr_db,laser_snr_db,diff_db") {
    throw InvalidArgument("records CSV: missing or unexpected header row");
  }
  std::vector<ExperimentRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_fields(lines[i]);
    if (f.size() != 6) throw InvalidArgument("records CSV: expected 6 columns");
    ExperimentRecord r;
    r.name = std::string(f[0]);
    r.family = std::string(f[1]);
    r.anl_db = parse_double(f[2]);
    if (!f[3].empty()) r.mic_snr_db = parse_double(f[3]);
    if (!f[4].empty()) r.laser_snr_db = parse_double(f[4]);
    r.diff_db = parse_double(f[5]);
    r.validate();
    out.push_back(std::move(r));
  }
  return out;
}

std::string emit_records_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = "name,family,anl_db,mic_snr_db,laser_snr_db,diff_db\n";
  for (const auto& r : records) {
    out += r.name + ',' + r.family + ',' + format_double(r.anl_db) + ',' +
           optional_field(r.mic_snr_db) + ',' + optional_field(r.laser_snr_db) + ',' +
           format_double(r.diff_db) + '\n';
  }
  return out;
}

std::vector<ExperimentRecord> reference_experiments() {
  return {
      {"cable1", "cable", 57.0, 1.7, 22.2, -20.5},
      {"cable5", "cable", 57.0, 13.9, 30.4, -16.5},
      {"box2", "box", 57.0, 25.9, 21.2, 4.7},
      {"box5", "box", 57.0, 41.8, 24.1, 17.7},
      {"pencil57", "pencil", 57.0, 24.5, 19.9, 4.6},
      {"pencil62", "pencil", 62.0, 5.0, 21.3, -16.3},
      // Laser 37.5 = 43.9 - 6.4 (mic outperforms the laser by 6.4 dB).
      {"cupSil57", "cup_silicone", 57.0, 43.9, 37.5, 6.4},
      // +25 dB of noise: laser drops 1.7 dB to 35.8, mic drops 21.1 dB to 22.8.
      {"cupSil82", "cup_silicone", 82.0, 22.8, 35.8, -13.0},
      // Only the difference is reported for the bolts.
      {"cupBolt82", "cup_bolt", 82.0, std::nullopt, std::nullopt, 6.4},
  };
}

}  // namespace smi
