#include "smi/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <variant>

#include "smi/format.hpp"
#include "smi/rng.hpp"

namespace smi {
namespace {

struct Value;
using List = std::vector<Value>;

struct Value {
  std::variant<long long, double, bool, std::string, List> v;

  bool is_number() const { return std::holds_alternative<long long>(v) || std::holds_alternative<double>(v); }
  double number() const {
    if (auto* i = std::get_if<long long>(&v)) return static_cast<double>(*i);
    return std::get<double>(v);
  }
};

class ValueParser {
 public:
  ValueParser(std::string_view text, std::string where) : s_(text), where_(std::move(where)) {}

  Value parse_all() {
    Value v = parse_value();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& m) const { throw ConfigError(where_ + ": " + m); }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  Value parse_value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    if (c == '"') return parse_string();
    if (c == '[') return parse_list();
    std::size_t end = pos_;
    while (end < s_.size() && s_[end] != ',' && s_[end] != ']' && s_[end] != ' ' && s_[end] != '\t') ++end;
    const auto token = s_.substr(pos_, end - pos_);
    pos_ = end;
    if (token == "true") return {true};
    if (token == "false") return {false};
    const bool looks_integral = token.find_first_of(".eEnNiI") == std::string_view::npos;
    try {
      if (looks_integral) return {parse_int(token)};
      const double d = parse_double(token);
      if (!std::isfinite(d)) fail("non-finite number '" + std::string(token) + "'");
      return {d};
    } catch (const InvalidArgument&) {
      fail("cannot parse value '" + std::string(token) + "'");
    }
  }

  Value parse_string() {
    std::string out;
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
      out += s_[pos_++];
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return {std::move(out)};
  }

  Value parse_list() {
    List items;
    ++pos_;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return {std::move(items)};
    }
    for (;;) {
      items.push_back(parse_value());
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated list");
      if (s_[pos_] == ']') {
        ++pos_;
        return {std::move(items)};
      }
      if (s_[pos_] != ',') fail("expected ',' or ']' in list");
      ++pos_;
    }
  }

  std::string_view s_;
  std::string where_;
  std::size_t pos_ = 0;
};

using Setter = std::function<void(const Value&, const std::string& where)>;

[[noreturn]] void type_error(const std::string& where, const char* expected) {
  throw ConfigError(where + ": expected " + expected);
}

Setter number(double& out) {
  return [&out](const Value& v, const std::string& where) {
    if (!v.is_number()) type_error(where, "a number");
    out = v.number();
  };
}

template <typename Int>
Setter integer(Int& out) {
  return [&out](const Value& v, const std::string& where) {
    const auto* i = std::get_if<long long>(&v.v);
    if (!i) type_error(where, "an integer");
    if (*i < 0 && !std::is_signed_v<Int>) type_error(where, "a non-negative integer");
    out = static_cast<Int>(*i);
  };
}

Setter string(std::string& out) {
  return [&out](const Value& v, const std::string& where) {
    const auto* s = std::get_if<std::string>(&v.v);
    if (!s) type_error(where, "a quoted string");
    out = *s;
  };
}

Setter number_list(std::vector<double>& out) {
  return [&out](const Value& v, const std::string& where) {
    const auto* l = std::get_if<List>(&v.v);
    if (!l) type_error(where, "a list of numbers");
    out.clear();
    for (const auto& item : *l) {
      if (!item.is_number()) type_error(where, "a list of numbers");
      out.push_back(item.number());
    }
  };
}

Setter range_list(std::vector<std::pair<double, double>>& out) {
  return [&out](const Value& v, const std::string& where) {
    const auto* l = std::get_if<List>(&v.v);
    if (!l) type_error(where, "a list of [start, end] pairs");
    out.clear();
    for (const auto& item : *l) {
      const auto* pair = std::get_if<List>(&item.v);
      if (!pair || pair->size() != 2 || !(*pair)[0].is_number() || !(*pair)[1].is_number()) {
        type_error(where, "a list of [start, end] pairs");
      }
      out.emplace_back((*pair)[0].number(), (*pair)[1].number());
    }
  };
}

std::map<std::string, Setter> bindings(RunConfig& c, std::string& kind, std::string& event_kind) {
  auto& l = c.laser;
  auto& r = c.readout;
  auto& s = c.scenario;
  auto& a = c.analysis;
  return {
      {"run.name", string(c.name)},
      {"run.seed", integer(c.seed)},
      {"laser.wavelength_m", number(l.wavelength_m)},
      {"laser.feedback_c", number(l.feedback_c)},
      {"laser.alpha", number(l.alpha)},
      {"laser.mod_depth", number(l.mod_depth)},
      {"laser.dc_power", number(l.dc_power)},
      {"laser.acoustic_coupling_m", number(l.acoustic_coupling_m)},
      {"readout.tia_gain_v_per_a", number(r.tia_gain_v_per_a)},
      {"readout.hp_cutoff_hz", number(r.hp_cutoff_hz)},
      {"readout.sa_gain", number(r.sa_gain)},
      {"readout.aa_cutoff_hz", number(r.aa_cutoff_hz)},
      {"readout.aa_quality", number(r.aa_quality)},
      {"readout.adc_rate_hz", number(r.adc_rate_hz)},
      {"readout.adc_bits", integer(r.adc_bits)},
      {"readout.adc_fullscale_v", number(r.adc_fullscale_v)},
      {"readout.noise_v_rms", number(r.noise_v_rms)},
      {"mic.sensitivity", number(c.mic.sensitivity)},
      {"mic.self_noise_rms", number(c.mic.self_noise_rms)},
      {"mic.ambient_coupling", number(c.mic.ambient_coupling)},
      {"mic.rate_hz", number(c.mic_rate_hz)},
      {"scenario.kind", string(kind)},
      {"scenario.duration_s", number(s.duration_s)},
      {"scenario.rate_hz", number(s.rate_hz)},
      {"scenario.offset_m", number(s.offset_m)},
      {"scenario.anl_db", number(c.anl_db)},
      {"scenario.seed", integer(s.seed)},
      {"scenario.sinusoid.freq_hz", number(s.sinusoid.freq_hz)},
      {"scenario.sinusoid.amplitude_pp_m", number(s.sinusoid.amplitude_pp_m)},
      {"scenario.stepper.steps_per_s", number(s.stepper.steps_per_s)},
      {"scenario.stepper.fundamental_amplitude_m", number(s.stepper.fundamental_amplitude_m)},
      {"scenario.stepper.harmonic_rolloff_db", number(s.stepper.harmonic_rolloff_db)},
      {"scenario.stepper.harmonics", integer(s.stepper.harmonics)},
      {"scenario.slip_burst.band_lo_hz", number(s.slip.band_lo_hz)},
      {"scenario.slip_burst.band_hi_hz", number(s.slip.band_hi_hz)},
      {"scenario.slip_burst.rms_m", number(s.slip.rms_m)},
      {"scenario.slip_burst.onset_s", number(s.slip.onset_s)},
      {"scenario.slip_burst.burst_s", number(s.slip.burst_s)},
      {"scenario.impulse_train.peaks_m", number_list(s.impulses.peaks_m)},
      {"scenario.impulse_train.spacing_s", number(s.impulses.spacing_s)},
      {"scenario.impulse_train.ring_freq_hz", number(s.impulses.ring_freq_hz)},
      {"scenario.impulse_train.decay_tau_s", number(s.impulses.decay_tau_s)},
      {"scenario.impulse_train.lead_s", number(s.impulses.lead_s)},
      {"analysis.rest_start_s", number(a.rest_start_s)},
      {"analysis.rest_end_s", number(a.rest_end_s)},
      {"analysis.noise_window_s", number(a.noise_window_s)},
      {"analysis.signal_start_s", number(a.signal_start_s)},
      {"analysis.signal_end_s", number(a.signal_end_s)},
      {"analysis.exclusion_windows", range_list(a.exclusion_windows)},
      {"analysis.spectrum_start_s", number(a.spectrum_start_s)},
      {"analysis.spectrum_len_s", number(a.spectrum_len_s)},
      {"analysis.event_threshold", number(a.events.threshold)},
      {"analysis.event_release", number(a.events.release)},
      {"analysis.event_min_duration_s", number(a.events.min_duration_s)},
      {"analysis.event_hold_s", number(a.events.hold_s)},
      {"analysis.envelope_s", number(a.events.envelope_s)},
      {"analysis.event_kind", string(event_kind)},
      {"analysis.fringe_k", number(a.fringes.k)},
      {"analysis.fringe_min_separation", integer(a.fringes.min_separation)},
      {"analysis.fringe_window_start_s", number(a.fringe_window_start_s)},
      {"analysis.fringe_window_end_s", number(a.fringe_window_end_s)},
      {"analysis.peak_count", integer(a.peak_count)},
      {"analysis.peak_min_separation_s", number(a.peak_min_separation_s)},
  };
}

std::string_view event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::slip: return "slip";
    case EventKind::contact: return "contact";
    case EventKind::impulse: return "impulse";
  }
  return "slip";
}

EventKind event_kind_from(std::string_view s) {
  for (auto k : {EventKind::slip, EventKind::contact, EventKind::impulse}) {
    if (event_kind_name(k) == s) return k;
  }
  throw ConfigError("analysis.event_kind: unknown event kind '" + std::string(s) + "'");
}

std::string quote_str(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace

void RunConfig::validate() const {
  try {
    laser.validate();
    readout.validate();
    mic.validate();
    scenario.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const auto& a = analysis;
  auto fail = [](const std::string& m) { throw ConfigError("analysis: " + m); };
  if (!(mic_rate_hz > 0.0)) throw ConfigError("mic: rate_hz must be > 0");
  const double ratio = scenario.rate_hz / mic_rate_hz;
  if (ratio < 1.0 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw ConfigError("mic: rate_hz must divide scenario.rate_hz");
  }
  if (!(a.rest_start_s >= 0.0 && a.rest_start_s < a.rest_end_s)) fail("need 0 <= rest_start_s < rest_end_s");
  if (!(a.noise_window_s > 0.0 && a.noise_window_s <= a.rest_end_s - a.rest_start_s)) {
    fail("noise_window_s must fit inside the rest region");
  }
  if (!(a.signal_start_s >= 0.0 && a.signal_start_s < a.signal_end_s)) fail("need 0 <= signal_start_s < signal_end_s");
  for (const auto& [b, e] : a.exclusion_windows) {
    if (!(b >= 0.0 && b < e)) fail("exclusion windows need 0 <= start < end");
  }
  if (!(a.spectrum_len_s > 0.0) || a.spectrum_start_s < 0.0) fail("bad spectrum window");
  if (!(a.events.threshold > 0.0 && a.events.release > 0.0 && a.events.envelope_s > 0.0)) {
    fail("event threshold, release and envelope must be > 0");
  }
  if (!(a.fringes.k > 0.0)) fail("fringe_k must be > 0");
  if (a.peak_count == 0) fail("peak_count must be >= 1");
}

std::uint64_t RunConfig::scenario_seed() const {
  return scenario_seed_set ? scenario.seed : derive_seed(seed, Stream::scenario);
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig cfg;
  std::string kind(to_string(cfg.scenario.kind));
  std::string event_kind(event_kind_name(cfg.analysis.events.kind));
  const auto table = bindings(cfg, kind, event_kind);
  std::set<std::string> sections;
  for (const auto& [key, _] : table) sections.insert(key.substr(0, key.rfind('.')));

  std::string section;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);

    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!sections.contains(section)) throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside of any section");
    const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(where + ": unknown key '" + key + "'");
    if (cfg.explicit_keys.contains(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    const Value v = ValueParser(trim(line.substr(eq + 1)), where + " (" + key + ")").parse_all();
    it->second(v, where + " (" + key + ")");
    cfg.explicit_keys.insert(key);
  }
  try {
    cfg.scenario.kind = scenario_kind_from_string(kind);
  } catch (const InvalidConfig& e) {
    throw ConfigError(std::string("scenario.kind: ") + e.what());
  }
  cfg.analysis.events.kind = event_kind_from(event_kind);
  cfg.scenario_seed_set = cfg.explicit_keys.contains("scenario.seed");
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open config '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

std::string to_text(const RunConfig& c) {
  const auto n = [](double v) {
    auto s = format_double(v);
    // Keep floats recognisable as floats on re-parse.
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
  };
  const auto& l = c.laser;
  const auto& r = c.readout;
  const auto& s = c.scenario;
  const auto& a = c.analysis;
  std::string o;
  auto kv = [&o](std::string_view key, const std::string& value) {
    o += std::string(key) + " = " + value + '\n';
  };
  o += "[run]\n";
  kv("name", quote_str(c.name));
  kv("seed", std::to_string(c.seed));
  o += "\n[laser]\n";
  kv("wavelength_m", n(l.wavelength_m));
  kv("feedback_c", n(l.feedback_c));
  kv("alpha", n(l.alpha));
  kv("mod_depth", n(l.mod_depth));
  kv("dc_power", n(l.dc_power));
  kv("acoustic_coupling_m", n(l.acoustic_coupling_m));
  o += "\n[readout]\n";
  kv("tia_gain_v_per_a", n(r.tia_gain_v_per_a));
  kv("hp_cutoff_hz", n(r.hp_cutoff_hz));
  kv("sa_gain", n(r.sa_gain));
  kv("aa_cutoff_hz", n(r.aa_cutoff_hz));
  kv("aa_quality", n(r.aa_quality));
  kv("adc_rate_hz", n(r.adc_rate_hz));
  kv("adc_bits", std::to_string(r.adc_bits));
  kv("adc_fullscale_v", n(r.adc_fullscale_v));
  kv("noise_v_rms", n(r.noise_v_rms));
  o += "\n[mic]\n";
  kv("sensitivity", n(c.mic.sensitivity));
  kv("self_noise_rms", n(c.mic.self_noise_rms));
  kv("ambient_coupling", n(c.mic.ambient_coupling));
  kv("rate_hz", n(c.mic_rate_hz));
  o += "\n[scenario]\n";
  kv("kind", quote_str(to_string(s.kind)));
  kv("duration_s", n(s.duration_s));
  kv("rate_hz", n(s.rate_hz));
  kv("offset_m", n(s.offset_m));
  kv("anl_db", n(c.anl_db));
  if (c.scenario_seed_set) kv("seed", std::to_string(s.seed));
  o += "\n[scenario.sinusoid]\n";
  kv("freq_hz", n(s.sinusoid.freq_hz));
  kv("amplitude_pp_m", n(s.sinusoid.amplitude_pp_m));
  o += "\n[scenario.stepper]\n";
  kv("steps_per_s", n(s.stepper.steps_per_s));
  kv("fundamental_amplitude_m", n(s.stepper.fundamental_amplitude_m));
  kv("harmonic_rolloff_db", n(s.stepper.harmonic_rolloff_db));
  kv("harmonics", std::to_string(s.stepper.harmonics));
  o += "\n[scenario.slip_burst]\n";
  kv("band_lo_hz", n(s.slip.band_lo_hz));
  kv("band_hi_hz", n(s.slip.band_hi_hz));
  kv("rms_m", n(s.slip.rms_m));
  kv("onset_s", n(s.slip.onset_s));
  kv("burst_s", n(s.slip.burst_s));
  o += "\n[scenario.impulse_train]\n";
  std::string peaks = "[";
  for (std::size_t i = 0; i < s.impulses.peaks_m.size(); ++i) {
    peaks += (i ? ", " : "") + n(s.impulses.peaks_m[i]);
  }
  kv("peaks_m", peaks + "]");
  kv("spacing_s", n(s.impulses.spacing_s));
  kv("ring_freq_hz", n(s.impulses.ring_freq_hz));
  kv("decay_tau_s", n(s.impulses.decay_tau_s));
  kv("lead_s", n(s.impulses.lead_s));
  o += "\n[analysis]\n";
  kv("rest_start_s", n(a.rest_start_s));
  kv("rest_end_s", n(a.rest_end_s));
  kv("noise_window_s", n(a.noise_window_s));
  kv("signal_start_s", n(a.signal_start_s));
  kv("signal_end_s", n(a.signal_end_s));
  std::string ex = "[";
  for (std::size_t i = 0; i < a.exclusion_windows.size(); ++i) {
    ex += (i ? ", [" : "[") + n(a.exclusion_windows[i].first) + ", " +
          n(a.exclusion_windows[i].second) + "]";
  }
  kv("exclusion_windows", ex + "]");
  kv("spectrum_start_s", n(a.spectrum_start_s));
  kv("spectrum_len_s", n(a.spectrum_len_s));
  kv("event_threshold", n(a.events.threshold));
  kv("event_release", n(a.events.release));
  kv("event_min_duration_s", n(a.events.min_duration_s));
  kv("event_hold_s", n(a.events.hold_s));
  kv("envelope_s", n(a.events.envelope_s));
  kv("event_kind", quote_str(event_kind_name(a.events.kind)));
  kv("fringe_k", n(a.fringes.k));
  kv("fringe_min_separation", std::to_string(a.fringes.min_separation));
  kv("fringe_window_start_s", n(a.fringe_window_start_s));
  kv("fringe_window_end_s", n(a.fringe_window_end_s));
  kv("peak_count", std::to_string(a.peak_count));
  kv("peak_min_separation_s", n(a.peak_min_separation_s));
  return o;
}

}  // namespace smi
