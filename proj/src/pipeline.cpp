#include "smi/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <iterator>

#include "smi/format.hpp"
#include "smi/rng.hpp"
#include "smi/scenario.hpp"
#include "smi/smi_core.hpp"
#include "smi/trace_io.hpp"

namespace smi {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Parameters the physics depends on but for which no measured value exists.
constexpr const char* kUnmeasuredKeys[] = {"laser.feedback_c", "laser.alpha", "laser.mod_depth"};

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir, PipelineResult& result) : dir_(std::move(dir)), r_(result) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  void text(const std::string& name, const std::string& body) {
    const auto path = dir_ / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f.write(body.data(), static_cast<std::streamsize>(body.size())) || !f.flush()) {
      throw IoError("cannot write '" + path.string() + "'");
    }
    r_.artifacts.push_back(path);
  }

  void trace(const std::string& name, const SampleTrace& t, const TraceHeader& header) {
    const auto path = dir_ / name;
    write_trace(t, path, TraceFormat::csv, header);
    r_.artifacts.push_back(path);
  }

  void json(const std::string& name, const Json& j) { text(name, j.dump(2) + "\n"); }

 private:
  fs::path dir_;
  PipelineResult& r_;
};

Json range_json(IndexRange r) { return Json::array({r.begin, r.end}); }

std::string_view method_name(SnrMethod m) {
  return m == SnrMethod::peak_based ? "peak_based" : "window_power";
}

Json analysis_json(const ChannelAnalysis& a, double rate_hz) {
  Json events = Json::array();
  for (const auto& e : a.events.events) {
    events.push_back({{"start_s", static_cast<double>(e.start) / rate_hz},
                      {"end_s", static_cast<double>(e.end) / rate_hz},
                      {"peak_normalized_amplitude", e.peak_normalized_amplitude}});
  }
  return {{"sqrt_p_noise", a.noise.sqrt_p_noise},
          {"noise_window", range_json(a.noise.window)},
          {"p_signal", a.snr.p_signal},
          {"p_noise", a.snr.p_noise},
          {"snr_db", a.snr.snr_db},
          {"method", method_name(a.snr.method)},
          {"signal_window", range_json(a.snr.signal_window)},
          {"events", std::move(events)}};
}

Json defaults_json(const RunConfig& c) {
  Json out = Json::array();
  for (const char* key : kUnmeasuredKeys) {
    if (!c.explicit_keys.contains(key)) out.push_back(key);
  }
  return out;
}

Json run_header(const RunConfig& c, Subcommand sub) {
  return {{"subcommand", to_string(sub)},
          {"name", c.name},
          {"seed", c.seed},
          {"scenario", to_string(c.scenario.kind)},
          {"anl_db", c.anl_db},
          {"defaulted_unmeasured_parameters", defaults_json(c)}};
}

TraceHeader header_for(const std::string& channel, std::uint64_t seed) {
  TraceHeader h;
  h.channel = channel;
  h.seed = seed;
  return h;
}

struct LoadedChannels {
  std::optional<SampleTrace> laser;
  std::optional<SampleTrace> mic;
  Json laser_meta = Json::object();
};

LoadedChannels load_or_build(const RunConfig& c, const PipelineOptions& o) {
  LoadedChannels out;
  if (o.input || o.mic_input) {
    if (o.input) out.laser = read_trace(*o.input, trace_format_from_path(*o.input));
    if (o.mic_input) out.mic = read_trace(*o.mic_input, trace_format_from_path(*o.mic_input));
    return out;
  }
  auto ch = build_channels(c);
  out.laser_meta = {{"clipped", ch.laser.clipped},
                    {"peak_fringe_rate_hz", ch.laser.peak_fringe_rate_hz},
                    {"fringe_rate_exceeds_aa", ch.laser.fringe_rate_exceeds_aa}};
  out.laser = std::move(ch.laser.trace);
  out.mic = std::move(ch.mic);
  return out;
}

void write_spectrum(ArtifactWriter& w, const std::string& name, const SpectrumReport& s) {
  std::string body = "freq_hz,normalized_magnitude\n";
  for (std::size_t i = 0; i < s.freqs_hz.size(); ++i) {
    body += format_double(s.freqs_hz[i]) + ',' + format_double(s.normalized_magnitudes[i]) + '\n';
  }
  w.text(name, body);
}

Json spectrum_json(const SpectrumReport& s) {
  return {{"window_s", s.window_s},
          {"resolution_hz", s.resolution_hz()},
          {"peak_freq_hz", s.peak_freq_hz()},
          {"peak_bin", s.peak_bin},
          {"peak_magnitude", s.peak_magnitude},
          {"degenerate", s.degenerate}};
}

PipelineResult do_simulate(const RunConfig& c, const PipelineOptions& o) {
  PipelineResult r;
  ArtifactWriter w(o.out_dir, r);
  auto ch = build_channels(c);
  w.trace("laser.csv", ch.laser.trace, header_for("laser", c.seed));
  w.trace("mic.csv", ch.mic, header_for("mic", c.seed));
  r.report = run_header(c, Subcommand::simulate);
  r.report["laser"] = {{"samples", ch.laser.trace.size()},
                       {"rate_hz", ch.laser.trace.sample_rate_hz()},
                       {"clipped", ch.laser.clipped},
                       {"peak_fringe_rate_hz", ch.laser.peak_fringe_rate_hz},
                       {"fringe_rate_exceeds_aa", ch.laser.fringe_rate_exceeds_aa}};
  r.report["mic"] = {{"samples", ch.mic.size()}, {"rate_hz", ch.mic.sample_rate_hz()}};
  w.text("config.cfg", to_text(c));
  w.json("simulate.json", r.report);
  return r;
}

PipelineResult do_analyze(const RunConfig& c, const PipelineOptions& o) {
  PipelineResult r;
  ArtifactWriter w(o.out_dir, r);
  const auto ch = load_or_build(c, o);
  const bool peaks = c.scenario.kind == ScenarioKind::impulse_train;
  r.report = run_header(c, Subcommand::analyze);
  std::optional<ChannelAnalysis> laser, mic;
  if (ch.laser) {
    laser = analyze_channel(*ch.laser, c.analysis, peaks);
    r.report["laser"] = analysis_json(*laser, ch.laser->sample_rate_hz());
    r.report["laser"]["readout"] = ch.laser_meta;
  }
  if (ch.mic) {
    mic = analyze_channel(*ch.mic, c.analysis, peaks);
    r.report["mic"] = analysis_json(*mic, ch.mic->sample_rate_hz());
  }
  if (laser && mic) {
    ExperimentRecord rec;
    rec.name = c.name;
    rec.family = std::string(to_string(c.scenario.kind));
    rec.anl_db = c.anl_db;
    rec.mic_snr_db = mic->snr.snr_db;
    rec.laser_snr_db = laser->snr.snr_db;
    rec.diff_db = mic->snr.snr_db - laser->snr.snr_db;
    const auto cls = classify(rec);
    r.report["record"] = {{"diff_db", rec.diff_db},
                          {"winner", to_string(cls.winner)},
                          {"tie", cls.tie}};
    w.text("record.csv", emit_records_csv({rec}));
  }
  w.json("analyze.json", r.report);
  return r;
}

PipelineResult do_spectrum(const RunConfig& c, const PipelineOptions& o) {
  PipelineResult r;
  ArtifactWriter w(o.out_dir, r);
  const auto ch = load_or_build(c, o);
  r.report = run_header(c, Subcommand::spectrum);
  const auto& a = c.analysis;
  if (ch.laser) {
    const auto s = spectrum(*ch.laser, a.spectrum_start_s, a.spectrum_len_s);
    write_spectrum(w, "laser_spectrum.csv", s);
    r.report["laser"] = spectrum_json(s);
  }
  if (ch.mic) {
    const auto s = spectrum(*ch.mic, a.spectrum_start_s, a.spectrum_len_s);
    write_spectrum(w, "mic_spectrum.csv", s);
    r.report["mic"] = spectrum_json(s);
  }
  w.json("spectrum.json", r.report);
  return r;
}

// Counted on the photocurrent at the physics rate: fringes from a real
// target are usually much faster than the readout bandwidth.
PipelineResult do_fringes(const RunConfig& c, const PipelineOptions& o) {
  PipelineResult r;
  ArtifactWriter w(o.out_dir, r);
  SampleTrace signal;
  if (o.input) {
    signal = read_trace(*o.input, trace_format_from_path(*o.input));
  } else {
    auto spec = c.scenario;
    spec.seed = c.scenario_seed();
    signal = simulate_smi(generate(spec), c.laser);
  }
  const auto& a = c.analysis;
  const double end_s = a.fringe_window_end_s < 0.0 ? signal.duration_s() : a.fringe_window_end_s;
  const auto window = signal.range_s(a.fringe_window_start_s, end_s);
  const auto rep = count_fringes(signal, window, a.fringes);
  r.report = run_header(c, Subcommand::fringes);
  r.report["window"] = range_json(rep.window);
  r.report["fringe_count"] = rep.fringe_count;
  r.report["displacement_m"] = displacement_from_fringes(rep.fringe_count, c.laser);
  r.report["fringe_indices"] = rep.fringe_indices;
  w.json("fringes.json", r.report);
  return r;
}

PipelineResult do_decision_map(const RunConfig& c, const PipelineOptions& o) {
  PipelineResult r;
  ArtifactWriter w(o.out_dir, r);
  BuildOptions opts;
  std::vector<ExperimentRecord> records;
  std::string source;
  if (o.records) {
    records = parse_records_csv(read_text(*o.records));
    opts.allow_missing_baseline = o.allow_missing_baseline;
    source = o.records->filename().string();
  } else {
    records = reference_experiments();
    opts.allow_missing_baseline = true;  // one family was only measured loud
    source = "builtin";
  }
  const auto map = build_map(records, opts);
  w.text("decision_map.csv", emit_map(map, MapFormat::csv));
  w.text("decision_map.svg", emit_map(map, MapFormat::svg));
  r.report = run_header(c, Subcommand::decision_map);
  r.report["records"] = source;
  Json points = Json::array();
  for (const auto& p : map.points) {
    points.push_back({{"name", p.name},
                      {"anl_db", p.anl_db},
                      {"diff_db", p.diff_db},
                      {"winner", to_string(p.winner)},
                      {"tie", p.tie}});
  }
  r.report["points"] = std::move(points);
  w.json("decision_map.json", r.report);
  return r;
}

PipelineResult do_validate(const RunConfig& c, const PipelineOptions& o) {
  PipelineResult r;
  ArtifactWriter w(o.out_dir, r);
  r.report = run_header(c, Subcommand::validate);
  bool ok = true;
  Json checks = Json::array();
  auto check = [&](const std::string& name, bool pass, Json detail) {
    ok = ok && pass;
    Json entry = {{"check", name}, {"pass", pass}};
    entry.update(detail);
    checks.push_back(std::move(entry));
  };

  // Speaker: sinusoidal drive, fringes counted between turning points.
  const double lambda = c.laser.wavelength_m;
  for (const int waves : {3, 4}) {
    const double f = 500.0;
    const auto d = gen_sinusoid(f, waves * lambda, 0.01, kPhysicsRateHz);
    const auto current = simulate_smi(d, c.laser);
    const auto half = static_cast<std::size_t>(std::llround(kPhysicsRateHz / f / 2.0));
    const std::size_t expected = 2 * static_cast<std::size_t>(waves);
    std::vector<std::size_t> counts;
    bool all = true;
    for (std::size_t b = half / 2; b + half <= current.size(); b += half) {
      const auto rep = count_fringes(current, {b, b + half}, c.analysis.fringes);
      counts.push_back(rep.fringe_count);
      all = all && rep.fringe_count == expected;
    }
    check("speaker_" + std::to_string(waves) + "_wavelengths", all && !counts.empty(),
          {{"expected_per_half_period", expected}, {"counts", counts}});
    const double travel = displacement_from_fringes(expected, c.laser);
    check("speaker_" + std::to_string(waves) + "_wavelengths_travel",
          travel == expected * lambda / 2.0, {{"displacement_m", travel}});
  }

  // Stepper: argmax of the normalised 1 s spectrum at the step rate.
  for (const double rate : {500.0, 1000.0}) {
    ScenarioSpec spec;
    spec.kind = ScenarioKind::stepper;
    spec.duration_s = 1.5;
    spec.stepper.steps_per_s = rate;
    spec.offset_m = lambda / 8.0;
    spec.seed = derive_seed(c.seed, static_cast<std::uint64_t>(rate));
    const auto ch = laser_channel(generate(spec), c.laser, c.readout,
                                  derive_seed(c.seed, Stream::laser_electronic));
    const auto s = spectrum(ch.trace, 0.25, 1.0);
    const std::string tag = "stepper_" + format_double(rate);
    write_spectrum(w, tag + "_spectrum.csv", s);
    const bool pass = !s.degenerate && std::abs(s.peak_freq_hz() - rate) <= s.resolution_hz();
    check(tag, pass, {{"expected_hz", rate}, {"peak_freq_hz", s.peak_freq_hz()},
                      {"resolution_hz", s.resolution_hz()}});
  }

  r.report["checks"] = std::move(checks);
  r.report["pass"] = ok;
  r.exit_code = ok ? 0 : 1;
  w.json("validate.json", r.report);
  return r;
}

}  // namespace

std::string_view to_string(Subcommand s) {
  switch (s) {
    case Subcommand::simulate: return "simulate";
    case Subcommand::analyze: return "analyze";
    case Subcommand::spectrum: return "spectrum";
    case Subcommand::fringes: return "fringes";
    case Subcommand::decision_map: return "decision_map";
    case Subcommand::validate: return "validate";
  }
  return "?";
}

Subcommand subcommand_from_string(std::string_view s) {
  if (s == "decision-map") return Subcommand::decision_map;
  for (auto c : {Subcommand::simulate, Subcommand::analyze, Subcommand::spectrum,
                 Subcommand::fringes, Subcommand::decision_map, Subcommand::validate}) {
    if (to_string(c) == s) return c;
  }
  throw InvalidArgument("unknown subcommand '" + std::string(s) + "'");
}

Channels build_channels(const RunConfig& c) {
  c.validate();
  auto spec = c.scenario;
  spec.seed = c.scenario_seed();
  spec.offset_m = 0.0;
  const auto vib = generate(spec);

  std::vector<double> d = vib.values();
  for (auto& x : d) x += c.scenario.offset_m;
  if (c.laser.acoustic_coupling_m > 0.0) {
    const auto amb = gaussian_noise(d.size(), c.laser.acoustic_coupling_m * ambient_scale(c.anl_db),
                                    derive_seed(c.seed, Stream::laser_ambient));
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += amb[i];
  }
  Channels ch;
  ch.displacement = SampleTrace(vib.sample_rate_hz(), Unit::meters, std::move(d));
  ch.laser = laser_channel(ch.displacement, c.laser, c.readout,
                           derive_seed(c.seed, Stream::laser_electronic));
  ch.mic = mic_channel(decimate(vib, c.mic_rate_hz, true), c.anl_db, c.mic, c.seed);
  return ch;
}

ChannelAnalysis analyze_channel(const SampleTrace& trace, const AnalysisConfig& a,
                                bool peak_based) {
  ChannelAnalysis out;
  const auto rest = trace.range_s(a.rest_start_s, a.rest_end_s);
  const auto window = static_cast<std::size_t>(std::llround(a.noise_window_s * trace.sample_rate_hz()));
  out.noise = worst_case_noise(trace, rest, window);
  const auto signal = trace.range_s(a.signal_start_s, a.signal_end_s);
  if (peak_based) {
    const auto sep =
        static_cast<std::size_t>(std::llround(a.peak_min_separation_s * trace.sample_rate_hz()));
    const auto peaks = find_peaks(trace, a.peak_count, std::max<std::size_t>(1, sep), signal);
    out.snr = peak_snr(trace, peaks, out.noise);
  } else {
    std::vector<IndexRange> exclude;
    for (const auto& [b, e] : a.exclusion_windows) exclude.push_back(trace.range_s(b, e));
    out.snr = snr_db(trace, signal, out.noise, exclude);
  }
  out.events = detect_events(normalize(trace, out.noise), a.events);
  return out;
}

PipelineResult run_pipeline(const RunConfig& config, Subcommand sub,
                            const PipelineOptions& options) {
  config.validate();
  switch (sub) {
    case Subcommand::simulate: return do_simulate(config, options);
    case Subcommand::analyze: return do_analyze(config, options);
    case Subcommand::spectrum: return do_spectrum(config, options);
    case Subcommand::fringes: return do_fringes(config, options);
    case Subcommand::decision_map: return do_decision_map(config, options);
    case Subcommand::validate: return do_validate(config, options);
  }
  throw InvalidArgument("unknown subcommand");
}

}  // namespace smi
