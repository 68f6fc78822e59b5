#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "smi/pipeline.hpp"
#include "smi/trace_io.hpp"

using namespace smi;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("smi_pipe_" + std::to_string(std::random_device{}()));
  }
  ~TempDir() { fs::remove_all(path); }
};

RunConfig load(const char* rel) {
  return load_run_config(std::string(SMI_SOURCE_DIR) + "/configs/" + rel);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("subcommand names") {
  for (auto s : {Subcommand::simulate, Subcommand::analyze, Subcommand::spectrum,
                 Subcommand::fringes, Subcommand::decision_map, Subcommand::validate}) {
    CHECK(subcommand_from_string(to_string(s)) == s);
  }
  CHECK(subcommand_from_string("decision-map") == Subcommand::decision_map);
  CHECK_THROWS_AS(subcommand_from_string("explode"), InvalidArgument);
}

TEST_CASE("ambient level touches only the microphone") {
  auto c = load("pencil57.cfg");
  const auto quiet = build_channels(c);
  c.anl_db = 82.0;
  const auto loud = build_channels(c);
  CHECK(quiet.laser.trace == loud.laser.trace);
  CHECK(quiet.displacement == loud.displacement);
  CHECK(oracle::rms(loud.mic.values()) > oracle::rms(quiet.mic.values()));
  CHECK(quiet.mic.sample_rate_hz() == c.mic_rate_hz);
  CHECK(quiet.laser.trace.sample_rate_hz() == c.readout.adc_rate_hz);
}

TEST_CASE("acoustic coupling knob feeds ambient noise into the laser path") {
  auto c = load("pencil57.cfg");
  c.laser.acoustic_coupling_m = 1e-10;
  const auto a = build_channels(c);
  c.anl_db = 82.0;
  const auto b = build_channels(c);
  CHECK_FALSE(a.laser.trace == b.laser.trace);
}

TEST_CASE("cable scenario: laser beats the microphone") {
  TempDir dir;
  PipelineOptions o;
  o.out_dir = dir.path;
  const auto r = run_pipeline(load("cable.cfg"), Subcommand::analyze, o);
  CHECK(r.exit_code == 0);
  CHECK(r.report["laser"]["snr_db"].get<double>() > r.report["mic"]["snr_db"].get<double>());
  CHECK(r.report["record"]["winner"] == "laser");
  CHECK(fs::exists(dir.path / "analyze.json"));
  CHECK(fs::exists(dir.path / "record.csv"));
  const auto rec = parse_records_csv(slurp(dir.path / "record.csv"));
  REQUIRE(rec.size() == 1);
  CHECK(rec[0].diff_db < 0.0);
}

TEST_CASE("slip burst shows up as one event on the laser channel") {
  TempDir dir;
  PipelineOptions o;
  o.out_dir = dir.path;
  const auto r = run_pipeline(load("pencil57.cfg"), Subcommand::analyze, o);
  const auto& ev = r.report["laser"]["events"];
  REQUIRE(ev.size() == 1);
  CHECK(ev[0]["start_s"].get<double>() == doctest::Approx(1.0).epsilon(0.05));
  CHECK(ev[0]["end_s"].get<double>() == doctest::Approx(1.5).epsilon(0.05));
}

TEST_CASE("impulse scenario uses peak-based SNR and finds every tap") {
  TempDir dir;
  PipelineOptions o;
  o.out_dir = dir.path;
  const auto r = run_pipeline(load("box.cfg"), Subcommand::analyze, o);
  CHECK(r.report["laser"]["method"] == "peak_based");
  CHECK(r.report["laser"]["events"].size() == 10);
  CHECK(r.report["mic"]["events"].size() == 10);
}

TEST_CASE("simulated traces re-analyse identically from disk") {
  TempDir dir;
  const auto c = load("pencil57.cfg");
  PipelineOptions o;
  o.out_dir = dir.path / "sim";
  const auto sim = run_pipeline(c, Subcommand::simulate, o);
  CHECK(fs::exists(dir.path / "sim" / "laser.csv"));
  CHECK(fs::exists(dir.path / "sim" / "mic.csv"));
  CHECK(fs::exists(dir.path / "sim" / "config.cfg"));
  CHECK(parse_run_config(slurp(dir.path / "sim" / "config.cfg")).seed == c.seed);

  o.out_dir = dir.path / "direct";
  const auto direct = run_pipeline(c, Subcommand::analyze, o);
  o.out_dir = dir.path / "files";
  o.input = dir.path / "sim" / "laser.csv";
  o.mic_input = dir.path / "sim" / "mic.csv";
  const auto files = run_pipeline(c, Subcommand::analyze, o);
  CHECK(files.report["laser"]["snr_db"] == direct.report["laser"]["snr_db"]);
  CHECK(files.report["mic"]["snr_db"] == direct.report["mic"]["snr_db"]);
  CHECK(files.report["record"] == direct.report["record"]);
}

TEST_CASE("spectrum and fringes subcommands") {
  TempDir dir;
  PipelineOptions o;
  o.out_dir = dir.path;
  const auto s = run_pipeline(load("stepper.cfg"), Subcommand::spectrum, o);
  CHECK(s.report["laser"]["peak_freq_hz"].get<double>() == doctest::Approx(500.0).epsilon(0.002));
  CHECK(fs::exists(dir.path / "laser_spectrum.csv"));
  CHECK(fs::exists(dir.path / "mic_spectrum.csv"));

  const auto f = run_pipeline(load("speaker.cfg"), Subcommand::fringes, o);
  CHECK(f.report["fringe_count"] == 6);
  CHECK(f.report["displacement_m"].get<double>() == 1.95e-6);
}

TEST_CASE("decision map from the built-in fixture and from a records file") {
  TempDir dir;
  PipelineOptions o;
  o.out_dir = dir.path / "fixture";
  const auto r = run_pipeline(RunConfig{}, Subcommand::decision_map, o);
  CHECK(r.report["points"].size() == 9);
  CHECK(fs::exists(dir.path / "fixture" / "decision_map.svg"));
  const auto csv = slurp(dir.path / "fixture" / "decision_map.csv");
  CHECK(parse_map_csv(csv).points.size() == 9);

  o.out_dir = dir.path / "file";
  o.records = std::string(SMI_SOURCE_DIR) + "/data/reference_experiments.csv";
  CHECK_THROWS_AS(run_pipeline(RunConfig{}, Subcommand::decision_map, o), MissingBaseline);
  o.allow_missing_baseline = true;
  run_pipeline(RunConfig{}, Subcommand::decision_map, o);
  CHECK(slurp(dir.path / "file" / "decision_map.csv") == csv);
}

TEST_CASE("validate passes and is deterministic") {
  TempDir dir;
  PipelineOptions o;
  o.out_dir = dir.path / "a";
  const auto a = run_pipeline(RunConfig{}, Subcommand::validate, o);
  CHECK(a.exit_code == 0);
  CHECK(a.report["pass"] == true);
  o.out_dir = dir.path / "b";
  const auto b = run_pipeline(RunConfig{}, Subcommand::validate, o);
  REQUIRE(a.artifacts.size() == b.artifacts.size());
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
    CHECK(a.artifacts[i].filename() == b.artifacts[i].filename());
    CHECK(slurp(a.artifacts[i]) == slurp(b.artifacts[i]));
  }
}

TEST_CASE("validate reports failed checks through the exit code") {
  TempDir dir;
  PipelineOptions o;
  o.out_dir = dir.path;
  RunConfig c;
  c.analysis.fringes.k = 1e6;  // hysteresis band too wide to see any fringe
  const auto r = run_pipeline(c, Subcommand::validate, o);
  CHECK(r.exit_code == 1);
  CHECK(r.report["pass"] == false);
}

TEST_CASE("unwritable output directory is an I/O error") {
  PipelineOptions o;
  o.out_dir = "/proc/smi-cannot-create";
  CHECK_THROWS_AS(run_pipeline(RunConfig{}, Subcommand::validate, o), IoError);
}
