#include <doctest.h>

#include <filesystem>

#include "smi/config.hpp"

using namespace smi;

namespace {

std::string source_path(const char* rel) { return std::string(SMI_SOURCE_DIR) + "/" + rel; }

}  // namespace

TEST_CASE("empty text gives defaults") {
  const auto c = parse_run_config("");
  CHECK(c.laser == LaserConfig{});
  CHECK(c.readout == ReadoutConfig{});
  CHECK(c.mic == MicModel{});
  CHECK(c.seed == 42);
  CHECK(c.anl_db == 57.0);
  CHECK(c.explicit_keys.empty());
  CHECK_FALSE(c.scenario_seed_set);
}

TEST_CASE("sections, comments, lists and strings") {
  const auto c = parse_run_config(R"(
# leading comment
[run]
name = "with # hash"   # trailing comment
seed = 7

[laser]
feedback_c = 0.3
alpha = 3

[readout]
adc_bits = 16

[scenario]
kind = "impulse_train"
duration_s = 2.5
anl_db = 82
seed = 99

[scenario.impulse_train]
peaks_m = [1e-9, 2e-9, 3e-9]
spacing_s = 0.2

[analysis]
exclusion_windows = [[0.0, 0.1], [1.9, 2.0]]
event_kind = "impulse"
peak_count = 3
)");
  CHECK(c.name == "with # hash");
  CHECK(c.seed == 7);
  CHECK(c.laser.feedback_c == 0.3);
  CHECK(c.laser.alpha == 3.0);
  CHECK(c.readout.adc_bits == 16);
  CHECK(c.scenario.kind == ScenarioKind::impulse_train);
  CHECK(c.scenario.duration_s == 2.5);
  CHECK(c.anl_db == 82.0);
  CHECK(c.scenario_seed_set);
  CHECK(c.scenario_seed() == 99);
  CHECK(c.scenario.impulses.peaks_m == std::vector<double>{1e-9, 2e-9, 3e-9});
  CHECK(c.scenario.impulses.spacing_s == 0.2);
  REQUIRE(c.analysis.exclusion_windows.size() == 2);
  CHECK(c.analysis.exclusion_windows[1] == std::pair<double, double>{1.9, 2.0});
  CHECK(c.analysis.events.kind == EventKind::impulse);
  CHECK(c.analysis.peak_count == 3);
  CHECK(c.explicit_keys.contains("laser.feedback_c"));
  CHECK_FALSE(c.explicit_keys.contains("laser.mod_depth"));
}

TEST_CASE("derived scenario seed") {
  const auto a = parse_run_config("[run]\nseed = 1\n");
  const auto b = parse_run_config("[run]\nseed = 2\n");
  CHECK(a.scenario_seed() != b.scenario_seed());
  CHECK(a.scenario_seed() == parse_run_config("[run]\nseed = 1\n").scenario_seed());
}

TEST_CASE("strict parsing") {
  CHECK_THROWS_AS(parse_run_config("[laser]\nfeedback = 0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[lazer]\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("seed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[run]\nseed = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[run]\nseed = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[run]\nname = bare\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[laser]\nalpha = \"4.6\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[laser]\nalpha = 4.6\nalpha = 4.7\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[laser]\nalpha\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[laser\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[laser]\nalpha = nan\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[laser]\nalpha = 4.6 extra\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[analysis]\nexclusion_windows = [[1, 2, 3]]\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[analysis]\nexclusion_windows = [[1, 2]\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[scenario]\nkind = \"tornado\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[analysis]\nevent_kind = \"slap\"\n"), ConfigError);
}

TEST_CASE("semantic validation") {
  CHECK_THROWS_AS(parse_run_config("[laser]\nfeedback_c = 1.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[readout]\nhp_cutoff_hz = 4000\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[mic]\nrate_hz = 7000\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[analysis]\nrest_start_s = 1\nrest_end_s = 0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[analysis]\nnoise_window_s = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[analysis]\nexclusion_windows = [[2, 1]]\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[scenario]\nduration_s = 0\n"), ConfigError);
}

TEST_CASE("canonical text round-trips") {
  auto c = parse_run_config(R"(
[run]
name = "q\"uote"
seed = 123
[laser]
feedback_c = 0.123456789012345
[scenario]
kind = "slip_burst"
duration_s = 2
seed = 5
[analysis]
exclusion_windows = [[0.1, 0.2]]
)");
  const auto text = to_text(c);
  const auto back = parse_run_config(text);
  CHECK(to_text(back) == text);
  CHECK(back.name == c.name);
  CHECK(back.seed == c.seed);
  CHECK(back.laser == c.laser);
  CHECK(back.readout == c.readout);
  CHECK(back.mic == c.mic);
  CHECK(back.scenario.kind == c.scenario.kind);
  CHECK(back.scenario.duration_s == c.scenario.duration_s);
  CHECK(back.scenario_seed() == c.scenario_seed());
  CHECK(back.analysis.exclusion_windows == c.analysis.exclusion_windows);
  CHECK(back.scenario.impulses.peaks_m == c.scenario.impulses.peaks_m);
}

TEST_CASE("shipped configs parse") {
  for (const char* f : {"configs/pencil57.cfg", "configs/pencil82.cfg", "configs/cable.cfg",
                        "configs/box.cfg", "configs/stepper.cfg", "configs/speaker.cfg"}) {
    CAPTURE(f);
    CHECK_NOTHROW(load_run_config(source_path(f)));
  }
  CHECK_THROWS_AS(load_run_config("/nonexistent/file.cfg"), IoError);
}
