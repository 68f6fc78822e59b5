// smitool: command-line front end for the SMI simulation and analysis pipeline.
//
// Exit codes: 0 success, 1 a check failed, 2 usage or config error, 3 I/O error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "smi/config.hpp"
#include "smi/error.hpp"
#include "smi/pipeline.hpp"
#include "smi/trace_io.hpp"

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

int diagnose(int code, const std::string& kind, const std::string& message) {
  nlohmann::ordered_json d = {{"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << d.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SMI tactile sensing simulator and analysis toolkit", "smitool"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::string input, mic_input, records;
  bool allow_missing = false;
  bool quiet = false;

  app.add_option("-c,--config", config_path, "Run configuration file");
  app.add_option("-o,--out", out_dir, "Output directory")->envname("SMITOOL_OUT_DIR");
  app.add_option("-s,--seed", seed, "Override [run] seed");
  app.add_flag("-q,--quiet", quiet, "Do not print the report");

  struct Cmd {
    const char* name;
    const char* help;
  };
  const Cmd cmds[] = {
      {"simulate", "Write the laser and microphone channel traces"},
      {"analyze", "Noise floor, SNR and events for each channel"},
      {"spectrum", "Normalised magnitude spectrum of each channel"},
      {"fringes", "Count fringes in the photocurrent"},
      {"decision-map", "Build the technology decision map"},
      {"validate", "Run the speaker and stepper validation checks"},
  };
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    if (std::string(c.name) == "decision-map") sub->alias("decision_map");
    if (std::string(c.name) == "analyze" || std::string(c.name) == "spectrum" ||
        std::string(c.name) == "fringes") {
      sub->add_option("-i,--input", input, "Recorded laser trace (.csv or .wav)");
    }
    if (std::string(c.name) == "analyze" || std::string(c.name) == "spectrum") {
      sub->add_option("--mic-input", mic_input, "Recorded microphone trace (.csv or .wav)");
    }
    if (std::string(c.name) == "decision-map") {
      sub->add_option("-r,--records", records, "Experiment records CSV");
      sub->add_flag("--allow-missing-baseline", allow_missing,
                    "Families without a baseline record get an empty vertical coordinate");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << "\n";
    return diagnose(kExitUsage, "usage", e.what());
  }

  try {
    const auto* chosen = app.get_subcommands().front();
    const auto sub = smi::subcommand_from_string(chosen->get_name());
    smi::RunConfig cfg = config_path.empty() ? smi::parse_run_config("")
                                             : smi::load_run_config(config_path);
    if (seed) cfg.seed = *seed;

    smi::PipelineOptions opts;
    opts.out_dir = out_dir;
    if (!input.empty()) opts.input = input;
    if (!mic_input.empty()) opts.mic_input = mic_input;
    if (!records.empty()) opts.records = records;
    opts.allow_missing_baseline = allow_missing;

    const auto result = smi::run_pipeline(cfg, sub, opts);
    if (!quiet) std::cout << result.report.dump(2) << "\n";
    if (result.exit_code != 0) {
      return diagnose(kExitCheckFailed, "check_failed", "one or more checks failed, see report");
    }
    return 0;
  } catch (const smi::TraceFormatError& e) {
    return diagnose(kExitIo, std::string("trace_format:") + std::string(smi::to_string(e.kind())),
                    e.what());
  } catch (const smi::IoError& e) {
    return diagnose(kExitIo, "io", e.what());
  } catch (const smi::InvalidConfig& e) {
    return diagnose(kExitUsage, "config", e.what());
  } catch (const smi::InvalidArgument& e) {
    return diagnose(kExitUsage, "invalid_argument", e.what());
  } catch (const smi::ConvergenceError& e) {
    return diagnose(kExitCheckFailed, "convergence", e.what());
  } catch (const smi::DegenerateInput& e) {
    return diagnose(kExitCheckFailed, "degenerate_input", e.what());
  } catch (const smi::Error& e) {
    return diagnose(kExitCheckFailed, "error", e.what());
  }
}
