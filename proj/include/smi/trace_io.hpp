#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "smi/error.hpp"
#include "smi/trace.hpp"

namespace smi {

enum class TraceFormat { csv, wav16 };

TraceFormat trace_format_from_path(const std::filesystem::path& path);

class TraceFormatError : public IoError {
 public:
  enum class Kind {
    malformed_header,
    inconsistent_timestep,
    unsupported_wav_encoding,
    malformed_data,
    missing_rate,
  };
  TraceFormatError(Kind kind, const std::string& what) : IoError(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(TraceFormatError::Kind kind);

// Header carried by CSV traces. `created` is the only field that may differ
// between otherwise identical runs; it is omitted unless set.
struct TraceHeader {
  int version = 1;
  std::string channel = "signal";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> created;
};

struct TraceFile {
  TraceHeader header;
  SampleTrace trace;
};

struct WriteReport {
  std::size_t clipped = 0;  // WAV samples outside [-1, 1)
};

// CSV: '#'-prefixed header lines, a "time_s,value" row, then one sample per
// line. Without a sample_rate_hz header line the rate is inferred from the
// time column. WAV: RIFF, PCM, 16-bit, mono; values map to [-1, 1).
TraceFile read_trace_file(const std::filesystem::path& path, TraceFormat format);
SampleTrace read_trace(const std::filesystem::path& path, TraceFormat format);

WriteReport write_trace(const SampleTrace& trace, const std::filesystem::path& path,
                        TraceFormat format, const TraceHeader& header = {});

// In-memory CSV codec, used by the file functions.
std::string encode_trace_csv(const SampleTrace& trace, const TraceHeader& header = {});
TraceFile decode_trace_csv(std::string_view text);

}  // namespace smi
