#include "smi/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "smi/format.hpp"

namespace smi {
namespace {

using Kind = TraceFormatError::Kind;

constexpr std::string_view kMagic = "smi-trace";
constexpr double kJitterTolerance = 1e-6;

std::string read_all(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

void write_all(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f.flush()) throw IoError("failed writing '" + path.string() + "'");
}

double step_rate(double rate) {
  // Snap inferred rates that are integral to within the jitter tolerance.
  const double r = std::round(rate);
  return std::abs(rate - r) <= kJitterTolerance * rate ? r : rate;
}

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
  }
}

template <typename T>
T get_le(std::string_view bytes, std::size_t at) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
  }
  return static_cast<T>(v);
}

SampleTrace decode_wav(std::string_view b) {
  if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE") {
    throw TraceFormatError(Kind::malformed_header, "not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const auto id = b.substr(pos, 4);
    const auto size = get_le<std::uint32_t>(b, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > b.size()) throw TraceFormatError(Kind::malformed_header, "truncated WAV chunk");
    if (id == "fmt ") {
      if (size < 16) throw TraceFormatError(Kind::malformed_header, "short fmt chunk");
      const auto format = get_le<std::uint16_t>(b, body);
      const auto channels = get_le<std::uint16_t>(b, body + 2);
      rate = get_le<std::uint32_t>(b, body + 4);
      const auto bits = get_le<std::uint16_t>(b, body + 14);
      if (format != 1 || channels != 1 || bits != 16) {
        throw TraceFormatError(Kind::unsupported_wav_encoding,
                               "only 16-bit PCM mono WAV is supported (format " +
                                   std::to_string(format) + ", " + std::to_string(channels) +
                                   " channels, " + std::to_string(bits) + " bits)");
      }
      if (rate == 0) throw TraceFormatError(Kind::missing_rate, "WAV sample rate is zero");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw TraceFormatError(Kind::malformed_header, "data chunk before fmt chunk");
      std::vector<double> v(size / 2);
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = static_cast<double>(get_le<std::int16_t>(b, body + 2 * i)) / 32768.0;
      }
      return SampleTrace(rate, Unit::dimensionless, std::move(v));
    }
    pos = body + size + (size & 1u);
  }
  throw TraceFormatError(Kind::malformed_header, "WAV file has no data chunk");
}

std::string encode_wav(const SampleTrace& trace, WriteReport& report) {
  const double rate = trace.sample_rate_hz();
  if (rate != std::round(rate) || rate > 4294967295.0) {
    throw InvalidArgument("WAV needs an integral sample rate, got " + format_double(rate));
  }
  const auto r = static_cast<std::uint32_t>(rate);
  const auto data_bytes = static_cast<std::uint32_t>(trace.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_le<std::uint32_t>(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_le<std::uint32_t>(out, 16);
  put_le<std::uint16_t>(out, 1);
  put_le<std::uint16_t>(out, 1);
  put_le<std::uint32_t>(out, r);
  put_le<std::uint32_t>(out, r * 2);
  put_le<std::uint16_t>(out, 2);
  put_le<std::uint16_t>(out, 16);
  out += "data";
  put_le<std::uint32_t>(out, data_bytes);
  for (double v : trace.samples()) {
    double code = std::nearbyint(v * 32768.0);
    if (code > 32767.0 || code < -32768.0) {
      ++report.clipped;
      code = std::clamp(code, -32768.0, 32767.0);
    }
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(code)));
  }
  return out;
}

}  // namespace

std::string_view to_string(TraceFormatError::Kind kind) {
  switch (kind) {
    case Kind::malformed_header: return "malformed_header";
    case Kind::inconsistent_timestep: return "inconsistent_timestep";
    case Kind::unsupported_wav_encoding: return "unsupported_wav_encoding";
    case Kind::malformed_data: return "malformed_data";
    case Kind::missing_rate: return "missing_rate";
  }
  return "malformed_data";
}

TraceFormat trace_format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".wav" ? TraceFormat::wav16 : TraceFormat::csv;
}

std::string encode_trace_csv(const SampleTrace& trace, const TraceHeader& header) {
  std::string out;
  out += "# " + std::string(kMagic) + " v" + std::to_string(header.version) + '\n';
  out += "# sample_rate_hz: " + format_double(trace.sample_rate_hz()) + '\n';
  out += "# unit: " + std::string(to_string(trace.unit())) + '\n';
  out += "# channel: " + header.channel + '\n';
  if (header.seed) out += "# seed: " + std::to_string(*header.seed) + '\n';
  if (header.created) out += "# created: " + *header.created + '\n';
  out += "time_s,value\n";
  const double rate = trace.sample_rate_hz();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += format_double(static_cast<double>(i) / rate);
    out += ',';
    out += format_double(trace[i]);
    out += '\n';
  }
  return out;
}

TraceFile decode_trace_csv(std::string_view text) {
  TraceFile file;
  std::optional<double> rate;
  Unit unit = Unit::dimensionless;
  bool have_columns = false;
  std::vector<double> times;
  std::vector<double> values;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(start, nl - start));
    start = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '#') {
      if (have_columns) throw TraceFormatError(Kind::malformed_header, where + "header after data");
      const auto body = trim(line.substr(1));
      if (body.starts_with(kMagic)) {
        const auto v = trim(body.substr(kMagic.size()));
        if (!v.starts_with("v")) throw TraceFormatError(Kind::malformed_header, where + "bad version");
        try {
          file.header.version = static_cast<int>(parse_int(v.substr(1)));
        } catch (const InvalidArgument&) {
          throw TraceFormatError(Kind::malformed_header, where + "bad version");
        }
        if (file.header.version != 1) {
          throw TraceFormatError(Kind::malformed_header, where + "unsupported trace version");
        }
        continue;
      }
      const auto colon = body.find(':');
      if (colon == std::string_view::npos) continue;  // free-form comment
      const auto key = trim(body.substr(0, colon));
      const auto value = trim(body.substr(colon + 1));
      try {
        if (key == "sample_rate_hz") {
          rate = parse_double(value);
          if (!(*rate > 0.0) || !std::isfinite(*rate)) throw InvalidArgument("rate");
        } else if (key == "unit") {
          unit = unit_from_string(value);
        } else if (key == "channel") {
          file.header.channel = std::string(value);
        } else if (key == "seed") {
          std::uint64_t seed = 0;
          const auto res = std::from_chars(value.data(), value.data() + value.size(), seed);
          if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
            throw InvalidArgument("seed");
          }
          file.header.seed = seed;
        } else if (key == "created") {
          file.header.created = std::string(value);
        }
      } catch (const InvalidArgument&) {
        throw TraceFormatError(Kind::malformed_header,
                               where + "bad value for '" + std::string(key) + "'");
      }
      continue;
    }
    if (!have_columns) {
      if (line != "time_s,value") {
        throw TraceFormatError(Kind::malformed_header, where + "expected column row 'time_s,value'");
      }
      have_columns = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw TraceFormatError(Kind::malformed_data, where + "expected two columns");
    }
    try {
      times.push_back(parse_double(line.substr(0, comma)));
      values.push_back(parse_double(line.substr(comma + 1)));
    } catch (const InvalidArgument& e) {
      throw TraceFormatError(Kind::malformed_data, where + e.what());
    }
    if (!std::isfinite(times.back()) || !std::isfinite(values.back())) {
      throw TraceFormatError(Kind::malformed_data, where + "non-finite value");
    }
  }
  if (!have_columns) throw TraceFormatError(Kind::malformed_header, "missing 'time_s,value' row");

  if (!rate) {
    if (times.size() < 2 || !(times.back() > times.front())) {
      throw TraceFormatError(Kind::missing_rate,
                             "no sample_rate_hz header and too few samples to infer one");
    }
    rate = step_rate(static_cast<double>(times.size() - 1) / (times.back() - times.front()));
  }
  const double step = 1.0 / *rate;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double dt = times[i] - times[i - 1];
    if (std::abs(dt - step) > kJitterTolerance * step) {
      throw TraceFormatError(Kind::inconsistent_timestep,
                             "timestep at sample " + std::to_string(i) + " is " +
                                 format_double(dt) + " s, expected " + format_double(step) + " s");
    }
  }
  file.trace = SampleTrace(*rate, unit, std::move(values));
  return file;
}

TraceFile read_trace_file(const std::filesystem::path& path, TraceFormat format) {
  const auto bytes = read_all(path);
  if (format == TraceFormat::wav16) return {TraceHeader{}, decode_wav(bytes)};
  return decode_trace_csv(bytes);
}

SampleTrace read_trace(const std::filesystem::path& path, TraceFormat format) {
  return read_trace_file(path, format).trace;
}

WriteReport write_trace(const SampleTrace& trace, const std::filesystem::path& path,
                        TraceFormat format, const TraceHeader& header) {
  WriteReport report;
  if (format == TraceFormat::wav16) {
    write_all(path, encode_wav(trace, report));
  } else {
    write_all(path, encode_trace_csv(trace, header));
  }
  return report;
}

}  // namespace smi
