#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smi {

enum class Unit { meters, amps, volts, dimensionless, pressure };

std::string_view to_string(Unit unit);
Unit unit_from_string(std::string_view name);  // throws InvalidArgument

// Half-open sample range [begin, end).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > begin ? end - begin : 0; }
  bool empty() const { return end <= begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

// Uniformly sampled waveform. Samples are finite and the rate is positive;
// the constructor enforces both.
class SampleTrace {
 public:
  SampleTrace() = default;
  SampleTrace(double sample_rate_hz, Unit unit, std::vector<double> samples);

  double sample_rate_hz() const { return rate_; }
  Unit unit() const { return unit_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  std::span<const double> samples() const { return samples_; }
  const std::vector<double>& values() const { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }

  double duration_s() const { return static_cast<double>(samples_.size()) / rate_; }
  std::size_t index_at(double t_s) const;  // clamped to [0, size]
  IndexRange range_s(double begin_s, double end_s) const;

  std::span<const double> view(IndexRange r) const;

  friend bool operator==(const SampleTrace&, const SampleTrace&) = default;

 private:
  double rate_ = 1.0;
  Unit unit_ = Unit::dimensionless;
  std::vector<double> samples_;
};

void require_in_bounds(const SampleTrace& trace, IndexRange r, const char* what);

}  // namespace smi
