#include "smi/trace.hpp"

#include <cmath>
#include <string>

#include "smi/error.hpp"

namespace smi {

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::meters: return "meters";
    case Unit::amps: return "amps";
    case Unit::volts: return "volts";
    case Unit::dimensionless: return "dimensionless";
    case Unit::pressure: return "pressure";
  }
  return "dimensionless";
}

Unit unit_from_string(std::string_view name) {
  for (Unit u : {Unit::meters, Unit::amps, Unit::volts, Unit::dimensionless, Unit::pressure}) {
    if (to_string(u) == name) return u;
  }
  throw InvalidArgument("unknown unit '" + std::string(name) + "'");
}

SampleTrace::SampleTrace(double sample_rate_hz, Unit unit, std::vector<double> samples)
    : rate_(sample_rate_hz), unit_(unit), samples_(std::move(samples)) {
  if (!(rate_ > 0.0) || !std::isfinite(rate_)) {
    throw InvalidArgument("sample rate must be positive and finite");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw InvalidArgument("non-finite sample at index " + std::to_string(i));
    }
  }
}

std::size_t SampleTrace::index_at(double t_s) const {
  if (!(t_s > 0.0)) return 0;
  const double idx = std::round(t_s * rate_);
  if (idx >= static_cast<double>(samples_.size())) return samples_.size();
  return static_cast<std::size_t>(idx);
}

IndexRange SampleTrace::range_s(double begin_s, double end_s) const {
  return {index_at(begin_s), index_at(end_s)};
}

std::span<const double> SampleTrace::view(IndexRange r) const {
  require_in_bounds(*this, r, "view");
  return std::span<const double>(samples_).subspan(r.begin, r.size());
}

void require_in_bounds(const SampleTrace& trace, IndexRange r, const char* what) {
  if (r.end < r.begin || r.end > trace.size()) {
    throw InvalidArgument(std::string(what) + ": window [" + std::to_string(r.begin) + ", " +
                          std::to_string(r.end) + ") outside trace of length " +
                          std::to_string(trace.size()));
  }
}

}  // namespace smi
