#include "smi/smi_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "smi/error.hpp"

namespace smi {
namespace {

constexpr int kMaxIterations = 200;
constexpr double kResidualTol = 1e-12;

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), mid));
  }
  return m;
}

struct Lobe {
  int sign = 0;
  std::size_t peak = 0;  // index into the difference sequence
  double magnitude = 0.0;
};

}  // namespace

void LaserConfig::validate() const {
  auto fail = [](const std::string& m) { throw InvalidConfig("laser: " + m); };
  if (!(wavelength_m > 0.0) || !std::isfinite(wavelength_m)) fail("wavelength_m must be > 0");
  if (!(feedback_c >= 0.0 && feedback_c < 1.0)) fail("feedback_c must be in [0, 1)");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail("alpha must be >= 0");
  if (!(mod_depth > 0.0 && mod_depth <= 1.0)) fail("mod_depth must be in (0, 1]");
  if (!(dc_power > 0.0) || !std::isfinite(dc_power)) fail("dc_power must be > 0");
  if (!(acoustic_coupling_m >= 0.0) || !std::isfinite(acoustic_coupling_m)) {
    fail("acoustic_coupling_m must be >= 0");
  }
}

double solve_excess_phase(double phi0, const LaserConfig& laser) {
  if (!(laser.feedback_c < 1.0)) {
    throw InvalidConfig("solve_excess_phase: feedback_c must be < 1 for a unique root");
  }
  const double c = laser.feedback_c;
  if (c == 0.0) return phi0;
  const double theta = std::atan(laser.alpha);
  auto f = [&](double x) { return x + c * std::sin(x + theta) - phi0; };

  // f is strictly increasing (f' >= 1 - C > 0) and changes sign on the bracket.
  double lo = phi0 - c;
  double hi = phi0 + c;
  double x = phi0;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double fx = f(x);
    if (std::abs(fx) <= kResidualTol) return x;
    if (fx > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double dfx = 1.0 + c * std::cos(x + theta);
    double next = x - fx / dfx;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      return next;
    }
    x = next;
  }
  throw ConvergenceError("excess-phase solver did not converge for phi0 = " +
                             std::to_string(phi0),
                         0);
}

double smi_photocurrent(double phase, const LaserConfig& laser) {
  return laser.dc_power * (1.0 + laser.mod_depth * std::cos(phase));
}

double round_trip_phase(double displacement_m, const LaserConfig& laser) {
  return 4.0 * std::numbers::pi * displacement_m / laser.wavelength_m;
}

SampleTrace simulate_smi(const SampleTrace& displacement, const LaserConfig& laser) {
  if (displacement.unit() != Unit::meters) {
    throw InvalidArgument("simulate_smi: displacement must be in meters");
  }
  laser.validate();
  std::vector<double> out(displacement.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double phase;
    try {
      phase = solve_excess_phase(round_trip_phase(displacement[i], laser), laser);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " at sample " + std::to_string(i), i);
    }
    out[i] = smi_photocurrent(phase, laser);
  }
  return SampleTrace(displacement.sample_rate_hz(), Unit::amps, std::move(out));
}

FringeReport count_fringes(const SampleTrace& signal, IndexRange window,
                           const FringeDetectorParams& detector) {
  if (window.empty()) throw InvalidArgument("count_fringes: empty window");
  require_in_bounds(signal, window, "count_fringes");
  if (signal.size() < 3) throw InvalidArgument("count_fringes: signal shorter than 3 samples");

  FringeReport report;
  report.window = window;
  const auto x = signal.view(window);
  if (x.size() < 3) return report;

  std::vector<double> d(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) d[i] = x[i + 1] - x[i];

  // For white noise the second difference has sqrt(3) times the spread of the
  // first; MAD / 0.6745 turns the median deviation into a sigma.
  std::vector<double> dd(d.size() - 1);
  for (std::size_t i = 0; i + 1 < d.size(); ++i) dd[i] = d[i + 1] - d[i];
  const double med = median_of(dd);
  for (auto& v : dd) v = std::abs(v - med);
  const double noise_scale = 1.4826 * median_of(std::move(dd)) / std::sqrt(3.0);
  const double band = detector.k * noise_scale;

  std::vector<Lobe> lobes;
  int state = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int s = d[i] > band ? 1 : (d[i] < -band ? -1 : 0);
    const double mag = std::abs(d[i]);
    // A lobe ends once the difference changes sign; a new one of either sign
    // needs the full band to start.
    if (state != 0 && d[i] * state <= 0.0) state = 0;
    if (s != 0 && s != state) {
      lobes.push_back({s, i, mag});
      state = s;
    } else if (s != 0 && s == state && mag > lobes.back().magnitude) {
      lobes.back().peak = i;
      lobes.back().magnitude = mag;
    }
  }

  double pos = 0.0;
  double neg = 0.0;
  for (const auto& l : lobes) (l.sign > 0 ? pos : neg) += l.magnitude;
  const int polarity = pos >= neg ? 1 : -1;

  // Only interior peaks count: a lobe cut by the window edge before reaching
  // its maximum belongs to a fringe outside the window.
  const std::size_t last = d.size() - 1;
  for (const auto& l : lobes) {
    if (l.sign != polarity || l.peak == 0 || l.peak == last) continue;
    if (std::abs(d[l.peak - 1]) > l.magnitude || std::abs(d[l.peak + 1]) > l.magnitude) continue;
    const std::size_t idx = window.begin + l.peak + 1;
    if (!report.fringe_indices.empty() &&
        idx - report.fringe_indices.back() < detector.min_separation) {
      continue;
    }
    report.fringe_indices.push_back(idx);
  }
  report.fringe_count = report.fringe_indices.size();
  return report;
}

double displacement_from_fringes(std::size_t fringe_count, const LaserConfig& laser) {
  return static_cast<double>(fringe_count) * laser.wavelength_m / 2.0;
}

}  // namespace smi
