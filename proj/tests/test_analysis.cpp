#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "smi/analysis.hpp"
#include "smi/error.hpp"
#include "smi/rng.hpp"
#include "smi/scenario.hpp"

using namespace smi;

namespace {

SampleTrace dimless(std::vector<double> v, double fs = 1000.0) {
  return SampleTrace(fs, Unit::dimensionless, std::move(v));
}

std::vector<double> sine(std::size_t n, double f, double amp, double fs, double phase = 0.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = amp * std::sin(2.0 * oracle::kPi * f * static_cast<double>(i) / fs + phase);
  }
  return v;
}

std::vector<double> concat(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("noise floor") {
  CHECK(noise_floor(dimless(std::vector<double>(50, 3.7)), {0, 50}).sqrt_p_noise == 0.0);
  CHECK(noise_floor(dimless({1, -1, 1, -1}), {0, 4}).sqrt_p_noise == 1.0);
  const auto g = gaussian_noise(10000, 0.5, 21);
  const auto est = noise_floor(dimless(g), {0, 10000});
  CHECK(est.sqrt_p_noise == doctest::Approx(0.5).epsilon(0.02));
  CHECK(est.policy == NoisePolicy::explicit_window);
  CHECK(est.window == IndexRange{0, 10000});
  CHECK_THROWS_AS(noise_floor(dimless({1.0}), {0, 1}), InvalidArgument);
  CHECK_THROWS_AS(noise_floor(dimless({1.0, 2.0}), {0, 3}), InvalidArgument);
}

TEST_CASE("noise floor equals the two-pass population standard deviation") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + gen() % 5000;
    std::normal_distribution<double> d(std::uniform_real_distribution<double>(-1e3, 1e3)(gen),
                                       std::uniform_real_distribution<double>(1e-3, 1e2)(gen));
    std::vector<double> v(n);
    for (auto& x : v) x = d(gen);
    const double want = oracle::pop_std(v);
    CHECK(noise_floor(dimless(v), {0, n}).sqrt_p_noise == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("worst-case noise") {
  CHECK(worst_case_noise(dimless(std::vector<double>(1000, 2.0)), {0, 1000}, 100).sqrt_p_noise == 0.0);

  const auto quiet = gaussian_noise(5000, 0.1, 1);
  const auto loud = gaussian_noise(5000, 0.3, 2);
  const auto t = dimless(concat(quiet, loud), 1000.0);
  const auto w = worst_case_noise(t, {0, 10000}, 500);
  CHECK(w.policy == NoisePolicy::worst_case_sliding);
  CHECK(w.sqrt_p_noise == doctest::Approx(0.3).epsilon(0.06));
  CHECK(w.window.begin >= 4750);
  const double pooled = noise_floor(t, {0, 10000}).sqrt_p_noise;
  CHECK(w.sqrt_p_noise > pooled * 1.2);

  const auto single = worst_case_noise(t, {1234, 1734}, 500);
  CHECK(single.sqrt_p_noise == noise_floor(t, {1234, 1734}).sqrt_p_noise);
  CHECK_THROWS_AS(worst_case_noise(t, {0, 400}, 500), InvalidArgument);
}

TEST_CASE("worst-case noise dominates every candidate window") {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(3000);
    std::normal_distribution<double> d(0.0, 1.0);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = d(gen) * (1.0 + 0.5 * std::sin(i * 0.003 * trial));
    const auto t = dimless(v);
    const std::size_t len = 100 + gen() % 400;
    const IndexRange region{gen() % 500, 3000 - gen() % 500};
    const auto w = worst_case_noise(t, region, len);
    for (std::size_t b = region.begin; b + len <= region.end; b += len / 2) {
      CHECK(w.sqrt_p_noise >= noise_floor(t, {b, b + len}).sqrt_p_noise);
    }
    CHECK(w.sqrt_p_noise >= noise_floor(t, {region.end - len, region.end}).sqrt_p_noise);
  }
}

TEST_CASE("normalize") {
  auto g = gaussian_noise(4000, 0.7, 3);
  for (auto& x : g) x += 0.2;
  const auto t = dimless(g);
  const auto est = noise_floor(t, {0, 4000});
  const auto n = normalize(t, est);
  CHECK(n.unit() == Unit::dimensionless);
  CHECK(oracle::pop_std(n.values()) == doctest::Approx(1.0).epsilon(1e-9));

  std::vector<double> doubled(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) doubled[i] = 2.0 * g[i];
  auto est2 = est;
  est2.sqrt_p_noise *= 2.0;
  CHECK(normalize(dimless(doubled), est2) == n);

  CHECK_THROWS_AS(normalize(t, NoiseEstimate{}), DegenerateInput);
}

TEST_CASE("window SNR") {
  const auto noise = gaussian_noise(2000, 1.0, 4);
  const auto t0 = dimless(noise);
  const auto est = noise_floor(t0, {0, 1000});
  const auto same = snr_db(t0, {0, 1000}, est);
  CHECK(std::abs(same.snr_db) < 1e-12);
  CHECK(same.method == SnrMethod::window_power);

  for (double ratio : {2.0, 10.0, 12.9, 100.0}) {
    const double sigma = est.sqrt_p_noise;
    const auto sig = sine(1000, 50.0, ratio * sigma * std::sqrt(2.0), 1000.0);
    const auto t = dimless(concat({noise.begin(), noise.begin() + 1000}, sig));
    const auto r = snr_db(t, {1000, 2000}, est);
    CAPTURE(ratio);
    CHECK(std::abs(r.snr_db - 20.0 * std::log10(ratio)) < 0.01);
    CHECK(r.snr_db == 10.0 * std::log10(r.p_signal / r.p_noise));
  }
  // 12.9 times the noise RMS is 22.2 dB.
  CHECK(20.0 * std::log10(12.9) == doctest::Approx(22.2).epsilon(0.2 / 22.2));

  CHECK_THROWS_AS(snr_db(t0, {0, 1000}, NoiseEstimate{}), DegenerateInput);
  CHECK_THROWS_AS(snr_db(t0, {0, 5000}, est), InvalidArgument);
}

TEST_CASE("window SNR is invariant to scaling the trace") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto v = gaussian_noise(3000, 1.0, trial);
    for (std::size_t i = 1500; i < 3000; ++i) v[i] *= 5.0;
    const double a = std::exp(std::uniform_real_distribution<double>(-20.0, 20.0)(gen));
    std::vector<double> s(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) s[i] = a * v[i];
    const auto t1 = dimless(v), t2 = dimless(s);
    const double r1 = snr_db(t1, {1500, 3000}, noise_floor(t1, {0, 1500})).snr_db;
    const double r2 = snr_db(t2, {1500, 3000}, noise_floor(t2, {0, 1500})).snr_db;
    CHECK(std::abs(r1 - r2) < 1e-9);
  }
}

TEST_CASE("exclusion windows remove transients from the signal power") {
  auto v = gaussian_noise(3000, 1.0, 5);
  for (std::size_t i = 2000; i < 2050; ++i) v[i] = 500.0 * ((i % 2) ? 1.0 : -1.0);
  const auto t = dimless(v);
  const auto est = noise_floor(t, {0, 1000});
  const double with = snr_db(t, {1000, 3000}, est).snr_db;
  const double without = snr_db(t, {1000, 3000}, est, {{1990, 2060}}).snr_db;
  CHECK(with > 20.0);
  CHECK(std::abs(without) < 0.5);
  CHECK_THROWS_AS(snr_db(t, {1000, 3000}, est, {{0, 3000}}), InvalidArgument);
}

TEST_CASE("peak SNR") {
  const NoiseEstimate est{0.5, {0, 10}, NoisePolicy::explicit_window};
  std::vector<double> v(100, 0.0);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < 10; ++i) {
    idx.push_back(5 + 10 * i);
    v[idx.back()] = (i % 2 ? -1.0 : 1.0) * 0.5;
  }
  CHECK(std::abs(peak_snr(dimless(v), idx, est).snr_db) < 1e-12);
  for (auto i : idx) v[i] *= 10.0;
  const auto r = peak_snr(dimless(v), idx, est);
  CHECK(r.snr_db == doctest::Approx(20.0).epsilon(0.01 / 20.0));
  CHECK(r.method == SnrMethod::peak_based);

  const double mixed[] = {2, 2, 1, 1, 1, 1, 1, 1, 1, 1};
  double sum = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    v[idx[i]] = mixed[i] * 0.5;
    sum += mixed[i] * mixed[i];
  }
  CHECK(peak_snr(dimless(v), idx, est).snr_db == doctest::Approx(10.0 * std::log10(sum / 10.0)));

  CHECK_THROWS_AS(peak_snr(dimless(v), {}, est), InvalidArgument);
  CHECK_THROWS_AS(peak_snr(dimless(v), {1000}, est), InvalidArgument);
}

TEST_CASE("peak SNR closes the loop on a generated impulse train") {
  const double fs = 20000.0;
  const double sigma = 0.01;
  for (const double p : {1.0, 3.0}) {
    const auto d = gen_impulse_train(std::vector<double>(10, p), 0.1, 1200.0, 0.005, fs, 0.5);
    auto v = d.values();
    const auto n = gaussian_noise(v.size(), sigma, 6);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += n[i];
    const auto t = dimless(v, fs);
    const auto est = noise_floor(t, t.range_s(0.0, 0.5));
    const auto peaks = find_peaks(t, 10, 1000, t.range_s(0.5, t.duration_s()));
    REQUIRE(peaks.size() == 10);
    const double want = 10.0 * std::log10(p * p / est.p_noise());
    // Each picked peak carries the noise sample under it: allow 3 sigma.
    CHECK(std::abs(peak_snr(t, peaks, est).snr_db - want) < 20.0 * std::log10(1.0 + 3.0 * sigma / p));
  }
  // Two strong first events carry most of the peak power.
  std::vector<double> heavy(10, 1.0);
  heavy[0] = heavy[1] = 3.0;
  const auto d = gen_impulse_train(heavy, 0.1, 1200.0, 0.005, fs, 0.5);
  const auto t = dimless(d.values(), fs);
  const auto peaks = find_peaks(t, 10, 1000, t.range_s(0.5, t.duration_s()));
  const NoiseEstimate unit{1.0, {0, 1}, NoisePolicy::explicit_window};
  const double all = peak_snr(t, peaks, unit).p_signal * 10.0;
  const double first_two = t[peaks[0]] * t[peaks[0]] + t[peaks[1]] * t[peaks[1]];
  CHECK(first_two / all > 0.5);
}

TEST_CASE("find_peaks") {
  std::vector<double> v(100, 0.0);
  v[10] = 1.0; v[12] = 5.0; v[50] = -4.0; v[90] = 3.0; v[95] = 2.0;
  const auto t = dimless(v);
  CHECK(find_peaks(t, 3, 5, {0, 100}) == std::vector<std::size_t>{12, 50, 90});
  CHECK(find_peaks(t, 10, 5, {0, 100}) == std::vector<std::size_t>{12, 50, 90, 95});
  CHECK(find_peaks(t, 10, 1, {40, 100}) == std::vector<std::size_t>{50, 90, 95});
  CHECK(find_peaks(t, 2, 1, {0, 100}) == std::vector<std::size_t>{12, 50});
}

TEST_CASE("spectrum") {
  const double fs = 10000.0;
  const auto s = spectrum(dimless(sine(20000, 500.0, 1.0, fs), fs), 0.5, 1.0);
  CHECK(s.peak_freq_hz() == doctest::Approx(500.0));
  CHECK(s.resolution_hz() == 1.0);
  CHECK(s.freqs_hz.size() == s.normalized_magnitudes.size());
  CHECK(s.normalized_magnitudes[0] == 0.0);
  CHECK(*std::max_element(s.normalized_magnitudes.begin(), s.normalized_magnitudes.end()) == 1.0);

  const auto dc = spectrum(dimless(std::vector<double>(20000, 3.0), fs), 0.0, 1.0);
  CHECK(dc.degenerate);

  auto two = sine(10000, 500.0, 1.0, fs);
  const auto b = sine(10000, 1000.0, 1.0, fs, 0.3);
  for (std::size_t i = 0; i < two.size(); ++i) two[i] += b[i];
  const auto s2 = spectrum(dimless(two, fs), 0.0, 1.0);
  CHECK(s2.normalized_magnitudes[500] == doctest::Approx(s2.normalized_magnitudes[1000]).epsilon(0.01));

  CHECK_THROWS_AS(spectrum(dimless(std::vector<double>(63, 1.0), fs), 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(spectrum(dimless(std::vector<double>(5000, 1.0), fs), 0.0, 1.0), InvalidArgument);
}

TEST_CASE("spectrum matches a direct DFT of the windowed data") {
  const double fs = 1000.0;
  auto x = gaussian_noise(1000, 1.0, 31);
  const auto tonal = sine(1000, 123.4, 3.0, fs);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += tonal[i] + 7.0;
  const auto s = spectrum(dimless(x, fs), 0.0, 1.0);
  const double m = oracle::mean(x);
  std::vector<double> w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    w[i] = (x[i] - m) * (0.5 - 0.5 * std::cos(2.0 * oracle::kPi * static_cast<double>(i) / 1000.0));
  }
  auto mag = oracle::dft_magnitude(w);
  mag[0] = 0.0;
  const double peak = *std::max_element(mag.begin(), mag.end());
  REQUIRE(mag.size() == s.normalized_magnitudes.size());
  for (std::size_t k = 0; k < mag.size(); ++k) {
    CHECK(s.normalized_magnitudes[k] == doctest::Approx(mag[k] / peak).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("spectrum peak lands within one bin for tones across the band") {
  const double fs = 8000.0;
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> f(10.0, 0.9 * fs / 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double tone = f(gen);
    const auto s = spectrum(dimless(sine(8000, tone, 1.0, fs, 0.1 * trial), fs), 0.0, 1.0);
    CHECK(std::abs(s.peak_freq_hz() - tone) <= s.resolution_hz());
  }
}

TEST_CASE("moving RMS") {
  const auto env = moving_rms(std::vector<double>(100, -2.0), 10);
  for (double e : env) CHECK(e == doctest::Approx(2.0));
  CHECK(moving_rms(std::vector<double>{}, 10).empty());
}

TEST_CASE("event detection on noise and on a burst") {
  const double fs = 10000.0;
  std::size_t false_alarms = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    false_alarms += detect_events(dimless(gaussian_noise(20000, 1.0, seed), fs), 4.0, 0.02, 0.05)
                        .events.size();
  }
  CHECK(false_alarms <= 1);

  auto v = gaussian_noise(30000, 1.0, 500);
  const auto burst = gaussian_noise(5000, 12.9, 501);
  for (std::size_t i = 0; i < burst.size(); ++i) v[10000 + i] += burst[i];
  const auto ev = detect_events(dimless(v, fs), 4.0, 0.02, 0.05);
  REQUIRE(ev.events.size() == 1);
  const auto& e = ev.events[0];
  CHECK(std::abs(static_cast<double>(e.start) - 10000.0) <= 250.0);
  CHECK(std::abs(static_cast<double>(e.end) - 15000.0) <= 250.0);
  CHECK(e.peak_normalized_amplitude > 12.9);

  CHECK(detect_events(SampleTrace(fs, Unit::dimensionless, {}), 4.0, 0.02, 0.05).events.empty());
}

TEST_CASE("event detection merges short gaps and drops short blips") {
  const double fs = 10000.0;
  std::vector<double> v(20000, 0.0);
  auto fill = [&](std::size_t a, std::size_t b) {
    for (std::size_t i = a; i < b; ++i) v[i] = (i % 2 ? 10.0 : -10.0);
  };
  fill(2000, 3000);
  fill(3200, 4000);    // 20 ms gap: merged
  fill(10000, 11000);  // 100 ms after: separate
  fill(15000, 15010);  // 1 ms blip: too short
  const auto ev = detect_events(dimless(v, fs), 4.0, 0.02, 0.05);
  REQUIRE(ev.events.size() == 2);
  CHECK(ev.events[0].start < 2000);
  CHECK(ev.events[0].end > 4000);
  CHECK(ev.events[1].start > 4000);
}

TEST_CASE("event list invariants and threshold monotonicity") {
  const double fs = 5000.0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto v = gaussian_noise(25000, 1.0, seed);
    std::mt19937_64 gen(seed);
    for (int b = 0; b < 6; ++b) {
      const std::size_t at = gen() % 24000;
      const double gain = 1.0 + static_cast<double>(gen() % 80) / 10.0;
      for (std::size_t i = at; i < at + 500 && i < v.size(); ++i) v[i] *= gain;
    }
    const auto t = dimless(v, fs);
    std::size_t last = SIZE_MAX;
    for (double th : {1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0}) {
      const auto ev = detect_events(t, th, 0.02, 0.05);
      CHECK(ev.events.size() <= last);
      last = ev.events.size();
      for (std::size_t k = 0; k < ev.events.size(); ++k) {
        CHECK(ev.events[k].end > ev.events[k].start);
        if (k) CHECK(ev.events[k].start >= ev.events[k - 1].end);
      }
    }
  }
}
