#include <cmath>

#include "doctest.h"
#include "echoplace/errors.hpp"
#include "echoplace/fft.hpp"
#include "echoplace/filters.hpp"
#include "echoplace/hybrid.hpp"
#include "echoplace/rng.hpp"
#include "echoplace/wav.hpp"
#include "test_support.hpp"

using namespace echoplace;

namespace {

ImpulseResponse make_ir(std::vector<double> samples, double fs = 32000.0) {
  ImpulseResponse h;
  h.samples = std::move(samples);
  h.sample_rate = fs;
  return h;
}

std::vector<double> random_signal(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

}  // namespace

TEST_CASE("crossover: zero geometric branch leaves the lowpassed wave branch") {
  const auto x = random_signal(512, 1);
  const ImpulseResponse h_wave = make_ir(x);
  const ImpulseResponse h_geo = make_ir(std::vector<double>(512, 0.0));
  const ImpulseResponse mixed = crossover_combine(h_wave, h_geo, 500.0);

  const auto expected =
      apply_gain_filter(x, 32000.0, [](double f) { return lr4_low_gain(f, 500.0); });
  REQUIRE(mixed.size() >= expected.size());
  for (size_t i = 0; i < expected.size(); ++i)
    CHECK(mixed.samples[i] == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("crossover: identical inputs pass through flat within 0.1 dB") {
  const auto x = random_signal(2048, 2);
  const ImpulseResponse h = make_ir(x);
  const ImpulseResponse mixed = crossover_combine(h, h, 500.0);

  const size_t n = next_pow2(2 * x.size());
  const auto in_spec = rfft(x, n);
  const auto out_spec = rfft(mixed.samples, n);
  for (size_t k = 1; k < in_spec.size(); ++k) {
    const double f = fft_bin_hz(k, n, 32000.0);
    if (f < 20.0 || f > 15000.0) continue;
    const double mag_in = std::abs(in_spec[k]);
    if (mag_in < 1e-6) continue;
    const double db = 20.0 * std::log10(std::abs(out_spec[k]) / mag_in);
    CHECK(std::fabs(db) < 0.1);
  }
}

TEST_CASE("crossover: each branch sits at -6.02 dB at the crossover frequency") {
  CHECK(20.0 * std::log10(lr4_low_gain(500.0, 500.0)) == doctest::Approx(-6.0206).epsilon(1e-3));
  CHECK(20.0 * std::log10(lr4_high_gain(500.0, 500.0)) == doctest::Approx(-6.0206).epsilon(1e-3));
}

TEST_CASE("crossover: linear in each argument") {
  const auto a = random_signal(256, 3);
  const auto b = random_signal(256, 4);
  const ImpulseResponse ha = make_ir(a), hb = make_ir(b);
  const ImpulseResponse zero = make_ir(std::vector<double>(256, 0.0));

  const auto mixed_sum = crossover_combine(ha, hb);
  const auto wave_only = crossover_combine(ha, zero);
  const auto geo_only = crossover_combine(zero, hb);
  for (size_t i = 0; i < mixed_sum.size(); ++i)
    CHECK(mixed_sum.samples[i] ==
          doctest::Approx(wave_only.samples[i] + geo_only.samples[i]).epsilon(1e-9));

  std::vector<double> a2(a);
  for (auto& v : a2) v *= 3.0;
  const auto scaled = crossover_combine(make_ir(a2), zero);
  for (size_t i = 0; i < scaled.size(); ++i)
    CHECK(scaled.samples[i] == doctest::Approx(3.0 * wave_only.samples[i]).epsilon(1e-9));
}

TEST_CASE("crossover: extreme crossover frequencies pass one branch") {
  // Bin-exact probe tones (for a 1024 window at 32 kHz) make the per-tone
  // levels measurable without leakage between the two branches.
  const size_t n = 1024;
  const double fs = 32000.0;
  auto tones = [&](std::vector<int> bins) {
    std::vector<double> x(n, 0.0);
    for (int k : bins)
      for (size_t i = 0; i < n; ++i)
        x[i] += std::sin(2.0 * testsupport::kPi * k * static_cast<double>(i) / n);
    return x;
  };
  const std::vector<int> bins_a{4, 16, 96};   // 125, 500, 3000 Hz
  const std::vector<int> bins_b{8, 32, 288};  // 250, 1000, 9000 Hz
  const ImpulseResponse ha = make_ir(tones(bins_a), fs);
  const ImpulseResponse hb = make_ir(tones(bins_b), fs);

  // f_c at Nyquist: output ~= wave branch.
  const auto hi = crossover_combine(ha, hb, 16000.0);
  for (int k : bins_a) {
    const double f = k * fs / n;
    const double got = testsupport::spectrum_mag_at(hi.samples, fs, f);
    const double want = testsupport::spectrum_mag_at(ha.samples, fs, f);
    CHECK(std::fabs(20.0 * std::log10(got / want)) < 0.1);
  }
  // f_c near zero: output ~= geometric branch.
  const auto lo = crossover_combine(ha, hb, 20.0);
  for (int k : bins_b) {
    const double f = k * fs / n;
    const double got = testsupport::spectrum_mag_at(lo.samples, fs, f);
    const double want = testsupport::spectrum_mag_at(hb.samples, fs, f);
    CHECK(std::fabs(20.0 * std::log10(got / want)) < 0.1);
  }
}

TEST_CASE("crossover: mismatched sample rates error") {
  const ImpulseResponse a = make_ir({1.0}, 32000.0);
  const ImpulseResponse b = make_ir({1.0}, 44100.0);
  CHECK_THROWS_AS(crossover_combine(a, b), ValidationError);
}

TEST_CASE("convolve_clip: unit impulse is identity") {
  const auto clip = random_signal(100, 7);
  const ImpulseResponse h = make_ir({1.0});
  const auto out = convolve_clip(h, clip);
  REQUIRE(out.size() == 100);
  for (size_t i = 0; i < 100; ++i) CHECK(out[i] == doctest::Approx(clip[i]).epsilon(1e-12));
}

TEST_CASE("convolve_clip: delayed impulse shifts the clip") {
  std::vector<double> impulse(101, 0.0);
  impulse[100] = 1.0;
  const auto clip = random_signal(64, 8);
  const auto out = convolve_clip(make_ir(impulse), clip);
  REQUIRE(out.size() == 164);
  for (size_t i = 0; i < 100; ++i) CHECK(std::fabs(out[i]) < 1e-9);
  for (size_t i = 0; i < 64; ++i) CHECK(out[100 + i] == doctest::Approx(clip[i]).epsilon(1e-9));
}

TEST_CASE("convolve_clip: matches the O(n^2) oracle") {
  const auto a = random_signal(64, 9);
  const auto b = random_signal(64, 10);
  const auto fast = convolve_clip(make_ir(a), b);
  const auto slow = testsupport::naive_convolution(a, b);
  REQUIRE(fast.size() == slow.size());
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < fast.size(); ++i) {
    num += (fast[i] - slow[i]) * (fast[i] - slow[i]);
    den += slow[i] * slow[i];
  }
  CHECK(std::sqrt(num / den) < 1e-9);
}

TEST_CASE("convolve_clip: commutes with scalar scaling") {
  const auto a = random_signal(32, 11);
  auto b = random_signal(32, 12);
  const auto base = convolve_clip(make_ir(a), b);
  for (auto& v : b) v *= 2.5;
  const auto scaled = convolve_clip(make_ir(a), b);
  for (size_t i = 0; i < base.size(); ++i)
    CHECK(scaled[i] == doctest::Approx(2.5 * base[i]).epsilon(1e-12));
}

TEST_CASE("convolve_clip: empty clip errors") {
  CHECK_THROWS_AS(convolve_clip(make_ir({1.0}), {}), ValidationError);
}

TEST_CASE("resample: sine survives an upsample within 1e-3") {
  const double f = 300.0, fs_in = 8000.0, fs_out = 32000.0;
  std::vector<double> x(4000);
  for (size_t i = 0; i < x.size(); ++i)
    x[i] = std::sin(2.0 * testsupport::kPi * f * i / fs_in);
  const auto y = echoplace::resample(x, fs_in, fs_out);
  REQUIRE(y.size() >= 15900);
  double err = 0.0;
  size_t n = 0;
  // Skip the edge taps at both ends.
  for (size_t i = 200; i < y.size() - 200; ++i, ++n) {
    const double want = std::sin(2.0 * testsupport::kPi * f * i / fs_out);
    err += (y[i] - want) * (y[i] - want);
  }
  CHECK(std::sqrt(err / n) < 1e-3);
}

TEST_CASE("wav: float round trip with RIR sidecar") {
  ImpulseResponse h;
  h.sample_rate = 32000.0;
  h.t0_s = 0.0125;
  h.samples = random_signal(333, 21);
  echoplace::write_rir("/tmp/echoplace_rt.wav", h, "unit-test");
  const ImpulseResponse back = echoplace::read_rir("/tmp/echoplace_rt.wav");
  REQUIRE(back.size() == h.size());
  CHECK(back.sample_rate == 32000.0);
  CHECK(back.t0_s == doctest::Approx(0.0125));
  for (size_t i = 0; i < h.size(); ++i)
    CHECK(back.samples[i] == doctest::Approx(h.samples[i]).epsilon(1e-6));
  remove("/tmp/echoplace_rt.wav");
  remove("/tmp/echoplace_rt.wav.meta");
}

TEST_CASE("synthesis bank sums to one") {
  for (double f : {10.0, 125.0, 400.0, 1000.0, 3000.0, 9000.0, 15000.0}) {
    double sum = 0.0;
    for (int b = 0; b < kNumBands; ++b) sum += synthesis_band_gain(b, f);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}
