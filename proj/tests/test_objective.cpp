#include <cmath>

#include "doctest.h"
#include "echoplace/objective.hpp"
#include "echoplace/rng.hpp"
#include "test_support.hpp"

using namespace echoplace;

namespace {

// Small anechoic room: near-delta channels, cheap wave runs.
Scene anechoic_scene() {
  Scene s = testsupport::box_scene({3.0, 2.6, 2.2}, 1.0);
  s.rir_seconds = 0.1;
  return s;
}

SourceSamples fixed_samples(std::vector<std::pair<Vec3, double>> items) {
  SourceSamples out;
  for (size_t i = 0; i < items.size(); ++i) {
    SourceSample s;
    s.position = items[i].first;
    s.weight = items[i].second;
    s.region_id = static_cast<int>(i);
    s.spectrum = default_speech_spectrum();
    out.samples.push_back(s);
  }
  return out;
}

ObjectiveParams cheap_params() {
  ObjectiveParams p;
  p.geo.ray_count = 3000;
  p.seed = 404;
  return p;
}

}  // namespace

TEST_CASE("objective: single positive weight dominates") {
  const Scene s = anechoic_scene();
  const Vec3 listener{2.4, 1.9, 1.2};
  const auto both = fixed_samples({{{0.7, 0.7, 1.2}, 0.0}, {{0.9, 1.8, 1.2}, 0.8}});
  const auto lone = fixed_samples({{{0.9, 1.8, 1.2}, 0.8}});

  ObjectiveEvaluator eval_both(s, both, cheap_params());
  ObjectiveEvaluator eval_lone(s, lone, cheap_params());
  const double q_both = eval_both.objective(0, listener);
  const double q_lone = eval_lone.objective(0, listener);
  CHECK(q_both == doctest::Approx(q_lone).epsilon(1e-12));
  // Zero-weight entries are skipped, not simulated.
  CHECK(std::isnan(eval_both.evaluate(0, listener).per_source_sti[0]));
}

TEST_CASE("objective: duplicating every sample doubles the objective exactly") {
  const Scene s = anechoic_scene();
  const Vec3 listener{2.4, 1.9, 1.2};
  const auto base = fixed_samples({{{0.7, 0.7, 1.2}, 1.0}, {{0.9, 1.8, 1.2}, 0.5}});
  auto doubled = base;
  for (const auto& sample : base.samples) doubled.samples.push_back(sample);

  ObjectiveEvaluator a(s, base, cheap_params());
  ObjectiveEvaluator b(s, doubled, cheap_params());
  const double qa = a.objective(0, listener);
  const double qb = b.objective(0, listener);
  CHECK(qb == doctest::Approx(2.0 * qa).epsilon(1e-12));
}

TEST_CASE("objective: anechoic noiseless channels are near-perfect") {
  const Scene s = anechoic_scene();
  const Vec3 listener{2.3, 1.8, 1.2};
  const auto sources = fixed_samples({{{0.8, 0.8, 1.2}, 1.0}, {{1.0, 1.9, 1.3}, 1.0}});
  ObjectiveEvaluator eval(s, sources, cheap_params());
  const auto& r = eval.evaluate(0, listener);
  for (double sti : r.per_source_sti) CHECK(sti >= 0.95);
}

TEST_CASE("objective: cache prevents repeat solver work") {
  const Scene s = anechoic_scene();
  const auto sources = fixed_samples({{{0.8, 0.8, 1.2}, 1.0}});
  ObjectiveEvaluator eval(s, sources, cheap_params());

  const Vec3 p0{2.3, 1.8, 1.2}, p1{2.0, 1.0, 1.2};
  eval.objective(0, p0);
  eval.objective(1, p1);
  eval.objective(0, p0);
  eval.objective(1, p1);
  eval.objective(0, p0);
  CHECK(eval.stats().wave_runs == 2);  // one per distinct candidate
  CHECK(eval.stats().geo_traces == 2);
  CHECK(eval.stats().cache_hits == 3);
}

TEST_CASE("objective: noise context lowers STI") {
  Scene s = anechoic_scene();
  const Vec3 listener{2.3, 1.8, 1.2};
  const auto sources = fixed_samples({{{0.8, 0.8, 1.2}, 1.0}});

  ObjectiveEvaluator quiet(s, sources, cheap_params());
  const double q_quiet = quiet.objective(0, listener);

  s.noise_sources.push_back({{2.0, 1.5, 1.2}, BandSpectrum::flat(70.0, BandUnit::decibel)});
  ObjectiveEvaluator noisy(s, sources, cheap_params());
  const double q_noisy = noisy.objective(0, listener);
  CHECK(q_noisy < q_quiet - 0.05);
}

TEST_CASE("objective: requires a positively weighted sample") {
  const Scene s = anechoic_scene();
  const auto none = fixed_samples({{{0.8, 0.8, 1.2}, 0.0}});
  CHECK_THROWS(ObjectiveEvaluator(s, none, cheap_params()));
}

TEST_CASE("clip_speech_levels: band fractions follow the clip spectrum") {
  // A 1 kHz tone concentrates the default overall level in band 4.
  AudioClip tone;
  tone.sample_rate = 32000.0;
  tone.samples.resize(32000);
  for (size_t i = 0; i < tone.samples.size(); ++i)
    tone.samples[i] = std::sin(2.0 * testsupport::kPi * 1000.0 * i / 32000.0);
  const BandSpectrum levels = clip_speech_levels(tone);
  for (int k = 0; k < kNumBands; ++k)
    if (k != 3) CHECK(levels[3] > levels[k] + 10.0);

  // Total received intensity matches the default speech spectrum's total.
  double total = 0.0, want = 0.0;
  for (int k = 0; k < kNumBands; ++k) {
    total += db_to_intensity(levels[k]);
    want += db_to_intensity(default_speech_spectrum()[k]);
  }
  CHECK(total == doctest::Approx(want).epsilon(1e-6));

  // A white clip lands close to flat.
  AudioClip white;
  white.sample_rate = 32000.0;
  white.samples.resize(160000);
  Rng rng(9);
  for (auto& v : white.samples) v = rng.normal();
  const BandSpectrum flat = clip_speech_levels(white);
  // Octave bandwidth doubles per band: flat noise gives +3 dB per band.
  for (int k = 0; k + 1 < kNumBands; ++k)
    CHECK(flat[k + 1] - flat[k] == doctest::Approx(3.01).epsilon(0.2));
}
