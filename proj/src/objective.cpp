#include "echoplace/objective.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "echoplace/errors.hpp"
#include "echoplace/filters.hpp"
#include "echoplace/hybrid.hpp"
#include "echoplace/rng.hpp"
#include "echoplace/wav.hpp"
#include "echoplace/wave_solver.hpp"

namespace echoplace {

namespace {

uint64_t hash_position(const Vec3& p) {
  uint64_t h = 0;
  for (int a = 0; a < 3; ++a) {
    uint64_t bits;
    const double v = p[a];
    std::memcpy(&bits, &v, sizeof(bits));
    h = mix64(h ^ bits);
  }
  return h;
}

BandSpectrum band_energies(const ImpulseResponse& h) {
  BandSpectrum out;
  const auto bands = octave_filter(h);
  for (int k = 0; k < kNumBands; ++k) {
    double e = 0.0;
    for (double v : bands[k]) e += v * v;
    out[k] = e;
  }
  return out;
}

}  // namespace

ObjectiveEvaluator::ObjectiveEvaluator(const Scene& scene, const SourceSamples& sources,
                                       const ObjectiveParams& params)
    : scene_(scene), sources_(sources), params_(params) {
  double total_weight = 0.0;
  for (const auto& s : sources_.samples) {
    if (s.weight < 0.0) throw ValidationError("objective: negative source weight");
    total_weight += s.weight;
  }
  if (sources_.samples.empty() || total_weight <= 0.0)
    throw ValidationError("objective: need at least one source sample with positive weight");
}

BandSpectrum clip_speech_levels(const AudioClip& clip) {
  const auto bands = octave_filter_bank(clip.samples, clip.sample_rate);
  double total = 0.0;
  std::array<double, kNumBands> e{};
  for (int k = 0; k < kNumBands; ++k) {
    for (double v : bands[k]) e[k] += v * v;
    total += e[k];
  }
  BandSpectrum levels = default_speech_spectrum();
  if (total > 0.0) {
    double total_intensity = 0.0;
    for (int k = 0; k < kNumBands; ++k) total_intensity += db_to_intensity(levels[k]);
    for (int k = 0; k < kNumBands; ++k)
      levels[k] = e[k] > 0.0 ? intensity_to_db(total_intensity * e[k] / total) : -120.0;
  }
  return levels;
}

BandSpectrum ObjectiveEvaluator::speech_levels(const SourceSample& sample) {
  if (!sample.clip_path) return sample.spectrum;
  auto it = clip_levels_.find(*sample.clip_path);
  if (it != clip_levels_.end()) return it->second;
  const BandSpectrum levels = clip_speech_levels(read_wav(*sample.clip_path));
  clip_levels_.emplace(*sample.clip_path, levels);
  return levels;
}

const SimGrid& ObjectiveEvaluator::grid() {
  if (!grid_) grid_ = build_grid(scene_, params_.wave_f_max, params_.wave_ppw);
  return *grid_;
}

const ObjectiveResult& ObjectiveEvaluator::evaluate(int candidate_id, const Vec3& listener) {
  auto it = cache_.find(candidate_id);
  if (it != cache_.end()) {
    ++stats_.cache_hits;
    return it->second;
  }
  auto result = compute(candidate_id, listener);
  return cache_.emplace(candidate_id, std::move(result)).first->second;
}

ObjectiveResult ObjectiveEvaluator::compute(int candidate_id, const Vec3& listener) {
  const size_t n_src = sources_.samples.size();
  const size_t n_noise = scene_.noise_sources.size();

  // Probe layout: sources first, then noise sources; one wave run serves all.
  std::vector<Vec3> probes;
  std::vector<size_t> probe_of_source(n_src, SIZE_MAX);
  for (size_t i = 0; i < n_src; ++i) {
    if (sources_.samples[i].weight <= 0.0) continue;  // skipped below anyway
    probe_of_source[i] = probes.size();
    probes.push_back(sources_.samples[i].position);
  }
  std::vector<size_t> probe_of_noise(n_noise);
  for (size_t m = 0; m < n_noise; ++m) {
    probe_of_noise[m] = probes.size();
    probes.push_back(scene_.noise_sources[m].position);
  }

  std::vector<ImpulseResponse> wave;
  if (params_.propagation == Propagation::hybrid && !probes.empty()) {
    WaveRirInfo info;
    wave = wave_rirs(scene_, grid(), listener, probes, params_.wave_f_max, scene_.rir_seconds,
                     &info);
    stats_.wave_runs += info.solver_runs;
  }

  const uint64_t listener_key = derive_seed(params_.seed, "listener",
                                            static_cast<uint64_t>(candidate_id));

  auto pair_rir = [&](const Vec3& source_pos, size_t probe) {
    GeoParams gp = params_.geo;
    gp.seed = derive_seed(listener_key, "pair", hash_position(source_pos));
    ImpulseResponse h_geo = geo_rir(scene_, source_pos, listener, gp);
    ++stats_.geo_traces;
    if (params_.propagation == Propagation::geometric_only) return h_geo;
    return crossover_combine(wave[probe], h_geo, params_.crossover_hz);
  };

  // Propagated noise context: received intensity per band, summed over noise
  // sources.
  std::optional<BandSpectrum> noise_intensity;
  if (n_noise > 0) {
    BandSpectrum acc = BandSpectrum::flat(0.0, BandUnit::energy);
    for (size_t m = 0; m < n_noise; ++m) {
      const auto& ns = scene_.noise_sources[m];
      const ImpulseResponse h = pair_rir(ns.position, probe_of_noise[m]);
      const BandSpectrum e = band_energies(h);
      for (int k = 0; k < kNumBands; ++k) acc[k] += db_to_intensity(ns.spectrum[k]) * e[k];
    }
    noise_intensity = acc;
  }

  ObjectiveResult result;
  result.per_source_sti.assign(n_src, std::numeric_limits<double>::quiet_NaN());
  result.weights.resize(n_src);
  double total_weight = 0.0;
  for (size_t i = 0; i < n_src; ++i) {
    const auto& sample = sources_.samples[i];
    result.weights[i] = sample.weight;
    total_weight += sample.weight;
    if (sample.weight <= 0.0) continue;  // contributes nothing to the sum

    const ImpulseResponse h = pair_rir(sample.position, probe_of_source[i]);
    std::optional<NoiseContext> ctx;
    if (noise_intensity) ctx = NoiseContext{*noise_intensity, speech_levels(sample)};
    const StiResult sti = sti_from_rir(h, ctx);
    ++stats_.sti_evals;
    result.per_source_sti[i] = sti.sti;
    result.objective += sample.weight * sti.sti;
  }
  result.weighted_avg = total_weight > 0.0 ? result.objective / total_weight : 0.0;
  return result;
}

}  // namespace echoplace
