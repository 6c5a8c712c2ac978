#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "echoplace/geo_solver.hpp"
#include "echoplace/placement.hpp"
#include "echoplace/scene.hpp"
#include "echoplace/sti.hpp"
#include "echoplace/wave_solver.hpp"

namespace echoplace {

enum class Propagation { hybrid, geometric_only };

struct ObjectiveParams {
  GeoParams geo;
  double crossover_hz = 500.0;
  double wave_f_max = 500.0;
  double wave_ppw = 8.0;
  uint64_t seed = 0;
  Propagation propagation = Propagation::hybrid;
};

struct EvalStats {
  int wave_runs = 0;
  int geo_traces = 0;
  int sti_evals = 0;
  int cache_hits = 0;
};

struct ObjectiveResult {
  double objective = 0.0;       // sum of w_i * STI_i
  double weighted_avg = 0.0;    // objective / sum(w), the Table-style avg STI
  std::vector<double> per_source_sti;  // NaN where weight 0 (skipped)
  std::vector<double> weights;
};

// Per-band speech levels for a clip source: the default overall level spread
// across octave bands by the clip's own energy fractions. A flat-spectrum clip
// reproduces the default speech spectrum.
BandSpectrum clip_speech_levels(const AudioClip& clip);

// Weighted-STI objective for one listener position. One reciprocal wave run
// covers all source and noise probes; each source adds a geometric trace plus
// an STI evaluation under the propagated noise context. Results are cached by
// candidate id, and every random draw derives from (seed, listener id, source
// position), making the objective a pure function of its inputs.
class ObjectiveEvaluator {
 public:
  ObjectiveEvaluator(const Scene& scene, const SourceSamples& sources,
                     const ObjectiveParams& params);

  const ObjectiveResult& evaluate(int candidate_id, const Vec3& listener);
  double objective(int candidate_id, const Vec3& listener) {
    return evaluate(candidate_id, listener).objective;
  }

  const EvalStats& stats() const { return stats_; }

 private:
  ObjectiveResult compute(int candidate_id, const Vec3& listener);
  BandSpectrum speech_levels(const SourceSample& sample);
  const SimGrid& grid();

  const Scene& scene_;
  const SourceSamples& sources_;
  ObjectiveParams params_;
  EvalStats stats_;
  std::map<int, ObjectiveResult> cache_;
  std::map<std::string, BandSpectrum> clip_levels_;
  std::optional<SimGrid> grid_;  // built on first hybrid evaluation
};

}  // namespace echoplace
