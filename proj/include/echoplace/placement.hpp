#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "echoplace/scene.hpp"

namespace echoplace {

struct Candidate {
  Vec3 position;
  int box_id = 0;
};

struct CandidateSet {
  std::vector<Candidate> points;
  double spacing_m = 0.0;
};

struct SourceSample {
  Vec3 position;
  double weight = 1.0;
  int region_id = 0;
  std::optional<std::string> clip_path;
  BandSpectrum spectrum;  // dB SPL at 1 m
};

struct SourceSamples {
  std::vector<SourceSample> samples;
};

// Stratified sampling of the listener boxes: one point per spacing-sized cell,
// jittered within the central half of the cell so neighbors stay at least half
// a spacing apart. Degenerate (zero-thickness) axes collapse to one layer.
// Points falling outside the air volume are culled; an empty result throws
// ValidationError ("EmptyCandidates").
CandidateSet sample_listeners(const Scene& scene, double spacing_m, uint64_t seed);

// Uniform random points per source region, carrying the region weight and
// spectrum (default speech spectrum when the region gives none).
SourceSamples sample_sources(const Scene& scene, int per_region, uint64_t seed);

// CSV dumps: x,y,z,box_id and x,y,z,region_id,weight.
void write_candidates_csv(const std::string& path, const CandidateSet& set);
void write_sources_csv(const std::string& path, const SourceSamples& samples);

}  // namespace echoplace
