#pragma once

#include <optional>
#include <string>
#include <vector>

#include "echoplace/bands.hpp"
#include "echoplace/geometry.hpp"

namespace echoplace {

struct Material {
  std::string name;
  BandSpectrum absorption;  // coefficient per octave band
  BandSpectrum scattering;  // coefficient per octave band

  // Mean absorption over the bands at or below f_max (wave-solver boundary model).
  double mean_absorption_below(double f_max) const;
  double mean_scattering() const;
};

struct SourceRegion {
  Aabb box;
  double weight = 1.0;
  std::optional<std::string> clip_path;   // mono WAV
  std::optional<BandSpectrum> spectrum;   // dB SPL at 1 m per band
};

struct NoiseSource {
  Vec3 position;
  BandSpectrum spectrum;  // dB SPL at 1 m per band
};

struct Scene {
  std::vector<Triangle> mesh;
  std::vector<Aabb> air;  // axis-aligned boxes bounding simulated air
  std::vector<Material> materials;
  std::vector<SourceRegion> primary_regions;
  std::vector<NoiseSource> noise_sources;
  std::vector<Aabb> listener_boxes;
  double c = 343.0;            // m/s
  double sample_rate = 32000;  // Hz
  double rir_seconds = 0.0;    // 0 = size from the Sabine estimate

  Aabb air_bounds() const;
  double air_volume() const;
  double surface_area() const;
  // Sabine estimate from mesh areas and band-mean absorption; used to size
  // default RIR durations.
  double sabine_t60() const;
};

// Flat 60 dB SPL per band at 1 m, used when a region gives neither clip nor
// spectrum. Keeps runs reproducible without shipping recordings.
BandSpectrum default_speech_spectrum();

enum class ViolationCode {
  CoefficientOutOfRange,
  DanglingMaterial,
  BoxOutsideAir,
  NoiseOutsideAir,
  SampleRateTooLow,
  NegativeWeight,
  ClipAndSpectrum,
  EmptyAir,
};

struct Violation {
  ViolationCode code;
  std::string path;     // offending element, e.g. "materials[2].absorption[5]"
  std::string message;  // human readable
};

const char* violation_code_name(ViolationCode code);

// Empty result iff every Scene invariant holds.
std::vector<Violation> validate_scene(const Scene& scene);

// Axis-aligned box room helper: 12 triangles, all faces one material.
std::vector<Triangle> make_box_mesh(const Aabb& box, int material);

}  // namespace echoplace
