#include "echoplace/scene.hpp"

#include <cmath>
#include <sstream>

namespace echoplace {

double Material::mean_absorption_below(double f_max) const {
  double sum = 0.0;
  int n = 0;
  for (int b = 0; b < kNumBands; ++b) {
    if (kBandCenters[b] <= f_max) {
      sum += absorption[b];
      ++n;
    }
  }
  return n > 0 ? sum / n : 0.0;
}

double Material::mean_scattering() const {
  double sum = 0.0;
  for (int b = 0; b < kNumBands; ++b) sum += scattering[b];
  return sum / kNumBands;
}

Aabb Scene::air_bounds() const {
  Aabb out{{1e30, 1e30, 1e30}, {-1e30, -1e30, -1e30}};
  for (const auto& b : air) {
    for (int i = 0; i < 3; ++i) {
      out.min[i] = std::min(out.min[i], b.min[i]);
      out.max[i] = std::max(out.max[i], b.max[i]);
    }
  }
  return out;
}

double Scene::air_volume() const {
  // Boxes are expected disjoint; overlaps would double count.
  double v = 0.0;
  for (const auto& b : air) v += b.volume();
  return v;
}

double Scene::surface_area() const {
  double a = 0.0;
  for (const auto& t : mesh) a += t.area();
  return a;
}

double Scene::sabine_t60() const {
  double sum_sa = 0.0;
  for (const auto& t : mesh) {
    double alpha = 0.1;
    if (t.material >= 0 && t.material < static_cast<int>(materials.size())) {
      alpha = 0.0;
      for (int b = 0; b < kNumBands; ++b) alpha += materials[t.material].absorption[b];
      alpha /= kNumBands;
    }
    sum_sa += t.area() * alpha;
  }
  if (sum_sa <= 0.0) return 3.0;
  return 0.161 * air_volume() / sum_sa;
}

BandSpectrum default_speech_spectrum() { return BandSpectrum::flat(60.0, BandUnit::decibel); }

const char* violation_code_name(ViolationCode code) {
  switch (code) {
    case ViolationCode::CoefficientOutOfRange: return "CoefficientOutOfRange";
    case ViolationCode::DanglingMaterial: return "DanglingMaterial";
    case ViolationCode::BoxOutsideAir: return "BoxOutsideAir";
    case ViolationCode::NoiseOutsideAir: return "NoiseOutsideAir";
    case ViolationCode::SampleRateTooLow: return "SampleRateTooLow";
    case ViolationCode::NegativeWeight: return "NegativeWeight";
    case ViolationCode::ClipAndSpectrum: return "ClipAndSpectrum";
    case ViolationCode::EmptyAir: return "EmptyAir";
  }
  return "Unknown";
}

namespace {

void add(std::vector<Violation>& out, ViolationCode code, const std::string& path,
         const std::string& msg) {
  out.push_back({code, path, msg});
}

std::string idx(const std::string& base, size_t i) {
  std::ostringstream os;
  os << base << "[" << i << "]";
  return os.str();
}

}  // namespace

std::vector<Violation> validate_scene(const Scene& scene) {
  std::vector<Violation> out;

  if (scene.air.empty() || scene.air_volume() <= 0.0)
    add(out, ViolationCode::EmptyAir, "air", "air volume is empty");

  for (size_t m = 0; m < scene.materials.size(); ++m) {
    const auto& mat = scene.materials[m];
    for (int b = 0; b < kNumBands; ++b) {
      if (mat.absorption[b] < 0.0 || mat.absorption[b] > 1.0)
        add(out, ViolationCode::CoefficientOutOfRange, idx("materials", m) + ".absorption[" +
            std::to_string(b) + "]",
            "absorption " + std::to_string(mat.absorption[b]) + " outside [0,1] in material '" +
            mat.name + "'");
      if (mat.scattering[b] < 0.0 || mat.scattering[b] > 1.0)
        add(out, ViolationCode::CoefficientOutOfRange, idx("materials", m) + ".scattering[" +
            std::to_string(b) + "]",
            "scattering " + std::to_string(mat.scattering[b]) + " outside [0,1] in material '" +
            mat.name + "'");
    }
  }

  for (size_t t = 0; t < scene.mesh.size(); ++t) {
    const int mid = scene.mesh[t].material;
    if (mid < 0 || mid >= static_cast<int>(scene.materials.size()))
      add(out, ViolationCode::DanglingMaterial, idx("mesh", t),
          "triangle references material id " + std::to_string(mid) + " which does not exist");
  }

  for (size_t i = 0; i < scene.listener_boxes.size(); ++i) {
    if (!box_in_union(scene.listener_boxes[i], scene.air, 1e-6))
      add(out, ViolationCode::BoxOutsideAir, idx("listener_boxes", i),
          "listener box extends outside the air volume");
  }
  for (size_t i = 0; i < scene.primary_regions.size(); ++i) {
    const auto& r = scene.primary_regions[i];
    if (!box_in_union(r.box, scene.air, 1e-6))
      add(out, ViolationCode::BoxOutsideAir, idx("sources", i),
          "source region extends outside the air volume");
    if (r.weight < 0.0)
      add(out, ViolationCode::NegativeWeight, idx("sources", i) + ".weight",
          "source weight must be >= 0");
    if (r.clip_path && r.spectrum)
      add(out, ViolationCode::ClipAndSpectrum, idx("sources", i),
          "give either a clip or a spectrum, not both");
  }
  for (size_t i = 0; i < scene.noise_sources.size(); ++i) {
    if (!point_in_union(scene.noise_sources[i].position, scene.air))
      add(out, ViolationCode::NoiseOutsideAir, idx("noise", i),
          "noise source position is outside the air volume");
  }

  if (scene.sample_rate < 2.0 * max_band_edge())
    add(out, ViolationCode::SampleRateTooLow, "physics.sample_rate",
        "sample_rate " + std::to_string(scene.sample_rate) + " Hz is below 2x the 8 kHz band edge (" +
        std::to_string(2.0 * max_band_edge()) + " Hz)");

  return out;
}

std::vector<Triangle> make_box_mesh(const Aabb& box, int material) {
  const Vec3 lo = box.min, hi = box.max;
  const Vec3 v[8] = {
      {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
      {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z}};
  const int quads[6][4] = {{0, 1, 2, 3}, {4, 7, 6, 5}, {0, 4, 5, 1},
                           {3, 2, 6, 7}, {0, 3, 7, 4}, {1, 5, 6, 2}};
  std::vector<Triangle> tris;
  tris.reserve(12);
  for (const auto& q : quads) {
    tris.push_back({v[q[0]], v[q[1]], v[q[2]], material});
    tris.push_back({v[q[0]], v[q[2]], v[q[3]], material});
  }
  return tris;
}

}  // namespace echoplace
