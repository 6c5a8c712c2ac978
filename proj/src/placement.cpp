#include "echoplace/placement.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "echoplace/errors.hpp"
#include "echoplace/rng.hpp"

namespace echoplace {

CandidateSet sample_listeners(const Scene& scene, double spacing_m, uint64_t seed) {
  if (spacing_m <= 0.0) throw ValidationError("sample_listeners: spacing must be > 0");

  CandidateSet out;
  out.spacing_m = spacing_m;

  for (size_t b = 0; b < scene.listener_boxes.size(); ++b) {
    const Aabb& box = scene.listener_boxes[b];
    Rng rng(derive_seed(seed, "listeners", b));
    int cells[3];
    for (int a = 0; a < 3; ++a) {
      const double ext = box.max[a] - box.min[a];
      cells[a] = ext <= 1e-12 ? 1 : static_cast<int>(std::ceil(ext / spacing_m - 1e-9));
    }
    for (int ci = 0; ci < cells[0]; ++ci)
      for (int cj = 0; cj < cells[1]; ++cj)
        for (int ck = 0; ck < cells[2]; ++ck) {
          const int cc[3] = {ci, cj, ck};
          Vec3 p;
          for (int a = 0; a < 3; ++a) {
            const double ext = box.max[a] - box.min[a];
            if (ext <= 1e-12) {
              p[a] = box.min[a];
              rng.uniform();  // keep the stream aligned across axes
              continue;
            }
            const double cell = ext / cells[a];
            // Jitter inside the central half of the cell: neighbor points can
            // never come closer than half the nominal spacing.
            p[a] = box.min[a] + cell * (cc[a] + 0.25 + 0.5 * rng.uniform());
          }
          if (!point_in_union(p, scene.air, 1e-9)) continue;
          out.points.push_back({p, static_cast<int>(b)});
        }
  }

  if (out.points.empty())
    throw ValidationError("EmptyCandidates: no listener candidates fall inside the air volume");
  return out;
}

SourceSamples sample_sources(const Scene& scene, int per_region, uint64_t seed) {
  if (per_region < 1) throw ValidationError("sample_sources: per_region must be >= 1");
  if (!scene.primary_regions.empty()) {
    double total = 0.0;
    for (const auto& r : scene.primary_regions) total += r.weight;
    if (total <= 0.0)
      throw ValidationError("sample_sources: every source region has zero weight");
  }

  SourceSamples out;
  for (size_t r = 0; r < scene.primary_regions.size(); ++r) {
    const SourceRegion& region = scene.primary_regions[r];
    Rng rng(derive_seed(seed, "sources", r));
    for (int i = 0; i < per_region; ++i) {
      SourceSample s;
      for (int a = 0; a < 3; ++a)
        s.position[a] = region.box.min[a] +
                        (region.box.max[a] - region.box.min[a]) * rng.uniform();
      s.weight = region.weight;
      s.region_id = static_cast<int>(r);
      s.clip_path = region.clip_path;
      s.spectrum = region.spectrum.value_or(default_speech_spectrum());
      out.samples.push_back(std::move(s));
    }
  }
  return out;
}

void write_candidates_csv(const std::string& path, const CandidateSet& set) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write candidates CSV: " + path);
  f << "x,y,z,box_id\n";
  char buf[160];
  for (const auto& c : set.points) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%d\n", c.position.x, c.position.y,
                  c.position.z, c.box_id);
    f << buf;
  }
}

void write_sources_csv(const std::string& path, const SourceSamples& samples) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write sources CSV: " + path);
  f << "x,y,z,region_id,weight\n";
  char buf[200];
  for (const auto& s : samples.samples) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%d,%.9g\n", s.position.x, s.position.y,
                  s.position.z, s.region_id, s.weight);
    f << buf;
  }
}

}  // namespace echoplace
