#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "echoplace/audio.hpp"
#include "echoplace/bands.hpp"
#include "echoplace/scene.hpp"

namespace echoplace {

// One specular path: arrival time and per-band pressure amplitude in the
// 1/distance convention (free field at 1 m == 1).
struct ImageArrival {
  double time_s = 0.0;
  std::array<double, kNumBands> amplitude{};
  int order = 0;
};

struct GeoParams {
  int ray_count = 50000;
  int max_order = 2;
  double bin_width_s = 0.001;
  double duration_s = 0.0;        // 0 = auto from the Sabine estimate
  double early_window_s = 0.080;  // image impulses own this prefix of the RIR
  uint64_t seed = 0;
};

// Energy-decay record from stochastic tracing. Bin values are squared-pressure
// energy in the image-source amplitude convention (direct path at distance d
// contributes ~1/d^2), i.e. gathered energy normalized by the detector
// cross-section. Detector radius: max(0.1 m, bin_width * c / 2).
struct EnergyHistogram {
  double bin_width_s = 0.0;
  double duration_s = 0.0;
  std::array<std::vector<double>, kNumBands> energy{};
  double escape_fraction = 0.0;

  size_t bin_count() const { return energy[0].size(); }
  double band_total(int b) const {
    double s = 0.0;
    for (double v : energy[b]) s += v;
    return s;
  }
};

// Visible image sources up to max_order, validated per reflection (the bounce
// point must land on actual geometry and every leg must be unoccluded).
// Sorted by arrival time.
std::vector<ImageArrival> image_source_arrivals(const Scene& scene, const Vec3& source,
                                                const Vec3& listener, int max_order);

// Arrival list rasterized to a pressure RIR at the scene sample rate. Flat
// per-band amplitudes become single-sample impulses; band-dependent ones go
// through the partition-of-unity synthesis bank.
ImpulseResponse image_source_rir(const Scene& scene, const Vec3& source, const Vec3& listener,
                                 int max_order);

// Stochastic ray tracing with specular/diffuse splitting by the material
// scattering coefficient. Deterministic for a given seed regardless of thread
// count. Sets escape_fraction; callers should warn above 5%.
EnergyHistogram trace_histogram(const Scene& scene, const Vec3& source, const Vec3& listener,
                                int ray_count, uint64_t seed, double bin_width_s = 0.001,
                                double duration_s = 0.0);

// Late-field synthesis: seeded noise shaped per band and bin to carry the
// histogram's energy, with image impulses replacing the first 80 ms.
ImpulseResponse histogram_to_rir(const EnergyHistogram& hist, const ImpulseResponse& early,
                                 double sample_rate, uint64_t seed,
                                 double early_window_s = 0.080);

// Full geometric-band RIR for one pair.
ImpulseResponse geo_rir(const Scene& scene, const Vec3& source, const Vec3& listener,
                        const GeoParams& params);

// CSV dump: band_hz, bin_start_s, energy.
void write_histogram_csv(const std::string& path, const EnergyHistogram& hist);

}  // namespace echoplace
