#include "echoplace/geo_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <tuple>

#include "echoplace/errors.hpp"
#include "echoplace/filters.hpp"
#include "echoplace/rng.hpp"
#include "echoplace/threads.hpp"

namespace echoplace {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;
constexpr double kMinPathDistance = 0.01;  // clamp for coincident endpoints
constexpr double kRayKillRelEnergy = 1e-6;
constexpr double kRayMaxTravelS = 3.0;

struct Reflector {
  Plane plane;
  std::vector<int> triangles;  // indices into scene mesh
};

// Triangles grouped into coplanar reflectors; key quantized so shared walls
// built from many triangles reflect as one plane.
std::vector<Reflector> build_reflectors(const std::vector<Triangle>& mesh) {
  std::map<std::tuple<long, long, long, long>, size_t> index;
  std::vector<Reflector> out;
  for (size_t t = 0; t < mesh.size(); ++t) {
    Plane p = plane_of(mesh[t]);
    // Canonical orientation so opposite windings share a reflector.
    if (p.n.x < -1e-12 || (std::fabs(p.n.x) <= 1e-12 && p.n.y < -1e-12) ||
        (std::fabs(p.n.x) <= 1e-12 && std::fabs(p.n.y) <= 1e-12 && p.n.z < 0.0)) {
      p.n = p.n * -1.0;
      p.d = -p.d;
    }
    const auto key = std::make_tuple(std::lround(p.n.x * 1e6), std::lround(p.n.y * 1e6),
                                     std::lround(p.n.z * 1e6), std::lround(p.d * 1e6));
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, out.size());
      out.push_back({p, {static_cast<int>(t)}});
    } else {
      out[it->second].triangles.push_back(static_cast<int>(t));
    }
  }
  return out;
}

// Nearest hit along origin->target restricted to one reflector's triangles.
std::optional<RayHit> hit_reflector(const Vec3& origin, const Vec3& target,
                                    const std::vector<Triangle>& mesh, const Reflector& r) {
  const Vec3 d = target - origin;
  const double len = norm(d);
  if (len < 1e-12) return std::nullopt;
  const Vec3 dir = d / len;
  std::optional<RayHit> best;
  for (int t : r.triangles) {
    if (auto hit = ray_triangle(origin, dir, mesh[t], 1e-9, len)) {
      if (!best || *hit < best->t) best = RayHit{*hit, t, origin + dir * (*hit)};
    }
  }
  return best;
}

// The nearest mesh hit must be this reflector triangle (occlusion built in).
bool leg_reaches(const Vec3& origin, const RayHit& expected, const std::vector<Triangle>& mesh) {
  const Vec3 d = expected.point - origin;
  const double len = norm(d);
  if (len < 1e-12) return true;
  const Vec3 dir = d / len;
  for (size_t t = 0; t < mesh.size(); ++t) {
    if (static_cast<int>(t) == expected.triangle) continue;
    if (ray_triangle(origin, dir, mesh[t], 1e-6, len - 1e-6)) return false;
  }
  return true;
}

}  // namespace

constexpr size_t kMaxReflectors = 2000;

std::vector<ImageArrival> image_source_arrivals(const Scene& scene, const Vec3& source,
                                                const Vec3& listener, int max_order) {
  if (max_order < 0) throw ValidationError("image_source_arrivals: max_order must be >= 0");
  const auto reflectors = build_reflectors(scene.mesh);
  if (reflectors.size() > kMaxReflectors && max_order > 0)
    throw SolverError("image_source_arrivals: " + std::to_string(reflectors.size()) +
                      " reflecting planes; the sequence enumeration is meant for planar "
                      "architectural meshes (limit " + std::to_string(kMaxReflectors) + ")");
  std::vector<ImageArrival> out;

  // Direct path.
  if (!segment_occluded(listener, source, scene.mesh)) {
    const double d = std::max(norm(source - listener), kMinPathDistance);
    ImageArrival a;
    a.time_s = norm(source - listener) / scene.c;
    a.amplitude.fill(1.0 / d);
    a.order = 0;
    out.push_back(a);
  }

  struct Node {
    Vec3 image;
    std::vector<int> planes;  // reflector sequence, first bounce first
  };
  std::vector<Node> frontier{{source, {}}};

  for (int order = 1; order <= max_order; ++order) {
    std::vector<Node> next;
    for (const auto& node : frontier) {
      for (size_t r = 0; r < reflectors.size(); ++r) {
        if (!node.planes.empty() && node.planes.back() == static_cast<int>(r)) continue;
        Node child;
        child.image = reflectors[r].plane.reflect(node.image);
        child.planes = node.planes;
        child.planes.push_back(static_cast<int>(r));
        next.push_back(std::move(child));
      }
    }

    for (const auto& node : next) {
      // Walk back from the listener: each leg must land on the reflector and
      // be the nearest geometry along the way.
      const double d_total = std::max(norm(node.image - listener), kMinPathDistance);
      std::array<double, kNumBands> amp;
      amp.fill(1.0 / d_total);

      // Image of the source after the first j reflections in node.planes.
      std::vector<Vec3> images(node.planes.size() + 1);
      images[0] = source;
      for (size_t j = 0; j < node.planes.size(); ++j)
        images[j + 1] = reflectors[node.planes[j]].plane.reflect(images[j]);

      Vec3 x = listener;
      bool ok = true;
      for (size_t j = node.planes.size(); j-- > 0 && ok;) {
        const auto hit = hit_reflector(x, images[j + 1], scene.mesh, reflectors[node.planes[j]]);
        if (!hit || !leg_reaches(x, *hit, scene.mesh)) {
          ok = false;
          break;
        }
        const Material& mat = scene.materials[scene.mesh[hit->triangle].material];
        for (int b = 0; b < kNumBands; ++b)
          amp[b] *= std::sqrt(std::max(0.0, 1.0 - mat.absorption[b]));
        x = hit->point;
      }
      if (!ok) continue;
      if (segment_occluded(x, source, scene.mesh)) continue;
      double amax = 0.0;
      for (double v : amp) amax = std::max(amax, v);
      if (amax <= 1e-12) continue;  // fully absorbed path

      ImageArrival a;
      a.time_s = norm(node.image - listener) / scene.c;
      a.amplitude = amp;
      a.order = static_cast<int>(node.planes.size());
      out.push_back(a);
    }
    frontier = std::move(next);
  }

  std::sort(out.begin(), out.end(),
            [](const ImageArrival& a, const ImageArrival& b) { return a.time_s < b.time_s; });
  return out;
}

ImpulseResponse image_source_rir(const Scene& scene, const Vec3& source, const Vec3& listener,
                                 int max_order) {
  const auto arrivals = image_source_arrivals(scene, source, listener, max_order);
  ImpulseResponse out;
  out.sample_rate = scene.sample_rate;
  if (arrivals.empty()) return out;

  const double fs = scene.sample_rate;
  const size_t n = static_cast<size_t>(std::llround(arrivals.back().time_s * fs)) + 1;

  bool all_flat = true;
  for (const auto& a : arrivals)
    for (int b = 1; b < kNumBands; ++b)
      if (a.amplitude[b] != a.amplitude[0]) all_flat = false;

  if (all_flat) {
    out.samples.assign(n, 0.0);
    for (const auto& a : arrivals)
      out.samples[static_cast<size_t>(std::llround(a.time_s * fs))] += a.amplitude[0];
    return out;
  }

  // Band-dependent reflection loss: per-band impulse trains through the
  // partition-of-unity synthesis bank.
  out.samples.assign(n, 0.0);
  std::vector<double> train(n);
  for (int b = 0; b < kNumBands; ++b) {
    std::fill(train.begin(), train.end(), 0.0);
    for (const auto& a : arrivals)
      train[static_cast<size_t>(std::llround(a.time_s * fs))] += a.amplitude[b];
    const auto shaped = synthesis_band_filter(train, fs, b);
    for (size_t i = 0; i < n; ++i) out.samples[i] += shaped[i];
  }
  return out;
}

namespace {

struct RayState {
  Vec3 pos, dir;
  std::array<double, kNumBands> energy;
  double travel_m = 0.0;
  int last_triangle = -1;
};

Vec3 cosine_hemisphere(const Vec3& n, Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double r = std::sqrt(u1);
  const double phi = kTwoPi * u2;
  // Orthonormal frame around n.
  const Vec3 a = std::fabs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 t = normalized(cross(n, a));
  const Vec3 s = cross(n, t);
  return normalized(t * (r * std::cos(phi)) + s * (r * std::sin(phi)) +
                    n * std::sqrt(std::max(0.0, 1.0 - u1)));
}

}  // namespace

EnergyHistogram trace_histogram(const Scene& scene, const Vec3& source, const Vec3& listener,
                                int ray_count, uint64_t seed, double bin_width_s,
                                double duration_s) {
  if (ray_count <= 0) throw ValidationError("trace_histogram: ray_count must be > 0");
  if (duration_s <= 0.0) {
    const double direct = norm(listener - source) / scene.c;
    duration_s = std::clamp(1.5 * scene.sabine_t60() + direct, 0.4, kRayMaxTravelS);
  }

  EnergyHistogram hist;
  hist.bin_width_s = bin_width_s;
  hist.duration_s = duration_s;
  const size_t nbins = static_cast<size_t>(std::ceil(duration_s / bin_width_s));
  for (auto& band : hist.energy) band.assign(nbins, 0.0);

  const double det_radius = std::max(0.1, bin_width_s * scene.c / 2.0);
  const double deposit_scale = 4.0 / (det_radius * det_radius);
  const double init_energy = 1.0 / static_cast<double>(ray_count);
  const double kill_energy = kRayKillRelEnergy * init_energy;
  const double max_travel_m = kRayMaxTravelS * scene.c;

  // Fixed-size chunks merged in index order keep results independent of the
  // thread count.
  const size_t chunk = 2048;
  const size_t nchunks = (static_cast<size_t>(ray_count) + chunk - 1) / chunk;
  std::vector<std::array<std::vector<double>, kNumBands>> partial(nchunks);
  std::vector<long> escaped(nchunks, 0);

  parallel_for(nchunks, 1, [&](size_t c0, size_t c1) {
    for (size_t ci = c0; ci < c1; ++ci) {
      auto& local = partial[ci];
      for (auto& band : local) band.assign(nbins, 0.0);
      const size_t lo = ci * chunk;
      const size_t hi = std::min(lo + chunk, static_cast<size_t>(ray_count));
      for (size_t i = lo; i < hi; ++i) {
        Rng rng(derive_seed(seed, "ray", i));
        RayState ray;
        ray.pos = source;
        const double z = 1.0 - 2.0 * rng.uniform();
        const double phi = kTwoPi * rng.uniform();
        const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
        ray.dir = {rr * std::cos(phi), rr * std::sin(phi), z};
        ray.energy.fill(init_energy);

        while (true) {
          const auto hit = [&]() -> std::optional<RayHit> {
            std::optional<RayHit> best;
            for (size_t t = 0; t < scene.mesh.size(); ++t) {
              if (static_cast<int>(t) == ray.last_triangle) continue;
              if (auto d = ray_triangle(ray.pos, ray.dir, scene.mesh[t], 1e-9, 1e30)) {
                if (!best || *d < best->t)
                  best = RayHit{*d, static_cast<int>(t), ray.pos + ray.dir * (*d)};
              }
            }
            return best;
          }();

          const double seg_len = hit ? hit->t : max_travel_m - ray.travel_m;
          if (auto cross = segment_sphere(ray.pos, ray.dir, seg_len, listener, det_radius)) {
            const double mid = 0.5 * (cross->first + cross->second);
            const double t_arrive = (ray.travel_m + mid) / scene.c;
            const size_t bin = static_cast<size_t>(t_arrive / bin_width_s);
            if (bin < nbins)
              for (int b = 0; b < kNumBands; ++b)
                local[b][bin] += ray.energy[b] * deposit_scale;
          }

          if (!hit) {
            ++escaped[ci];
            break;
          }
          ray.travel_m += hit->t;
          if (ray.travel_m > max_travel_m) break;

          const Material& mat = scene.materials[scene.mesh[hit->triangle].material];
          double emax = 0.0;
          for (int b = 0; b < kNumBands; ++b) {
            ray.energy[b] *= std::max(0.0, 1.0 - mat.absorption[b]);
            emax = std::max(emax, ray.energy[b]);
          }
          if (emax < kill_energy) break;

          Vec3 n = scene.mesh[hit->triangle].normal();
          if (dot(n, ray.dir) > 0.0) n = n * -1.0;  // face the incoming side
          ray.pos = hit->point;
          ray.last_triangle = hit->triangle;
          if (rng.uniform() < mat.mean_scattering())
            ray.dir = cosine_hemisphere(n, rng);
          else
            ray.dir = ray.dir - n * (2.0 * dot(ray.dir, n));
        }
      }
    }
  });

  long total_escaped = 0;
  for (size_t ci = 0; ci < nchunks; ++ci) {
    total_escaped += escaped[ci];
    for (int b = 0; b < kNumBands; ++b)
      for (size_t k = 0; k < nbins; ++k) hist.energy[b][k] += partial[ci][b][k];
  }
  hist.escape_fraction = static_cast<double>(total_escaped) / static_cast<double>(ray_count);
  if (hist.escape_fraction > 0.05)
    std::fprintf(stderr,
                 "warning: trace_histogram: %.1f%% of rays escaped the mesh (leaky geometry?)\n",
                 100.0 * hist.escape_fraction);
  return hist;
}

ImpulseResponse histogram_to_rir(const EnergyHistogram& hist, const ImpulseResponse& early,
                                 double sample_rate, uint64_t seed, double early_window_s) {
  if (hist.bin_width_s > 0.0 && hist.bin_width_s < 1.0 / sample_rate)
    throw ValidationError("histogram_to_rir: bin width below one sample");

  const double fs = sample_rate;
  const size_t n_hist = static_cast<size_t>(std::ceil(hist.duration_s * fs));
  const size_t n = std::max(n_hist, early.size());
  ImpulseResponse out;
  out.sample_rate = fs;
  out.samples.assign(n, 0.0);
  if (n == 0) return out;

  const size_t nbins = hist.bin_count();
  if (nbins > 0) {
    const double samples_per_bin = hist.bin_width_s * fs;
    std::vector<double> bin_noise_energy(nbins);
    for (int b = 0; b < kNumBands; ++b) {
      if (hist.band_total(b) <= 0.0) continue;
      Rng rng(derive_seed(seed, "late-band", static_cast<uint64_t>(b)));
      std::vector<double> white(n_hist);
      for (auto& v : white) v = rng.normal();
      auto shaped = synthesis_band_filter(white, fs, b);

      std::fill(bin_noise_energy.begin(), bin_noise_energy.end(), 0.0);
      for (size_t i = 0; i < shaped.size(); ++i) {
        const size_t bin = std::min(nbins - 1, static_cast<size_t>(i / samples_per_bin));
        bin_noise_energy[bin] += shaped[i] * shaped[i];
      }
      for (size_t i = 0; i < shaped.size(); ++i) {
        const size_t bin = std::min(nbins - 1, static_cast<size_t>(i / samples_per_bin));
        const double target = hist.energy[b][bin];
        const double have = bin_noise_energy[bin];
        out.samples[i] += (target > 0.0 && have > 0.0) ? shaped[i] * std::sqrt(target / have) : 0.0;
      }
    }
  }

  if (!early.samples.empty()) {
    const size_t n_early_window = std::min(
        n, static_cast<size_t>(std::llround(early_window_s * fs)));
    for (size_t i = 0; i < n_early_window; ++i)
      out.samples[i] = i < early.size() ? early.samples[i] : 0.0;
  }
  return out;
}

ImpulseResponse geo_rir(const Scene& scene, const Vec3& source, const Vec3& listener,
                        const GeoParams& params) {
  const ImpulseResponse early = image_source_rir(scene, source, listener, params.max_order);
  const EnergyHistogram hist =
      trace_histogram(scene, source, listener, params.ray_count, params.seed,
                      params.bin_width_s, params.duration_s);
  return histogram_to_rir(hist, early, scene.sample_rate, derive_seed(params.seed, "late"),
                          params.early_window_s);
}

void write_histogram_csv(const std::string& path, const EnergyHistogram& hist) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write histogram CSV: " + path);
  f << "band_hz,bin_start_s,energy\n";
  char buf[128];
  for (int b = 0; b < kNumBands; ++b)
    for (size_t k = 0; k < hist.bin_count(); ++k) {
      std::snprintf(buf, sizeof(buf), "%g,%.6f,%.9g\n", kBandCenters[b],
                    static_cast<double>(k) * hist.bin_width_s, hist.energy[b][k]);
      f << buf;
    }
}

}  // namespace echoplace
