#include "echoplace/wave_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>

#include "echoplace/errors.hpp"
#include "echoplace/fft.hpp"
#include "echoplace/threads.hpp"

namespace echoplace {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCourantSafety = 0.9;
constexpr double kInstabilityFactor = 1e6;

// Specific admittance from the band-mean absorption via the normal-incidence
// reflection coefficient R = sqrt(1 - alpha).
double admittance_from_absorption(double alpha) {
  alpha = std::clamp(alpha, 0.0, 1.0);
  const double r = std::sqrt(1.0 - std::min(alpha, 0.999999));
  const double zeta = (1.0 + r) / (1.0 - r + 1e-12);
  return 1.0 / zeta;
}

const int kFaceDirs[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};

}  // namespace

SimGrid build_grid(const Scene& scene, double f_max_hz, double points_per_wavelength,
                   std::vector<std::string>* warnings, size_t max_cells) {
  if (f_max_hz <= 0.0) throw ValidationError("build_grid: f_max must be > 0");
  if (points_per_wavelength <= 0.0)
    throw ValidationError("build_grid: points_per_wavelength must be > 0");
  if (scene.air.empty()) throw ValidationError("build_grid: scene has no air volume");

  if (points_per_wavelength < 8.0) {
    const std::string msg = "build_grid: " + std::to_string(points_per_wavelength) +
                            " points per wavelength is below the recommended 8; expect added "
                            "dispersion error";
    if (warnings)
      warnings->push_back(msg);
    else
      std::cerr << "warning: " << msg << "\n";
  }

  SimGrid g;
  g.c = scene.c;
  g.dx = scene.c / (f_max_hz * points_per_wavelength);
  g.dt = kCourantSafety * g.dx / (scene.c * std::sqrt(3.0));

  const Aabb bounds = scene.air_bounds();
  const Vec3 ext = bounds.extent();
  if (ext.x <= 0.0 || ext.y <= 0.0 || ext.z <= 0.0)
    throw ValidationError("build_grid: air volume too small for one cell");
  g.origin = bounds.min;
  g.nx = static_cast<int>(std::ceil(ext.x / g.dx - 1e-9));
  g.ny = static_cast<int>(std::ceil(ext.y / g.dx - 1e-9));
  g.nz = static_cast<int>(std::ceil(ext.z / g.dx - 1e-9));
  if (g.nx < 1 || g.ny < 1 || g.nz < 1)
    throw ValidationError("build_grid: air volume too small for one cell");
  if (g.cell_count() > max_cells)
    throw SolverError("build_grid: " + std::to_string(g.cell_count()) +
                      " cells exceeds the configured cap of " + std::to_string(max_cells));

  g.cell_class.assign(g.cell_count(), CellClass::solid);
  g.cell_material.assign(g.cell_count(), -1);

  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (point_in_union(g.cell_center(i, j, k), scene.air))
          g.cell_class[g.index(i, j, k)] = CellClass::air;

  // Triangles strictly inside a cell make it a wall cell. The box is shrunk a
  // hair so walls lying exactly on cell faces stay face boundaries instead of
  // eating an air layer.
  const double shrink = 1e-7;
  for (const auto& tri : scene.mesh) {
    Aabb tb{{std::min({tri.a.x, tri.b.x, tri.c.x}), std::min({tri.a.y, tri.b.y, tri.c.y}),
             std::min({tri.a.z, tri.b.z, tri.c.z})},
            {std::max({tri.a.x, tri.b.x, tri.c.x}), std::max({tri.a.y, tri.b.y, tri.c.y}),
             std::max({tri.a.z, tri.b.z, tri.c.z})}};
    const int i0 = std::max(0, static_cast<int>((tb.min.x - g.origin.x) / g.dx) - 1);
    const int j0 = std::max(0, static_cast<int>((tb.min.y - g.origin.y) / g.dx) - 1);
    const int k0 = std::max(0, static_cast<int>((tb.min.z - g.origin.z) / g.dx) - 1);
    const int i1 = std::min(g.nx - 1, static_cast<int>((tb.max.x - g.origin.x) / g.dx) + 1);
    const int j1 = std::min(g.ny - 1, static_cast<int>((tb.max.y - g.origin.y) / g.dx) + 1);
    const int k1 = std::min(g.nz - 1, static_cast<int>((tb.max.z - g.origin.z) / g.dx) + 1);
    for (int k = k0; k <= k1; ++k)
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) {
          const Vec3 c = g.cell_center(i, j, k);
          const Vec3 h{g.dx / 2 - shrink, g.dx / 2 - shrink, g.dx / 2 - shrink};
          if (triangle_aabb_overlap(tri, Aabb{c - h, c + h})) {
            const size_t idx = g.index(i, j, k);
            g.cell_class[idx] = CellClass::boundary;
            g.cell_material[idx] = tri.material;
          }
        }
  }

  // Face admittances: for every air cell with a non-air (or out-of-grid)
  // neighbor, the wall material is whatever triangle a short ray toward the
  // face hits; no triangle means rigid.
  g.face_mask.assign(g.cell_count(), 0);
  g.face_admittance.assign(g.cell_count(), 0.0);
  std::vector<double> mat_admittance(scene.materials.size(), 0.0);
  for (size_t m = 0; m < scene.materials.size(); ++m)
    mat_admittance[m] = admittance_from_absorption(
        scene.materials[m].mean_absorption_below(f_max_hz));

  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const size_t idx = g.index(i, j, k);
        if (g.cell_class[idx] != CellClass::air) continue;
        uint8_t mask = 0;
        double gsum = 0.0;
        for (int f = 0; f < 6; ++f) {
          const int ni = i + kFaceDirs[f][0], nj = j + kFaceDirs[f][1], nk = k + kFaceDirs[f][2];
          const bool outside = ni < 0 || nj < 0 || nk < 0 || ni >= g.nx || nj >= g.ny || nk >= g.nz;
          const bool wall = outside || g.cell_class[g.index(ni, nj, nk)] != CellClass::air;
          if (!wall) continue;
          mask |= static_cast<uint8_t>(1u << f);
          double adm = 0.0;
          if (!outside && g.cell_class[g.index(ni, nj, nk)] == CellClass::boundary) {
            const int m = g.cell_material[g.index(ni, nj, nk)];
            if (m >= 0) adm = mat_admittance[m];
          } else {
            const Vec3 dir{static_cast<double>(kFaceDirs[f][0]),
                           static_cast<double>(kFaceDirs[f][1]),
                           static_cast<double>(kFaceDirs[f][2])};
            if (auto hit = ray_mesh(g.cell_center(i, j, k), dir, scene.mesh, 1e-9, 1.5 * g.dx))
              adm = mat_admittance[scene.mesh[hit->triangle].material];
          }
          gsum += adm;
        }
        g.face_mask[idx] = mask;
        g.face_admittance[idx] = gsum;
      }

  return g;
}

namespace {

// Nearest air cell to p within a small search radius; nullopt if none.
std::optional<size_t> snap_to_air(const SimGrid& g, const Vec3& p) {
  const int ci = static_cast<int>((p.x - g.origin.x) / g.dx);
  const int cj = static_cast<int>((p.y - g.origin.y) / g.dx);
  const int ck = static_cast<int>((p.z - g.origin.z) / g.dx);
  double best = 1e30;
  std::optional<size_t> out;
  for (int dk = -2; dk <= 2; ++dk)
    for (int dj = -2; dj <= 2; ++dj)
      for (int di = -2; di <= 2; ++di) {
        const int i = ci + di, j = cj + dj, k = ck + dk;
        if (!g.is_air(i, j, k)) continue;
        const Vec3 c = g.cell_center(i, j, k);
        const double d = dot(c - p, c - p);
        if (d < best) {
          best = d;
          out = g.index(i, j, k);
        }
      }
  return out;
}

void write_snapshot_header(std::ofstream& f, const SimGrid& g) {
  f.write("EPWS", 4);
  const uint32_t dims[3] = {static_cast<uint32_t>(g.nx), static_cast<uint32_t>(g.ny),
                            static_cast<uint32_t>(g.nz)};
  f.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  const double meta[2] = {g.dx, g.dt};
  f.write(reinterpret_cast<const char*>(meta), sizeof(meta));
}

}  // namespace

WaveResult run_wave(const SimGrid& grid, const Vec3& emit_at, double duration_s,
                    const std::vector<Vec3>& probes, const WaveRunOptions& opts) {
  if (duration_s <= 0.0) throw ValidationError("run_wave: duration must be > 0");
  const auto src = snap_to_air(grid, emit_at);
  if (!src) throw SolverError("run_wave: emit point is not inside an air cell");
  std::vector<size_t> probe_idx;
  for (const auto& p : probes) {
    const auto idx = snap_to_air(grid, p);
    if (!idx) throw SolverError("run_wave: probe point is not inside an air cell");
    probe_idx.push_back(*idx);
  }

  const size_t n_cells = grid.cell_count();
  const size_t steps = static_cast<size_t>(std::ceil(duration_s / grid.dt));
  const double lambda = grid.c * grid.dt / grid.dx;
  const double l2 = lambda * lambda;

  // Gaussian-modulated cosine, ~-60 dB above 2x the modulation frequency.
  const double f0 = opts.pulse_center_hz;
  const double sigma = std::sqrt(2.0 * std::log(1e3)) / (2.0 * kPi * f0);
  const double t_center = 5.0 * sigma;
  const size_t pulse_steps = static_cast<size_t>(std::ceil(2.0 * t_center / grid.dt));
  std::vector<double> pulse(std::min(steps, pulse_steps), 0.0);
  for (size_t n = 0; n < pulse.size(); ++n) {
    const double t = static_cast<double>(n) * grid.dt - t_center;
    pulse[n] = opts.pulse_amplitude * std::exp(-t * t / (2.0 * sigma * sigma)) *
               std::cos(2.0 * kPi * f0 * t);
  }
  const double inject_scale = grid.dt * grid.dt / (grid.dx * grid.dx * grid.dx);

  std::vector<double> p_prev(n_cells, 0.0), p_cur(n_cells, 0.0), p_next(n_cells, 0.0);

  WaveResult result;
  result.dt = grid.dt;
  result.source = emit_at;
  result.pulse = pulse;
  result.steps = steps;
  result.traces.assign(probes.size(), std::vector<double>(steps, 0.0));

  std::ofstream snap;
  if (!opts.snapshot_path.empty() && opts.snapshot_every > 0) {
    snap.open(opts.snapshot_path, std::ios::binary);
    if (!snap) throw IoError("cannot write snapshot file: " + opts.snapshot_path);
    write_snapshot_header(snap, grid);
  }

  const int nx = grid.nx, ny = grid.ny, nz = grid.nz;
  const size_t sx = 1, sy = static_cast<size_t>(nx), sz = static_cast<size_t>(nx) * ny;
  const long strides[6] = {-static_cast<long>(sx), static_cast<long>(sx),
                           -static_cast<long>(sy), static_cast<long>(sy),
                           -static_cast<long>(sz), static_cast<long>(sz)};

  double peak_at_source = 0.0;
  for (size_t step = 0; step < steps; ++step) {
    // One leapfrog update; each output cell reads only the two old buffers, so
    // the slab split cannot change results.
    parallel_for(static_cast<size_t>(nz), 1, [&](size_t k0, size_t k1) {
      for (size_t k = k0; k < k1; ++k)
        for (int j = 0; j < ny; ++j) {
          size_t idx = grid.index(0, j, static_cast<int>(k));
          for (int i = 0; i < nx; ++i, ++idx) {
            if (grid.cell_class[idx] != CellClass::air) {
              p_next[idx] = 0.0;
              continue;
            }
            const double pc = p_cur[idx];
            const uint8_t mask = grid.face_mask[idx];
            double slot_sum;
            if (mask == 0) {
              slot_sum = p_cur[idx + strides[0]] + p_cur[idx + strides[1]] +
                         p_cur[idx + strides[2]] + p_cur[idx + strides[3]] +
                         p_cur[idx + strides[4]] + p_cur[idx + strides[5]];
              p_next[idx] = 2.0 * pc - p_prev[idx] + l2 * (slot_sum - 6.0 * pc);
            } else {
              slot_sum = 0.0;
              for (int f = 0; f < 6; ++f)
                slot_sum += (mask & (1u << f)) ? pc : p_cur[idx + strides[f]];
              const double gterm = 0.5 * lambda * grid.face_admittance[idx];
              p_next[idx] = (2.0 * pc - (1.0 - gterm) * p_prev[idx] +
                             l2 * (slot_sum - 6.0 * pc)) /
                            (1.0 + gterm);
            }
          }
        }
    });

    if (step < pulse.size()) {
      p_next[*src] += inject_scale * pulse[step];
      peak_at_source = std::max(peak_at_source, std::fabs(p_next[*src]));
    }

    for (size_t pi = 0; pi < probe_idx.size(); ++pi)
      result.traces[pi][step] = p_next[probe_idx[pi]];

    if (snap.is_open() && step % static_cast<size_t>(opts.snapshot_every) == 0) {
      std::vector<float> frame(n_cells);
      for (size_t i = 0; i < n_cells; ++i) frame[i] = static_cast<float>(p_next[i]);
      snap.write(reinterpret_cast<const char*>(frame.data()),
                 static_cast<std::streamsize>(frame.size() * sizeof(float)));
    }

    if (opts.on_step) opts.on_step(step, p_next, p_cur);

    if ((step & 63u) == 0 && peak_at_source > 0.0) {
      double mx = 0.0;
      for (size_t i = 0; i < n_cells; ++i) mx = std::max(mx, std::fabs(p_next[i]));
      if (mx > kInstabilityFactor * peak_at_source)
        throw SolverError("run_wave: instability detected (pressure " + std::to_string(mx) +
                          " exceeds 1e6 x injected peak)");
    }

    std::swap(p_prev, p_cur);
    std::swap(p_cur, p_next);
  }

  result.injected_peak = peak_at_source;
  return result;
}

std::vector<ImpulseResponse> wave_rirs(const Scene& scene, const Vec3& listener,
                                       const std::vector<Vec3>& source_points, double f_max_hz,
                                       double points_per_wavelength, double duration_s,
                                       WaveRirInfo* info) {
  const SimGrid grid = build_grid(scene, f_max_hz, points_per_wavelength);
  return wave_rirs(scene, grid, listener, source_points, f_max_hz, duration_s, info);
}

std::vector<ImpulseResponse> wave_rirs(const Scene& scene, const SimGrid& grid,
                                       const Vec3& listener,
                                       const std::vector<Vec3>& source_points, double f_max_hz,
                                       double duration_s, WaveRirInfo* info) {
  if (duration_s <= 0.0) {
    duration_s = scene.rir_seconds > 0.0
                     ? scene.rir_seconds
                     : std::clamp(1.5 * scene.sabine_t60() + 0.05, 0.3, 3.0);
  }
  const WaveResult run = run_wave(grid, listener, duration_s, source_points);
  if (info) {
    info->solver_runs += 1;
    info->grid_dx = grid.dx;
    info->grid_cells = grid.cell_count();
  }

  const double fs_solver = 1.0 / run.dt;
  const size_t n = next_pow2(2 * run.steps);
  const auto pulse_spec = rfft(run.pulse, n);
  double smax = 0.0;
  for (const auto& s : pulse_spec) smax = std::max(smax, std::abs(s));
  const double eps = 1e-6 * smax;
  const double scale = 4.0 * kPi * scene.c * scene.c;

  // The trace usually ends mid-reverberation; a hard cut splatters broadband
  // noise that the regularized division then amplifies wherever the pulse
  // spectrum is weak. Fade the tail and gate the response to the wave band
  // (the pulse carries no usable signal below ~50 Hz or above ~1.2x f_max).
  const size_t fade = std::min<size_t>(run.steps / 10,
                                       static_cast<size_t>(0.02 * fs_solver));
  const double gate_hi0 = 1.04 * f_max_hz, gate_hi1 = 1.3 * f_max_hz;
  auto band_gate = [&](double f) {
    if (f >= gate_hi1) return 0.0;
    double g = 1.0;
    if (f > gate_hi0)
      g = 0.5 * (1.0 + std::cos(kPi * (f - gate_hi0) / (gate_hi1 - gate_hi0)));
    if (f < 25.0)
      g = 0.0;
    else if (f < 70.0)
      g *= 0.5 * (1.0 - std::cos(kPi * (f - 25.0) / 45.0));
    return g;
  };

  std::vector<ImpulseResponse> out;
  out.reserve(source_points.size());
  for (const auto& trace : run.traces) {
    std::vector<double> windowed = trace;
    for (size_t i = 0; i < fade && i < windowed.size(); ++i) {
      const double w = 0.5 * (1.0 - std::cos(kPi * static_cast<double>(i) / fade));
      windowed[windowed.size() - 1 - i] *= w;
    }
    auto spec = rfft(windowed, n);
    for (size_t k = 0; k < spec.size(); ++k) {
      const auto s = pulse_spec[k];
      spec[k] = scale * band_gate(fft_bin_hz(k, n, fs_solver)) * spec[k] * std::conj(s) /
                (std::norm(s) + eps * eps);
    }
    auto h_solver = irfft(spec, n);
    h_solver.resize(run.steps);

    ImpulseResponse h;
    h.sample_rate = scene.sample_rate;
    h.t0_s = 0.0;
    h.samples = resample(h_solver, fs_solver, scene.sample_rate);
    // Keep the discrete-convolution convention across the rate change.
    const double conv = fs_solver / scene.sample_rate;
    for (double& v : h.samples) v *= conv;
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace echoplace
