#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "echoplace/audio.hpp"
#include "echoplace/scene.hpp"

namespace echoplace {

enum class CellClass : uint8_t { air = 0, boundary = 1, solid = 2 };

// Uniform grid over the air volume. Pressure nodes sit at cell centers; walls
// act at the faces between air and non-air cells through a locally reacting
// impedance taken from the adjacent wall material (rigid when no material is
// found). dt honors the 3-D stability bound dt <= dx / (c*sqrt(3)).
struct SimGrid {
  double dx = 0.0;
  int nx = 0, ny = 0, nz = 0;
  Vec3 origin;  // min corner of cell (0,0,0)
  double dt = 0.0;
  double c = 343.0;

  std::vector<CellClass> cell_class;    // nx*ny*nz
  std::vector<int32_t> cell_material;   // -1 unless boundary
  // Per-cell face data for air cells next to walls.
  std::vector<uint8_t> face_mask;       // bit f set = face f is non-air
  std::vector<double> face_admittance;  // sum of specific admittance over faces

  size_t index(int i, int j, int k) const {
    return (static_cast<size_t>(k) * ny + j) * nx + i;
  }
  size_t cell_count() const { return static_cast<size_t>(nx) * ny * nz; }
  Vec3 cell_center(int i, int j, int k) const {
    return {origin.x + (i + 0.5) * dx, origin.y + (j + 0.5) * dx, origin.z + (k + 0.5) * dx};
  }
  bool is_air(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < nx && j < ny && k < nz &&
           cell_class[index(i, j, k)] == CellClass::air;
  }
};

struct WaveRunOptions {
  double pulse_center_hz = 250.0;  // Gaussian-modulated cosine
  double pulse_amplitude = 1.0;
  std::string snapshot_path;       // empty = no snapshots
  int snapshot_every = 0;          // steps between frames
  // Diagnostic hook, called after each step with the new and previous fields.
  std::function<void(size_t step, const std::vector<double>& p_new,
                     const std::vector<double>& p_prev)>
      on_step;
};

struct WaveResult {
  std::vector<std::vector<double>> traces;  // per probe, sampled at 1/dt
  double dt = 0.0;
  Vec3 source;
  std::vector<double> pulse;      // injected sample sequence
  double injected_peak = 0.0;     // max |p| at the source cell while injecting
  size_t steps = 0;
};

// Grid construction. points_per_wavelength below 8 is accepted with a warning
// (appended to *warnings when given, else printed to stderr).
SimGrid build_grid(const Scene& scene, double f_max_hz, double points_per_wavelength,
                   std::vector<std::string>* warnings = nullptr,
                   size_t max_cells = 64000000);

// Leapfrog run: injects a band-limited pulse at emit_at and records pressure
// at the probes. Aborts with SolverError if |p| exceeds 1e6 x injected peak.
WaveResult run_wave(const SimGrid& grid, const Vec3& emit_at, double duration_s,
                    const std::vector<Vec3>& probes, const WaveRunOptions& opts = {});

struct WaveRirInfo {
  int solver_runs = 0;
  double grid_dx = 0.0;
  size_t grid_cells = 0;
};

// Low-band RIRs h(s_i, listener) for every source point from ONE simulation:
// by reciprocity the pulse is emitted at the listener and probed at the source
// points. Traces are deconvolved by the pulse spectrum (regularized) and
// resampled to the scene rate; result amplitudes follow the image-source
// 1/distance convention.
std::vector<ImpulseResponse> wave_rirs(const Scene& scene, const Vec3& listener,
                                       const std::vector<Vec3>& source_points,
                                       double f_max_hz = 500.0,
                                       double points_per_wavelength = 8.0,
                                       double duration_s = 0.0, WaveRirInfo* info = nullptr);

// Same, on a prebuilt grid (the grid depends only on the scene, so callers
// evaluating many listeners build it once).
std::vector<ImpulseResponse> wave_rirs(const Scene& scene, const SimGrid& grid,
                                       const Vec3& listener,
                                       const std::vector<Vec3>& source_points,
                                       double f_max_hz = 500.0, double duration_s = 0.0,
                                       WaveRirInfo* info = nullptr);

}  // namespace echoplace
