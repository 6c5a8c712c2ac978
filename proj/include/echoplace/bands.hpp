#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace echoplace {

// Octave bands 125 Hz .. 8 kHz; everything per-band in this project is 7 wide.
inline constexpr int kNumBands = 7;
inline constexpr std::array<double, kNumBands> kBandCenters = {125.0,  250.0,  500.0, 1000.0,
                                                               2000.0, 4000.0, 8000.0};

inline double band_lower_edge(int k) { return kBandCenters[k] / std::sqrt(2.0); }
inline double band_upper_edge(int k) { return kBandCenters[k] * std::sqrt(2.0); }

// Upper edge of the top band; octave filtering needs fs >= 2x this.
inline double max_band_edge() { return band_upper_edge(kNumBands - 1); }

enum class BandUnit { energy, decibel, coefficient };

struct BandSpectrum {
  std::array<double, kNumBands> values{};
  BandUnit unit = BandUnit::energy;

  double& operator[](int k) { return values[k]; }
  double operator[](int k) const { return values[k]; }

  static BandSpectrum flat(double v, BandUnit u = BandUnit::energy) {
    BandSpectrum s;
    s.values.fill(v);
    s.unit = u;
    return s;
  }
};

inline double db_to_intensity(double db) { return std::pow(10.0, db / 10.0); }
inline double intensity_to_db(double i) { return 10.0 * std::log10(i); }

}  // namespace echoplace
