#pragma once

#include <array>
#include <optional>
#include <string>

#include "echoplace/audio.hpp"
#include "echoplace/bands.hpp"

namespace echoplace {

inline constexpr int kNumModFreqs = 14;
// Third-octave spaced modulation frequencies, 0.63 .. 12.5 Hz.
inline constexpr std::array<double, kNumModFreqs> kModFreqs = {
    0.63, 0.8, 1.0, 1.25, 1.6, 2.0, 2.5, 3.15, 4.0, 5.0, 6.3, 8.0, 10.0, 12.5};

struct MtfMatrix {
  // m[band][mod frequency], each in [0, 1].
  std::array<std::array<double, kNumModFreqs>, kNumBands> m{};
};

struct StiResult {
  double sti = 0.0;
  std::array<double, kNumBands> mti{};
  std::string rating;       // letter per the quality scale
  BandSpectrum snr_used;    // dB, +/-inf sentinels allowed
};

// Octave-band weighting and redundancy factors (male talker; female kept for
// reference). They satisfy sum(alpha) - sum(beta) == 1.
const std::array<double, kNumBands>& sti_alpha_male();
const std::array<double, 6>& sti_beta_male();
const std::array<double, kNumBands>& sti_alpha_female();
const std::array<double, 6>& sti_beta_female();
double sti_weight_residual();  // sum(alpha) - sum(beta) - 1, should be exactly 0

// Absolute speech reception threshold per band, dB SPL.
const std::array<double, kNumBands>& reception_threshold_db();

// Masking-to-signal ratio (dB) given the level of the band below, dB SPL.
double masking_slope_db(double level_below_db);

// Zero-phase 6th-order Butterworth octave filtering; output lengths equal the
// input. Throws ValidationError when fs cannot carry the 8 kHz band.
std::array<std::vector<double>, kNumBands> octave_filter(const ImpulseResponse& h);

struct SnrOptions {
  bool masking = true;
  bool threshold = true;
};

// Per-band SNR in dB: signal intensity over noise + masking + reception
// threshold. signal_bands are channel band energies (1 m free field == 1),
// speech_levels the source emission in dB SPL at 1 m, noise_bands received
// noise intensity relative to I0. Zero signal gives -inf; zero denominator
// with positive signal gives +inf.
BandSpectrum band_snr(const BandSpectrum& signal_bands, const BandSpectrum& noise_bands,
                      const BandSpectrum& speech_levels, const SnrOptions& opts = {});

// Modulation transfer ratios for one band-filtered response at the given SNR.
// The squared-envelope spectrum is integrated up to the point where the
// backward-integrated energy has fallen 60 dB.
std::array<double, kNumModFreqs> mtf(const std::vector<double>& h_band, double sample_rate,
                                     double snr_db);

StiResult sti_from_mtf(const MtfMatrix& m);

// Quality letter for an STI value in [0, 1].
std::string sti_rating(double sti);

// Quadratic T60-vs-volume fit for furnished rooms; errors when the model
// leaves its validity range (result <= 0).
double empirical_t60(double volume_m3);

// Regression STI from T60; clipped to [0, 1], *clipped set when clipping hit.
double empirical_sti(double t60_s, bool* clipped = nullptr);

// Full indirect pipeline: octave filter, band SNR, MTF, weighted STI.
struct NoiseContext {
  BandSpectrum noise_intensity;   // received, relative to I0
  BandSpectrum speech_level_db;   // source level at 1 m
};

StiResult sti_from_rir(const ImpulseResponse& h,
                       const std::optional<NoiseContext>& noise = std::nullopt);

}  // namespace echoplace
