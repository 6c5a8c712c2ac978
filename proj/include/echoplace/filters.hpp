#pragma once

#include <array>
#include <functional>
#include <vector>

#include "echoplace/audio.hpp"
#include "echoplace/bands.hpp"

namespace echoplace {

// Squared 2nd-order Butterworth magnitudes (the two crossover branches).
// Complementary by construction: lr4_low + lr4_high == 1 at every frequency.
inline double lr4_low_gain(double f, double fc) {
  const double r = f / fc;
  const double r4 = r * r * r * r;
  return 1.0 / (1.0 + r4);
}
inline double lr4_high_gain(double f, double fc) {
  const double r = f / fc;
  const double r4 = r * r * r * r;
  return r4 / (1.0 + r4);
}

// 6th-order Butterworth bandpass magnitude (3rd-order prototype).
double butterworth_bandpass_gain(double f, double f_lo, double f_hi);

// Applies a real frequency-domain gain with zero phase. FFT size is the next
// power of two >= 2x the input so wrapped pre-ring falls in discarded padding;
// output length equals input length.
std::vector<double> apply_gain_filter(const std::vector<double>& x, double fs,
                                      const std::function<double(double)>& gain);

// Analysis bank: 6th-order Butterworth bandpass per octave band, zero phase.
std::array<std::vector<double>, kNumBands> octave_filter_bank(const std::vector<double>& x,
                                                              double fs);

// Synthesis bank gain for band k: a telescoped chain of LR4 splits at the
// octave band edges. Sums to exactly 1 across bands, so flat-spectrum material
// passes through reconstruction unchanged.
double synthesis_band_gain(int band, double f);

// Filters x into synthesis band k (zero phase).
std::vector<double> synthesis_band_filter(const std::vector<double>& x, double fs, int band);

}  // namespace echoplace
