#include "echoplace/filters.hpp"

#include <cmath>
#include <stdexcept>

#include "echoplace/fft.hpp"

namespace echoplace {

double butterworth_bandpass_gain(double f, double f_lo, double f_hi) {
  if (f <= 0.0) return 0.0;
  const double w = (f * f - f_lo * f_hi) / (f * (f_hi - f_lo));
  const double w6 = std::pow(w * w, 3);
  return 1.0 / std::sqrt(1.0 + w6);
}

std::vector<double> apply_gain_filter(const std::vector<double>& x, double fs,
                                      const std::function<double(double)>& gain) {
  if (x.empty()) return {};
  const size_t n = next_pow2(std::max<size_t>(2 * x.size(), 16));
  auto spec = rfft(x, n);
  for (size_t k = 0; k < spec.size(); ++k) spec[k] *= gain(fft_bin_hz(k, n, fs));
  auto y = irfft(spec, n);
  y.resize(x.size());
  return y;
}

std::array<std::vector<double>, kNumBands> octave_filter_bank(const std::vector<double>& x,
                                                              double fs) {
  std::array<std::vector<double>, kNumBands> out;
  if (x.empty()) return out;
  const size_t n = next_pow2(std::max<size_t>(2 * x.size(), 16));
  const auto spec = rfft(x, n);
  for (int b = 0; b < kNumBands; ++b) {
    const double lo = band_lower_edge(b);
    const double hi = band_upper_edge(b);
    auto band_spec = spec;
    for (size_t k = 0; k < band_spec.size(); ++k)
      band_spec[k] *= butterworth_bandpass_gain(fft_bin_hz(k, n, fs), lo, hi);
    auto y = irfft(band_spec, n);
    y.resize(x.size());
    out[b] = std::move(y);
  }
  return out;
}

double synthesis_band_gain(int band, double f) {
  double g = 1.0;
  for (int e = 0; e < band; ++e) g *= lr4_high_gain(f, band_upper_edge(e));
  if (band < kNumBands - 1) g *= lr4_low_gain(f, band_upper_edge(band));
  return g;
}

std::vector<double> synthesis_band_filter(const std::vector<double>& x, double fs, int band) {
  return apply_gain_filter(x, fs, [band](double f) { return synthesis_band_gain(band, f); });
}

}  // namespace echoplace
