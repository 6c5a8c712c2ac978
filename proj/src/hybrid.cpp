#include "echoplace/hybrid.hpp"

#include <algorithm>
#include <cmath>

#include "echoplace/errors.hpp"
#include "echoplace/fft.hpp"
#include "echoplace/filters.hpp"

namespace echoplace {

ImpulseResponse crossover_combine(const ImpulseResponse& h_wave, const ImpulseResponse& h_geo,
                                  double crossover_hz) {
  if (h_wave.sample_rate != h_geo.sample_rate)
    throw ValidationError("crossover_combine: sample rates differ (" +
                          std::to_string(h_wave.sample_rate) + " vs " +
                          std::to_string(h_geo.sample_rate) + ")");
  const double fs = h_wave.sample_rate;

  // Align time origins on the earlier t0 by shifting the later one.
  const double t0 = std::min(h_wave.t0_s, h_geo.t0_s);
  const size_t shift_w = static_cast<size_t>(std::llround((h_wave.t0_s - t0) * fs));
  const size_t shift_g = static_cast<size_t>(std::llround((h_geo.t0_s - t0) * fs));
  const size_t len_w = h_wave.size() + shift_w;
  const size_t len_g = h_geo.size() + shift_g;
  const size_t out_len = std::max(len_w, len_g);

  const size_t n = next_pow2(std::max<size_t>(len_w + len_g, 16));

  std::vector<double> buf_w(n, 0.0), buf_g(n, 0.0);
  std::copy(h_wave.samples.begin(), h_wave.samples.end(), buf_w.begin() + shift_w);
  std::copy(h_geo.samples.begin(), h_geo.samples.end(), buf_g.begin() + shift_g);

  auto spec_w = rfft(buf_w, n);
  const auto spec_g = rfft(buf_g, n);
  for (size_t k = 0; k < spec_w.size(); ++k) {
    const double f = fft_bin_hz(k, n, fs);
    spec_w[k] = spec_w[k] * lr4_low_gain(f, crossover_hz) +
                spec_g[k] * lr4_high_gain(f, crossover_hz);
  }
  auto mixed = irfft(spec_w, n);
  mixed.resize(out_len);

  ImpulseResponse out;
  out.samples = std::move(mixed);
  out.sample_rate = fs;
  out.t0_s = t0;
  return out;
}

std::vector<double> convolve_clip(const ImpulseResponse& h, const std::vector<double>& clip) {
  if (clip.empty()) throw ValidationError("convolve_clip: empty clip");
  if (h.samples.empty()) return {};
  const size_t out_len = h.size() + clip.size() - 1;
  const size_t n = next_pow2(std::max<size_t>(out_len, 16));

  auto spec_h = rfft(h.samples, n);
  const auto spec_c = rfft(clip, n);
  for (size_t k = 0; k < spec_h.size(); ++k) spec_h[k] *= spec_c[k];
  auto y = irfft(spec_h, n);
  y.resize(out_len);
  return y;
}

}  // namespace echoplace
