#include "echoplace/audio.hpp"

#include <cmath>
#include <stdexcept>

namespace echoplace {

double ImpulseResponse::energy() const {
  double e = 0.0;
  for (double s : samples) e += s * s;
  return e;
}

namespace {

constexpr int kHalfTaps = 16;
constexpr double kPi = 3.14159265358979323846;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

}  // namespace

std::vector<double> resample(const std::vector<double>& in, double fs_in, double fs_out) {
  if (fs_in <= 0.0 || fs_out <= 0.0) throw std::invalid_argument("resample: bad sample rate");
  if (in.empty() || fs_in == fs_out) return in;

  const double ratio = fs_out / fs_in;
  const size_t n_out = static_cast<size_t>(std::ceil(static_cast<double>(in.size()) * ratio));
  // Cutoff in input-sample units: at 95% of the narrower Nyquist.
  const double c = 0.95 * std::min(1.0, ratio);

  std::vector<double> out(n_out, 0.0);
  for (size_t m = 0; m < n_out; ++m) {
    const double center = static_cast<double>(m) / ratio;
    const int lo = static_cast<int>(std::floor(center)) - kHalfTaps + 1;
    const int hi = static_cast<int>(std::floor(center)) + kHalfTaps;
    double acc = 0.0;
    for (int n = std::max(lo, 0); n <= std::min(hi, static_cast<int>(in.size()) - 1); ++n) {
      const double u = center - static_cast<double>(n);
      const double w = 0.5 * (1.0 + std::cos(kPi * u / kHalfTaps));  // Hann
      acc += in[static_cast<size_t>(n)] * c * sinc(c * u) * w;
    }
    out[m] = acc;
  }
  return out;
}

ImpulseResponse resample(const ImpulseResponse& in, double fs_out) {
  ImpulseResponse out;
  out.samples = resample(in.samples, in.sample_rate, fs_out);
  out.sample_rate = fs_out;
  out.t0_s = in.t0_s;
  return out;
}

}  // namespace echoplace
