#pragma once

#include <cstddef>
#include <vector>

namespace echoplace {

// Uniformly sampled pressure response. Sample h[n] is the continuous impulse
// amplitude arriving at t0_s + n/sample_rate; a unit impulse is one sample of
// value 1, so discrete convolution with a clip needs no dt factor.
struct ImpulseResponse {
  std::vector<double> samples;
  double sample_rate = 0.0;  // Hz
  double t0_s = 0.0;         // time of sample 0

  size_t size() const { return samples.size(); }
  double duration_s() const {
    return sample_rate > 0.0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
  double energy() const;
};

struct AudioClip {
  std::vector<double> samples;
  double sample_rate = 0.0;
};

// Windowed-sinc rate conversion (32-tap Hann). Fine for signals well below
// either Nyquist; that covers the <=500 Hz wave band this project resamples.
std::vector<double> resample(const std::vector<double>& in, double fs_in, double fs_out);

ImpulseResponse resample(const ImpulseResponse& in, double fs_out);

}  // namespace echoplace
