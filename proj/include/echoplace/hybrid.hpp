#pragma once

#include "echoplace/audio.hpp"

namespace echoplace {

// Combines the wave-band and geometric-band responses through a 4th-order
// Linkwitz-Riley crossover applied as zero-phase magnitude filters:
// H(f) = B2_low(H_wave) + B2_high(H_geo). The branch magnitudes sum to exactly
// one, so identical inputs pass through unchanged. Inputs must share a sample
// rate; differing t0 offsets are aligned by integer-sample shift.
ImpulseResponse crossover_combine(const ImpulseResponse& h_wave, const ImpulseResponse& h_geo,
                                  double crossover_hz = 500.0);

// Linear convolution of a response with a source clip (clip already at the
// RIR's sample rate); output length len(h) + len(clip) - 1.
std::vector<double> convolve_clip(const ImpulseResponse& h, const std::vector<double>& clip);

}  // namespace echoplace
