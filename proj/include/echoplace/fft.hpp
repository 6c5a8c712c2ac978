#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace echoplace {

// Real <-> half-complex transforms backed by FFTW. Plan creation is serialized
// internally; calls are safe from multiple threads.

size_t next_pow2(size_t n);

// Forward r2c: returns n/2+1 bins for a real input of length n (n padded with
// zeros up to `n` if in.size() < n).
std::vector<std::complex<double>> rfft(const std::vector<double>& in, size_t n);

// Inverse c2r for a spectrum of n/2+1 bins; returns n real samples (already
// scaled by 1/n).
std::vector<double> irfft(const std::vector<std::complex<double>>& spec, size_t n);

inline double fft_bin_hz(size_t bin, size_t n, double fs) {
  return static_cast<double>(bin) * fs / static_cast<double>(n);
}

}  // namespace echoplace
