#include "echoplace/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace echoplace {

namespace {
std::mutex g_plan_mutex;  // FFTW planner is not thread-safe
}

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<std::complex<double>> rfft(const std::vector<double>& in, size_t n) {
  if (n == 0) throw std::invalid_argument("rfft: zero length");
  std::vector<double> buf(n, 0.0);
  std::memcpy(buf.data(), in.data(), std::min(in.size(), n) * sizeof(double));
  std::vector<std::complex<double>> out(n / 2 + 1);

  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf.data(),
                                reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& spec, size_t n) {
  if (n == 0 || spec.size() != n / 2 + 1) throw std::invalid_argument("irfft: bad spectrum size");
  std::vector<std::complex<double>> buf = spec;  // c2r destroys its input
  std::vector<double> out(n);

  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(buf.data()),
                                out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    fftw_destroy_plan(plan);
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= inv;
  return out;
}

}  // namespace echoplace
