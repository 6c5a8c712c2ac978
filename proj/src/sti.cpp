#include "echoplace/sti.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "echoplace/errors.hpp"
#include "echoplace/filters.hpp"

namespace echoplace {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925287;
}  // namespace

// IEC 60268-16 revised octave weighting/redundancy factors.
const std::array<double, kNumBands>& sti_alpha_male() {
  static const std::array<double, kNumBands> a = {0.085, 0.127, 0.230, 0.233,
                                                  0.309, 0.224, 0.173};
  return a;
}
const std::array<double, 6>& sti_beta_male() {
  static const std::array<double, 6> b = {0.085, 0.078, 0.065, 0.011, 0.047, 0.095};
  return b;
}
const std::array<double, kNumBands>& sti_alpha_female() {
  static const std::array<double, kNumBands> a = {0.000, 0.117, 0.223, 0.216,
                                                  0.328, 0.250, 0.194};
  return a;
}
const std::array<double, 6>& sti_beta_female() {
  static const std::array<double, 6> b = {0.000, 0.099, 0.066, 0.062, 0.025, 0.076};
  return b;
}

double sti_weight_residual() {
  double sum_a = 0.0, sum_b = 0.0;
  for (double a : sti_alpha_male()) sum_a += a;
  for (double b : sti_beta_male()) sum_b += b;
  return sum_a - sum_b - 1.0;
}

const std::array<double, kNumBands>& reception_threshold_db() {
  static const std::array<double, kNumBands> t = {46.0, 27.0, 12.0, 6.5, 7.5, 8.0, 12.0};
  return t;
}

double masking_slope_db(double level_below_db) {
  if (level_below_db < 63.0) return 0.5 * level_below_db - 65.0;
  if (level_below_db < 67.0) return 1.8 * level_below_db - 146.9;
  if (level_below_db < 100.0) return 0.5 * level_below_db - 59.8;
  return -10.0;
}

std::array<std::vector<double>, kNumBands> octave_filter(const ImpulseResponse& h) {
  if (h.sample_rate < 2.0 * max_band_edge())
    throw ValidationError("sample rate " + std::to_string(h.sample_rate) +
                          " Hz too low for the 8 kHz octave band");
  return octave_filter_bank(h.samples, h.sample_rate);
}

BandSpectrum band_snr(const BandSpectrum& signal_bands, const BandSpectrum& noise_bands,
                      const BandSpectrum& speech_levels, const SnrOptions& opts) {
  BandSpectrum snr;
  snr.unit = BandUnit::decibel;

  std::array<double, kNumBands> sig{}, total{};
  for (int k = 0; k < kNumBands; ++k) {
    sig[k] = db_to_intensity(speech_levels[k]) * signal_bands[k];
    total[k] = sig[k] + noise_bands[k];
  }

  for (int k = 0; k < kNumBands; ++k) {
    double denom = noise_bands[k];
    if (opts.threshold) denom += db_to_intensity(reception_threshold_db()[k]);
    if (opts.masking && k > 0 && total[k - 1] > 0.0) {
      const double level_below = intensity_to_db(total[k - 1]);
      denom += total[k - 1] * db_to_intensity(masking_slope_db(level_below));
    }
    if (sig[k] <= 0.0)
      snr[k] = -kInf;
    else if (denom <= 0.0)
      snr[k] = kInf;
    else
      snr[k] = 10.0 * std::log10(sig[k] / denom);
  }
  return snr;
}

std::array<double, kNumModFreqs> mtf(const std::vector<double>& h_band, double sample_rate,
                                     double snr_db) {
  std::array<double, kNumModFreqs> out{};

  double total = 0.0;
  for (double v : h_band) total += v * v;
  if (total <= 0.0 || snr_db == -kInf) return out;  // all-zero row

  // Truncate where the backward-integrated energy has dropped 60 dB.
  size_t n_end = h_band.size();
  {
    double tail = 0.0;
    const double floor_e = 1e-6 * total;
    for (size_t i = h_band.size(); i-- > 0;) {
      tail += h_band[i] * h_band[i];
      if (tail > floor_e) {
        n_end = i + 2 > h_band.size() ? h_band.size() : i + 2;
        break;
      }
    }
  }

  const double noise_factor = std::isinf(snr_db) ? 1.0 : 1.0 / (1.0 + std::pow(10.0, -snr_db / 10.0));

  double denom = 0.0;
  for (size_t i = 0; i < n_end; ++i) denom += h_band[i] * h_band[i];

  for (int j = 0; j < kNumModFreqs; ++j) {
    const double w = kTwoPi * kModFreqs[j] / sample_rate;
    std::complex<double> acc(0.0, 0.0);
    for (size_t i = 0; i < n_end; ++i) {
      const double e = h_band[i] * h_band[i];
      acc += e * std::complex<double>(std::cos(w * static_cast<double>(i)),
                                      -std::sin(w * static_cast<double>(i)));
    }
    out[j] = std::min(1.0, std::abs(acc) / denom * noise_factor);
  }
  return out;
}

StiResult sti_from_mtf(const MtfMatrix& m) {
  static const bool weights_ok = [] {
    if (std::fabs(sti_weight_residual()) > 1e-12)
      throw std::logic_error("STI weighting constants do not satisfy sum(alpha)-sum(beta)=1");
    return true;
  }();
  (void)weights_ok;

  StiResult r;
  const auto& alpha = sti_alpha_male();
  const auto& beta = sti_beta_male();

  for (int k = 0; k < kNumBands; ++k) {
    double acc = 0.0;
    for (int j = 0; j < kNumModFreqs; ++j) {
      const double mv = std::clamp(m.m[k][j], 0.0, 1.0);
      double snr_app;
      if (mv >= 1.0)
        snr_app = 15.0;
      else if (mv <= 0.0)
        snr_app = -15.0;
      else
        snr_app = std::clamp(10.0 * std::log10(mv / (1.0 - mv)), -15.0, 15.0);
      acc += (snr_app + 15.0) / 30.0;
    }
    r.mti[k] = acc / kNumModFreqs;
  }

  double sti = 0.0;
  for (int k = 0; k < kNumBands; ++k) sti += alpha[k] * r.mti[k];
  for (int k = 0; k < kNumBands - 1; ++k) sti -= beta[k] * std::sqrt(r.mti[k] * r.mti[k + 1]);
  r.sti = std::clamp(sti, 0.0, 1.0);
  r.rating = sti_rating(r.sti);
  r.snr_used = BandSpectrum::flat(kInf, BandUnit::decibel);
  return r;
}

std::string sti_rating(double sti) {
  if (sti < 0.0 || sti > 1.0) throw ValidationError("STI out of range [0,1]");
  if (sti > 0.76) return "A+";
  if (sti >= 0.74) return "A";
  if (sti >= 0.70) return "B";
  if (sti >= 0.66) return "C";
  if (sti >= 0.62) return "D";
  if (sti >= 0.58) return "E";
  if (sti >= 0.54) return "F";
  if (sti >= 0.50) return "G";
  if (sti >= 0.46) return "H";
  if (sti >= 0.42) return "I";
  if (sti >= 0.38) return "J";
  return "U";
}

double empirical_t60(double volume_m3) {
  if (volume_m3 <= 0.0) throw ModelValidityError("volume must be positive");
  const double t60 = -2e-5 * volume_m3 * volume_m3 + 0.0048 * volume_m3 + 0.255;
  if (t60 <= 0.0)
    throw ModelValidityError("volume " + std::to_string(volume_m3) +
                             " m^3 is outside the validity range of the T60 fit");
  return t60;
}

double empirical_sti(double t60_s, bool* clipped) {
  if (t60_s <= 0.0) throw ModelValidityError("T60 must be positive");
  const double sti = 0.5895 - 0.4422 * std::log10(t60_s);
  if (clipped) *clipped = sti < 0.0 || sti > 1.0;
  return std::clamp(sti, 0.0, 1.0);
}

StiResult sti_from_rir(const ImpulseResponse& h, const std::optional<NoiseContext>& noise) {
  const auto bands = octave_filter(h);

  BandSpectrum snr = BandSpectrum::flat(kInf, BandUnit::decibel);
  if (noise) {
    BandSpectrum energies;
    for (int k = 0; k < kNumBands; ++k) {
      double e = 0.0;
      for (double v : bands[k]) e += v * v;
      energies[k] = e;
    }
    snr = band_snr(energies, noise->noise_intensity, noise->speech_level_db);
  }

  MtfMatrix m;
  for (int k = 0; k < kNumBands; ++k) m.m[k] = mtf(bands[k], h.sample_rate, snr[k]);

  StiResult r = sti_from_mtf(m);
  r.snr_used = snr;
  return r;
}

}  // namespace echoplace
