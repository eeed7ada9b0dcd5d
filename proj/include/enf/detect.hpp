// Test-time resolution of a recording's nominal frequency and type.
//
// Nominal detection compares full-recording FFT energy at the first harmonic
// (2x nominal: 100 Hz vs 120 Hz) of the two candidates. Type detection
// estimates the in-band SNR at the nominal and thresholds it: power-circuit
// recordings carry a far stronger ENF trace than microphone recordings.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "enf/error.hpp"
#include "enf/fft.hpp"
#include "enf/types.hpp"

namespace enf {

constexpr double kDefaultSnrThresholdDb = 15.0;
constexpr double kNoiseFloorMargin = 3.0;

struct DetectReport {
  NominalFreq nominal = NominalFreq::Hz50;
  double nominal_margin = 1.0;  // winner / loser band energy, >= 1
  RecType rec_type = RecType::Audio;
  double snr_estimate_db = 0.0;
  bool tie_broken = false;
};

namespace detect_detail {

struct BandEnergy {
  double energy = 0.0;
  std::size_t bins = 0;
};

inline BandEnergy band_energy(const std::vector<double>& pow_bins, double bin_hz, double lo,
                              double hi) {
  BandEnergy be;
  const std::size_t k_lo = static_cast<std::size_t>(std::ceil(lo / bin_hz - 1e-9));
  const std::size_t k_hi =
      std::min(pow_bins.size() - 1, static_cast<std::size_t>(std::floor(hi / bin_hz + 1e-9)));
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    be.energy += pow_bins[k];
    ++be.bins;
  }
  return be;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid) - 1, v.end());
    m = 0.5 * (m + v[mid - 1]);
  }
  return m;
}

inline std::vector<double> power_spectrum(const Recording& rec) {
  FftPlan plan(rec.samples.size());
  std::vector<cplx> half = plan.forward_real_half(rec.samples);
  std::vector<double> p(half.size());
  for (std::size_t i = 0; i < half.size(); ++i) p[i] = std::norm(half[i]);
  return p;
}

}  // namespace detect_detail

// Returns the detected nominal and the winner/loser energy ratio. Throws
// "no ENF detected" when both candidate bands sit at the noise floor.
inline std::pair<NominalFreq, double> detect_nominal(const Recording& rec,
                                                     bool* tie_flag = nullptr) {
  using namespace detect_detail;
  require(rec.duration_s() >= 60.0, "detect_nominal needs at least 60 s of signal");

  const std::vector<double> p = power_spectrum(rec);
  const double bin_hz =
      static_cast<double>(rec.sample_rate) / static_cast<double>(rec.samples.size());

  const BandEnergy e50 = band_energy(p, bin_hz, 99.0, 101.0);   // first harmonic of 50
  const BandEnergy e60 = band_energy(p, bin_hz, 119.0, 121.0);  // first harmonic of 60

  // noise floor from the surrounding region, candidate bands excluded
  std::vector<double> floor_bins;
  const std::size_t k_lo = static_cast<std::size_t>(std::ceil(80.0 / bin_hz));
  const std::size_t k_hi =
      std::min(p.size() - 1, static_cast<std::size_t>(std::floor(140.0 / bin_hz)));
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    const double f = static_cast<double>(k) * bin_hz;
    const bool in50 = f >= 99.0 && f <= 101.0;
    const bool in60 = f >= 119.0 && f <= 121.0;
    if (!in50 && !in60) floor_bins.push_back(p[k]);
  }
  const double floor_per_bin = median(floor_bins);
  const double floor50 = kNoiseFloorMargin * floor_per_bin * static_cast<double>(e50.bins);
  const double floor60 = kNoiseFloorMargin * floor_per_bin * static_cast<double>(e60.bins);
  if (e50.energy < floor50 && e60.energy < floor60) {
    throw Error("no ENF detected");
  }

  if (tie_flag) *tie_flag = (e50.energy == e60.energy);
  if (e50.energy >= e60.energy) {
    return {NominalFreq::Hz50, e60.energy > 0 ? e50.energy / e60.energy : 1.0};
  }
  return {NominalFreq::Hz60, e50.energy > 0 ? e60.energy / e50.energy : 1.0};
}

// In-band SNR estimate: energy in [nominal +/- 1] Hz over the median per-bin
// energy of the flanking bands scaled to the same width. Power iff >= T.
inline std::pair<RecType, double> detect_rectype(const Recording& rec, NominalFreq nominal,
                                                 double snr_threshold_db = kDefaultSnrThresholdDb) {
  using namespace detect_detail;
  const std::vector<double> p = power_spectrum(rec);
  const double bin_hz =
      static_cast<double>(rec.sample_rate) / static_cast<double>(rec.samples.size());
  const double f0 = hz(nominal);

  const BandEnergy sig = band_energy(p, bin_hz, f0 - 1.0, f0 + 1.0);
  std::vector<double> flank;
  auto collect = [&](double lo, double hi) {
    const std::size_t k_lo = static_cast<std::size_t>(std::ceil(lo / bin_hz));
    const std::size_t k_hi =
        std::min(p.size() - 1, static_cast<std::size_t>(std::floor(hi / bin_hz)));
    for (std::size_t k = k_lo; k <= k_hi; ++k) flank.push_back(p[k]);
  };
  collect(f0 - 5.0, f0 - 2.0);
  collect(f0 + 2.0, f0 + 5.0);

  const double floor_per_bin = median(flank);
  double snr_db;
  if (floor_per_bin <= 0.0 || sig.bins == 0) {
    snr_db = sig.energy > 0.0 ? 200.0 : 0.0;  // silent flanks: saturate
  } else {
    snr_db = 10.0 * std::log10(sig.energy / (floor_per_bin * static_cast<double>(sig.bins)));
  }
  const RecType t = snr_db >= snr_threshold_db ? RecType::Power : RecType::Audio;
  return {t, snr_db};
}

inline DetectReport detect(const Recording& rec,
                           double snr_threshold_db = kDefaultSnrThresholdDb) {
  DetectReport rep;
  auto [nominal, margin] = detect_nominal(rec, &rep.tie_broken);
  rep.nominal = nominal;
  rep.nominal_margin = margin;
  auto [rtype, snr] = detect_rectype(rec, nominal, snr_threshold_db);
  rep.rec_type = rtype;
  rep.snr_estimate_db = snr;
  return rep;
}

}  // namespace enf
