// White-noise augmentation near the nominal band plus the segment ->
// focused-spectrogram chain used for classifier inputs.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "enf/error.hpp"
#include "enf/fft.hpp"
#include "enf/rng.hpp"
#include "enf/spectrogram.hpp"
#include "enf/types.hpp"

namespace enf {

// Adds white noise confined to [nominal-1, nominal+1] Hz: broadband Gaussian
// noise is bandpassed in the frequency domain (cosine-shaped passband, zero
// outside the band), then scaled so the in-band SNR equals snr_db exactly.
// snr_db = +infinity disables the augmentation (output equals input). Pure;
// the input is not modified.
inline SegmentSample augment_noise(const SegmentSample& seg, double snr_db, std::uint64_t seed,
                                   double band_halfwidth = kEnfBandHalfwidthHz) {
  SegmentSample out = seg;
  if (std::isinf(snr_db) && snr_db > 0) return out;
  require(seg.nominal.has_value(), "augment_noise needs a resolved nominal frequency");

  const std::size_t n = seg.samples.size();
  require(n > 0, "empty segment");
  const double f0 = hz(*seg.nominal);
  const double rate = static_cast<double>(seg.sample_rate);

  FftPlan plan(n);
  std::vector<cplx> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = {seg.samples[i], 0.0};
  std::vector<cplx> spect(n);
  plan.forward(buf.data(), spect.data());

  auto in_band = [&](std::size_t k) {
    const double f = static_cast<double>(k) * rate / static_cast<double>(n);
    return std::abs(f - f0) <= band_halfwidth + 1e-12;
  };

  // in-band signal power via Parseval (conjugate half counted twice)
  double sig_power = 0.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    if (in_band(k)) sig_power += 2.0 * std::norm(spect[k]);
  }
  sig_power /= static_cast<double>(n) * static_cast<double>(n);
  require(sig_power > 0.0, "segment has no energy in the nominal band");

  // Hann-shaped passband: unity at the nominal, zero at the band edges.
  // Keeps analysis-window leakage just beyond the band negligible.
  auto band_gain = [&](std::size_t k) {
    const double f = static_cast<double>(k) * rate / static_cast<double>(n);
    const double d = std::abs(f - f0);
    if (d > band_halfwidth) return 0.0;
    const double pi = 3.141592653589793238462643383279502884;
    const double c = std::cos(0.5 * pi * d / band_halfwidth);
    return c * c;
  };

  // broadband white noise, bandpassed in the frequency domain
  Rng rng(derive_seed(seed, 0x41554731));  // "AUG1"
  for (std::size_t i = 0; i < n; ++i) buf[i] = {rng.gaussian(), 0.0};
  std::vector<cplx> nf(n);
  plan.forward(buf.data(), nf.data());
  nf[0] = 0.0;
  if (n % 2 == 0) nf[n / 2] = 0.0;
  for (std::size_t k = 1; k < (n + 1) / 2; ++k) {
    const double g = band_gain(k);
    nf[k] *= g;
    nf[n - k] *= g;
  }
  std::vector<cplx> noise_t = plan.inverse(nf);

  double noise_power = 0.0;
  for (std::size_t i = 0; i < n; ++i) noise_power += noise_t[i].real() * noise_t[i].real();
  noise_power /= static_cast<double>(n);
  require(noise_power > 0.0, "degenerate noise draw");

  const double target_power = sig_power / std::pow(10.0, snr_db / 10.0);
  const double gain = std::sqrt(target_power / noise_power);
  for (std::size_t i = 0; i < n; ++i) out.samples[i] = seg.samples[i] + gain * noise_t[i].real();
  return out;
}

struct PreprocessOptions {
  SpecParams params;
  double halfwidth = kEnfBandHalfwidthHz;
  double augment_snr_db = 20.0;  // in-band SNR of the added training noise

  bool operator==(const PreprocessOptions&) const = default;
};

inline FocusedSpectrogram focused_of(const SegmentSample& seg, const PreprocessOptions& opts) {
  require(seg.nominal.has_value(), "segment has no nominal frequency");
  return focus(spectrogram(seg, opts.params), *seg.nominal, opts.halfwidth);
}

}  // namespace enf
