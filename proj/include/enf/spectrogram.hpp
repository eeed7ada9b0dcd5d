// Magnitude STFT and nominal-band focusing.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "enf/error.hpp"
#include "enf/fft.hpp"
#include "enf/io_binary.hpp"
#include "enf/tensor.hpp"
#include "enf/types.hpp"

namespace enf {

enum class Taper : std::uint32_t { Rect = 0, Hann = 1 };

struct SpecParams {
  int window_len = 2000;  // 2 s at the canonical rate
  int hop = 1000;         // 1 s
  int fft_len = 4000;     // 0.25 Hz bins
  Taper window = Taper::Hann;

  bool operator==(const SpecParams&) const = default;
};

inline void validate(const SpecParams& p) {
  require(p.hop > 0 && p.window_len > 0 && p.fft_len > 0, "SpecParams must be positive");
  require(p.hop <= p.window_len && p.window_len <= p.fft_len,
          "need hop <= window_len <= fft_len");
}

// Frequency x time magnitude grid with uniform axes.
struct Spectrogram {
  Tensor2 mags;      // rows = freq bins, cols = frames
  double freq0 = 0;  // Hz of row 0
  double freq_step = 0;
  double time0 = 0;  // seconds of column 0 (frame center)
  double time_step = 0;
  SpecParams params;

  double freq_at(std::size_t row) const { return freq0 + freq_step * static_cast<double>(row); }
  double time_at(std::size_t col) const { return time0 + time_step * static_cast<double>(col); }
};

struct FocusedSpectrogram {
  Tensor2 mags;  // rows restricted to the nominal band, max-normalized to [0,1]
  double freq0 = 0;
  double freq_step = 0;
  double time0 = 0;
  double time_step = 0;
  NominalFreq nominal = NominalFreq::Hz50;
  double halfwidth = kEnfBandHalfwidthHz;
  SpecParams params;
};

inline std::vector<double> make_taper(Taper t, int len) {
  std::vector<double> w(static_cast<std::size_t>(len), 1.0);
  if (t == Taper::Hann) {
    const double pi = 3.141592653589793238462643383279502884;
    for (int n = 0; n < len; ++n) {
      w[static_cast<std::size_t>(n)] = 0.5 - 0.5 * std::cos(2.0 * pi * n / len);
    }
  }
  return w;
}

inline std::size_t frame_count(std::size_t n_samples, const SpecParams& p) {
  return 1 + (n_samples - static_cast<std::size_t>(p.window_len)) /
                 static_cast<std::size_t>(p.hop);
}

inline Spectrogram spectrogram(const SegmentSample& seg, const SpecParams& params = {}) {
  validate(params);
  require(seg.samples.size() >= static_cast<std::size_t>(params.window_len),
          "segment shorter than the analysis window");

  const std::size_t frames = frame_count(seg.samples.size(), params);
  const std::size_t bins = static_cast<std::size_t>(params.fft_len) / 2 + 1;
  const std::vector<double> taper = make_taper(params.window, params.window_len);

  Spectrogram spec;
  spec.params = params;
  spec.mags = Tensor2(bins, frames);
  spec.freq0 = 0.0;
  spec.freq_step = static_cast<double>(seg.sample_rate) / params.fft_len;
  spec.time0 = 0.5 * params.window_len / seg.sample_rate;
  spec.time_step = static_cast<double>(params.hop) / seg.sample_rate;

  FftPlan plan(static_cast<std::size_t>(params.fft_len));
  std::vector<cplx> frame(static_cast<std::size_t>(params.fft_len));
  std::vector<cplx> out(static_cast<std::size_t>(params.fft_len));
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t start = f * static_cast<std::size_t>(params.hop);
    for (int i = 0; i < params.window_len; ++i) {
      frame[static_cast<std::size_t>(i)] = {
          seg.samples[start + static_cast<std::size_t>(i)] * taper[static_cast<std::size_t>(i)],
          0.0};
    }
    for (int i = params.window_len; i < params.fft_len; ++i) {
      frame[static_cast<std::size_t>(i)] = {0.0, 0.0};
    }
    plan.forward(frame.data(), out.data());
    for (std::size_t b = 0; b < bins; ++b) spec.mags.at(b, f) = std::abs(out[b]);
  }
  return spec;
}

// Restricts the spectrogram to |f - nominal| <= halfwidth and max-normalizes
// the band to [0,1]. Row count depends only on (params, halfwidth), so the
// classifier input shape is constant across segments.
inline FocusedSpectrogram focus(const Spectrogram& spec, NominalFreq nominal,
                                double halfwidth = kEnfBandHalfwidthHz) {
  require(halfwidth > 0.0, "halfwidth must be positive");
  const double f0 = hz(nominal);
  const long center = std::lround((f0 - spec.freq0) / spec.freq_step);
  const long k = static_cast<long>(std::floor(halfwidth / spec.freq_step + 1e-9));
  const long lo = center - k, hi = center + k;
  require(lo >= 0 && hi < static_cast<long>(spec.mags.rows),
          "focus band outside the spectrogram's frequency axis");

  FocusedSpectrogram out;
  out.params = spec.params;
  out.nominal = nominal;
  out.halfwidth = halfwidth;
  out.freq0 = spec.freq_at(static_cast<std::size_t>(lo));
  out.freq_step = spec.freq_step;
  out.time0 = spec.time0;
  out.time_step = spec.time_step;

  const std::size_t rows = static_cast<std::size_t>(hi - lo + 1);
  out.mags = Tensor2(rows, spec.mags.cols);
  double band_max = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < spec.mags.cols; ++c) {
      const double v = spec.mags.at(static_cast<std::size_t>(lo) + r, c);
      out.mags.at(r, c) = v;
      band_max = std::max(band_max, v);
    }
  }
  if (band_max > 0.0) {
    for (auto& v : out.mags.v) v /= band_max;
  }
  return out;
}

// --- ENFSPC01 focused-spectrogram container --------------------------------

inline void write_focused_file(const std::string& path, const FocusedSpectrogram& s) {
  BinaryWriter w(path);
  w.magic("ENFSPC01");
  w.u32(static_cast<std::uint32_t>(s.mags.rows));
  w.u32(static_cast<std::uint32_t>(s.mags.cols));
  w.f64(s.freq0);
  w.f64(s.freq_step);
  w.f64(s.time0);
  w.f64(s.time_step);
  w.u32(static_cast<std::uint32_t>(s.params.window_len));
  w.u32(static_cast<std::uint32_t>(s.params.hop));
  w.u32(static_cast<std::uint32_t>(s.params.fft_len));
  w.u32(static_cast<std::uint32_t>(s.params.window));
  w.u32(static_cast<std::uint32_t>(s.nominal));
  w.f64(s.halfwidth);
  w.f64_array(s.mags.v);
  w.close();
}

inline FocusedSpectrogram read_focused_file(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic("ENFSPC01");
  FocusedSpectrogram s;
  const std::uint32_t rows = r.u32();
  const std::uint32_t cols = r.u32();
  s.freq0 = r.f64();
  s.freq_step = r.f64();
  s.time0 = r.f64();
  s.time_step = r.f64();
  s.params.window_len = static_cast<int>(r.u32());
  s.params.hop = static_cast<int>(r.u32());
  s.params.fft_len = static_cast<int>(r.u32());
  s.params.window = static_cast<Taper>(r.u32());
  s.nominal = r.u32() == 60 ? NominalFreq::Hz60 : NominalFreq::Hz50;
  s.halfwidth = r.f64();
  s.mags = Tensor2(rows, cols);
  s.mags.v = r.f64_array(static_cast<std::size_t>(rows) * cols);
  return s;
}

}  // namespace enf
