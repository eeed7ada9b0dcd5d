#include "enf/preprocess.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <vector>

#include "enf/fft.hpp"
#include "enf/rng.hpp"
#include "enf/spectrogram.hpp"

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enf::SegmentSample tone_segment(double freq, double seconds = 300.0, double amp = 0.5) {
  enf::SegmentSample s;
  s.sample_rate = enf::kCanonicalRate;
  s.nominal = freq < 55.0 ? enf::NominalFreq::Hz50 : enf::NominalFreq::Hz60;
  const double pi = 3.141592653589793238462643383279502884;
  s.samples.resize(static_cast<std::size_t>(seconds * enf::kCanonicalRate));
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    s.samples[i] = amp * std::sin(2.0 * pi * freq * static_cast<double>(i) / s.sample_rate);
  }
  return s;
}

double rms(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

TEST(Augment, InfiniteSnrIsIdentity) {
  auto seg = tone_segment(50.0);
  auto out = enf::augment_noise(seg, kInf, 42);
  ASSERT_EQ(out.samples.size(), seg.samples.size());
  for (std::size_t i = 0; i < seg.samples.size(); ++i) ASSERT_EQ(out.samples[i], seg.samples[i]);
}

TEST(Augment, AddedNoiseIsBandConfined) {
  auto seg = tone_segment(50.0);
  auto out = enf::augment_noise(seg, 20.0, 7);
  std::vector<double> added(seg.samples.size());
  for (std::size_t i = 0; i < added.size(); ++i) added[i] = out.samples[i] - seg.samples[i];

  enf::FftPlan plan(added.size());
  auto half = plan.forward_real_half(added);
  const double bin_hz = static_cast<double>(seg.sample_rate) / added.size();
  double in_band = 0.0, out_band = 0.0;
  for (std::size_t k = 1; k + 1 < half.size(); ++k) {
    const double f = static_cast<double>(k) * bin_hz;
    const double e = std::norm(half[k]);
    if (std::abs(f - 50.0) <= 1.0)
      in_band += e;
    else
      out_band += e;
  }
  ASSERT_GT(in_band, 0.0);
  EXPECT_LE(out_band, 0.01 * in_band);
}

TEST(Augment, SeedsChangeWaveformNotRms) {
  auto seg = tone_segment(60.0);
  auto a = enf::augment_noise(seg, 20.0, 1);
  auto b = enf::augment_noise(seg, 20.0, 2);
  std::vector<double> na(seg.samples.size()), nb(seg.samples.size());
  for (std::size_t i = 0; i < na.size(); ++i) {
    na[i] = a.samples[i] - seg.samples[i];
    nb[i] = b.samples[i] - seg.samples[i];
  }
  EXPECT_GT(rms(na), 0.0);
  EXPECT_NEAR(rms(na) / rms(nb), 1.0, 0.01);
  std::size_t differs = 0;
  for (std::size_t i = 0; i < na.size(); ++i) differs += na[i] != nb[i];
  EXPECT_GT(differs, na.size() / 2);
}

TEST(Augment, ConfiguredInBandSnrIsExact) {
  auto seg = tone_segment(50.0);
  auto out = enf::augment_noise(seg, 20.0, 3);
  std::vector<double> added(seg.samples.size());
  for (std::size_t i = 0; i < added.size(); ++i) added[i] = out.samples[i] - seg.samples[i];
  // tone power is amp^2/2 and lies fully in band
  const double sig_power = 0.5 * 0.5 * 0.5;
  const double noise_power = rms(added) * rms(added);
  EXPECT_NEAR(10.0 * std::log10(sig_power / noise_power), 20.0, 0.05);
}

TEST(Augment, SilentSegmentRejected) {
  enf::SegmentSample s;
  s.sample_rate = enf::kCanonicalRate;
  s.nominal = enf::NominalFreq::Hz50;
  s.samples.assign(10000, 0.0);
  EXPECT_THROW(enf::augment_noise(s, 20.0, 1), enf::Error);
}

TEST(Augment, PurityOriginalUntouched) {
  auto seg = tone_segment(50.0);
  auto copy = seg.samples;
  (void)enf::augment_noise(seg, 10.0, 5);
  EXPECT_EQ(seg.samples, copy);
}

TEST(Spectrogram, DefaultParamsGive299FramesAndQuarterHzBins) {
  auto seg = tone_segment(50.0);
  auto spec = enf::spectrogram(seg);
  EXPECT_EQ(spec.mags.cols, 299u);
  EXPECT_EQ(spec.mags.rows, 2001u);  // fft/2 + 1
  EXPECT_DOUBLE_EQ(spec.freq_step, 0.25);
}

TEST(Spectrogram, FrameAndBinArithmeticMatchesClosedForms) {
  enf::Rng rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    enf::SpecParams p;
    p.hop = 100 + static_cast<int>(rng.uniform_int(900));
    p.window_len = p.hop + static_cast<int>(rng.uniform_int(2000));
    p.fft_len = p.window_len + static_cast<int>(rng.uniform_int(1000));
    const std::size_t n =
        static_cast<std::size_t>(p.window_len) + 1000 + rng.uniform_int(20000);
    enf::SegmentSample seg;
    seg.sample_rate = enf::kCanonicalRate;
    seg.nominal = enf::NominalFreq::Hz50;
    seg.samples.assign(n, 0.01);
    auto spec = enf::spectrogram(seg, p);
    EXPECT_EQ(spec.mags.cols, 1 + (n - static_cast<std::size_t>(p.window_len)) /
                                      static_cast<std::size_t>(p.hop));
    EXPECT_EQ(spec.mags.rows, static_cast<std::size_t>(p.fft_len) / 2 + 1);
    EXPECT_DOUBLE_EQ(spec.freq_step,
                     static_cast<double>(enf::kCanonicalRate) / p.fft_len);
  }
}

TEST(Spectrogram, PureToneArgmaxAtToneBinEveryFrame) {
  auto seg = tone_segment(50.0, 30.0);
  auto spec = enf::spectrogram(seg);
  for (std::size_t c = 0; c < spec.mags.cols; ++c) {
    std::size_t argmax = 0;
    for (std::size_t r = 1; r < spec.mags.rows; ++r) {
      if (spec.mags.at(r, c) > spec.mags.at(argmax, c)) argmax = r;
    }
    ASSERT_DOUBLE_EQ(spec.freq_at(argmax), 50.0) << "frame " << c;
  }
}

TEST(Spectrogram, AllZeroInputGivesAllZeroMagnitudes) {
  enf::SegmentSample seg;
  seg.sample_rate = enf::kCanonicalRate;
  seg.samples.assign(10000, 0.0);
  auto spec = enf::spectrogram(seg);
  for (double v : spec.mags.v) ASSERT_EQ(v, 0.0);
}

TEST(Spectrogram, TooShortSegmentThrows) {
  enf::SegmentSample seg;
  seg.sample_rate = enf::kCanonicalRate;
  seg.samples.assign(1999, 0.1);
  EXPECT_THROW(enf::spectrogram(seg), enf::Error);
}

TEST(Focus, NineRowsAtDefaultResolution) {
  auto seg = tone_segment(50.0, 60.0);
  auto f = enf::focus(enf::spectrogram(seg), enf::NominalFreq::Hz50, 1.0);
  EXPECT_EQ(f.mags.rows, 9u);
  EXPECT_DOUBLE_EQ(f.freq0, 49.0);
  EXPECT_DOUBLE_EQ(f.freq_step, 0.25);
}

TEST(Focus, NominalToneLightsTheCenterRow) {
  auto seg = tone_segment(60.0, 60.0);
  auto f = enf::focus(enf::spectrogram(seg), enf::NominalFreq::Hz60, 1.0);
  const std::size_t center = f.mags.rows / 2;
  // frames differ only at rounding level; the center row dominates every frame
  for (std::size_t c = 0; c < f.mags.cols; ++c) {
    ASSERT_GT(f.mags.at(center, c), 0.999999);
    for (std::size_t r = 0; r < f.mags.rows; ++r) {
      if (r != center) ASSERT_LT(f.mags.at(r, c), f.mags.at(center, c));
    }
  }
  EXPECT_DOUBLE_EQ(f.mags.max_value(), 1.0);
}

TEST(Focus, MaxNormalizationHitsOneForNonzeroInput) {
  auto seg = tone_segment(50.0, 30.0, 0.001);
  auto f = enf::focus(enf::spectrogram(seg), enf::NominalFreq::Hz50, 1.0);
  EXPECT_DOUBLE_EQ(f.mags.max_value(), 1.0);
}

TEST(Focus, IsAPureRestrictionOfTheParent) {
  enf::SegmentSample seg;
  seg.sample_rate = enf::kCanonicalRate;
  seg.nominal = enf::NominalFreq::Hz50;
  enf::Rng rng(4);
  seg.samples.resize(30000);
  for (auto& v : seg.samples) v = rng.gaussian(0.0, 0.1);
  auto spec = enf::spectrogram(seg);
  auto f = enf::focus(spec, enf::NominalFreq::Hz50, 1.0);

  // locate band max in the parent
  const long center = std::lround(50.0 / spec.freq_step);
  const long k = static_cast<long>(1.0 / spec.freq_step);
  double band_max = 0.0;
  for (long r = center - k; r <= center + k; ++r) {
    for (std::size_t c = 0; c < spec.mags.cols; ++c) {
      band_max = std::max(band_max, spec.mags.at(static_cast<std::size_t>(r), c));
    }
  }
  for (std::size_t r = 0; r < f.mags.rows; ++r) {
    for (std::size_t c = 0; c < f.mags.cols; ++c) {
      const double parent = spec.mags.at(static_cast<std::size_t>(center - k) + r, c);
      ASSERT_DOUBLE_EQ(f.mags.at(r, c), parent / band_max);
    }
  }
}

TEST(Focus, BandOutsideAxisThrows) {
  auto seg = tone_segment(50.0, 30.0);
  auto spec = enf::spectrogram(seg);
  EXPECT_THROW(enf::focus(spec, enf::NominalFreq::Hz50, 600.0), enf::Error);
}

TEST(Preprocess, AugmentationLeavesOutOfBandBinsNearlyUnchanged) {
  auto seg = tone_segment(50.0, 120.0);
  auto aug = enf::augment_noise(seg, 20.0, 13);
  auto clean_spec = enf::spectrogram(seg);
  auto aug_spec = enf::spectrogram(aug);
  const double clean_max = clean_spec.mags.max_value();
  for (std::size_t r = 0; r < clean_spec.mags.rows; ++r) {
    const double f = clean_spec.freq_at(r);
    if (std::abs(f - 50.0) <= 1.2) continue;
    for (std::size_t c = 0; c < clean_spec.mags.cols; ++c) {
      ASSERT_LE(std::abs(aug_spec.mags.at(r, c) - clean_spec.mags.at(r, c)),
                0.02 * clean_max);
    }
  }
}

TEST(Preprocess, FocusedOfFixesClassifierInputShape) {
  enf::PreprocessOptions opts;
  auto a = enf::focused_of(tone_segment(50.0), opts);
  auto b = enf::focused_of(tone_segment(49.7), opts);
  EXPECT_EQ(a.mags.rows, b.mags.rows);
  EXPECT_EQ(a.mags.cols, b.mags.cols);
  EXPECT_EQ(a.mags.rows, 9u);
  EXPECT_EQ(a.mags.cols, 299u);
}

TEST(Preprocess, FocusedFileRoundTrips) {
  enf::PreprocessOptions opts;
  auto f = enf::focused_of(tone_segment(60.0, 60.0), opts);
  const std::string path =
      (std::filesystem::temp_directory_path() / "enf_focused.enfspc").string();
  enf::write_focused_file(path, f);
  auto back = enf::read_focused_file(path);
  EXPECT_EQ(back.mags.rows, f.mags.rows);
  EXPECT_EQ(back.mags.cols, f.mags.cols);
  EXPECT_EQ(back.nominal, f.nominal);
  EXPECT_EQ(back.params, f.params);
  EXPECT_EQ(back.mags.v, f.mags.v);
}

}  // namespace
