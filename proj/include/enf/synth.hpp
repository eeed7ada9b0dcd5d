// Synthetic multi-grid corpus generation.
//
// Each grid is an AR(1) frequency-deviation process around its nominal
// mains frequency, rendered as a harmonic stack plus white noise. The
// grid-distinguishing signature is the (ar_coeff, deviation_std) pair.
//
// SNR convention: audio_snr_db / power_snr_db give the ratio of fundamental
// power to the noise power falling inside the [nominal-1, nominal+1] Hz
// band. This matches how the detect stage measures SNR, so the detector's
// default threshold separates the two recording types directly.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "enf/error.hpp"
#include "enf/rng.hpp"
#include "enf/signal_io.hpp"
#include "enf/types.hpp"
#include "enf/wav.hpp"

namespace enf {

struct SynthGridParams {
  GridLabel label = GridLabel::A;
  NominalFreq nominal = NominalFreq::Hz60;
  double ar_coeff = 0.95;      // per-second persistence of the ENF deviation
  double deviation_std = 0.05; // Hz, stationary std of the deviation
  std::vector<double> harmonic_weights = {1.0, 0.5, 0.25};
  double audio_snr_db = 8.0;   // in-band, see header comment
  double power_snr_db = 40.0;

  double snr_db(RecType t) const { return t == RecType::Audio ? audio_snr_db : power_snr_db; }
};

inline void validate(const SynthGridParams& p) {
  require(p.ar_coeff > 0.0 && p.ar_coeff < 1.0, "ar_coeff must lie in (0,1)");
  require(p.deviation_std >= 0.0, "deviation_std must be non-negative");
  require(p.deviation_std <= 0.1, "deviation_std above the 0.1 Hz mains bound");
  require(!p.harmonic_weights.empty() && p.harmonic_weights[0] > 0.0,
          "harmonic_weights needs a positive fundamental");
  require(p.power_snr_db > p.audio_snr_db, "power recordings must be cleaner than audio");
}

namespace synth_detail {
constexpr double kTwoPi = 2.0 * 3.141592653589793238462643383279502884;
constexpr std::uint64_t kTagSynth = 0x53594e54;  // "SYNT"
}  // namespace synth_detail

struct SynthParts {
  std::vector<double> clean;  // harmonic stack, unit weights as configured
  std::vector<double> noise;  // white noise already scaled to the target SNR
  double mix_scale = 1.0;     // joint scale applied when forming the recording
};

// Deterministic given (params, duration, rec_type, seed).
inline SynthParts synth_parts(const SynthGridParams& params, double duration_s, RecType rec_type,
                              std::uint64_t seed) {
  validate(params);
  require(duration_s >= kSegmentSeconds, "synthetic recordings must be at least five minutes");

  using synth_detail::kTwoPi;
  const int rate = kCanonicalRate;
  const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * rate));
  Rng rng(derive_seed(seed, synth_detail::kTagSynth));

  // ENF deviation path, one AR(1) node per second, linear interpolation.
  const std::size_t nodes = static_cast<std::size_t>(std::ceil(duration_s)) + 1;
  std::vector<double> dev(nodes);
  const double a = params.ar_coeff;
  const double sigma = params.deviation_std;
  const double innov = sigma * std::sqrt(1.0 - a * a);
  dev[0] = rng.gaussian(0.0, sigma);
  for (std::size_t k = 1; k < nodes; ++k) dev[k] = a * dev[k - 1] + rng.gaussian(0.0, innov);

  const std::size_t n_harm = params.harmonic_weights.size();
  std::vector<double> phase0(n_harm);
  for (auto& p : phase0) p = rng.uniform(0.0, kTwoPi);

  SynthParts parts;
  parts.clean.resize(n);
  const double f0 = hz(params.nominal);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const std::size_t k = static_cast<std::size_t>(t);
    const double frac = t - static_cast<double>(k);
    const double d = dev[k] + (dev[k + 1] - dev[k]) * frac;
    phase += kTwoPi * (f0 + d) / rate;
    if (phase > kTwoPi) phase -= kTwoPi;  // harmless for integer harmonics
    double s = 0.0;
    for (std::size_t h = 0; h < n_harm; ++h) {
      s += params.harmonic_weights[h] * std::sin(static_cast<double>(h + 1) * phase + phase0[h]);
    }
    parts.clean[i] = s;
  }

  // White noise sized so that its share inside [nominal +/- 1] Hz sits at the
  // configured SNR below the fundamental's power.
  const double w1 = params.harmonic_weights[0];
  const double fund_power = 0.5 * w1 * w1;
  const double snr_lin = std::pow(10.0, params.snr_db(rec_type) / 10.0);
  const double band_fraction = (2.0 * kEnfBandHalfwidthHz) / (rate / 2.0);
  const double noise_power = fund_power / (snr_lin * band_fraction);
  const double noise_std = std::sqrt(noise_power);
  parts.noise.resize(n);
  for (auto& v : parts.noise) v = rng.gaussian(0.0, noise_std);

  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    peak = std::max(peak, std::abs(parts.clean[i] + parts.noise[i]));
  }
  parts.mix_scale = peak > 0.0 ? 0.95 / peak : 1.0;
  return parts;
}

inline Recording synth_recording(const SynthGridParams& params, double duration_s,
                                 RecType rec_type, std::uint64_t seed) {
  SynthParts parts = synth_parts(params, duration_s, rec_type, seed);
  Recording rec;
  rec.sample_rate = kCanonicalRate;
  rec.samples.resize(parts.clean.size());
  for (std::size_t i = 0; i < parts.clean.size(); ++i) {
    rec.samples[i] = (parts.clean[i] + parts.noise[i]) * parts.mix_scale;
  }
  rec.label = params.label;
  rec.rec_type = rec_type;
  rec.nominal = params.nominal;
  return rec;
}

// Nine separable grids with the canonical label -> nominal mapping.
inline std::vector<SynthGridParams> default_grid_params() {
  auto mk = [](GridLabel l, double ar, double std_hz) {
    SynthGridParams p;
    p.label = l;
    p.nominal = nominal_of(l);
    p.ar_coeff = ar;
    p.deviation_std = std_hz;
    return p;
  };
  return {
      mk(GridLabel::A, 0.90, 0.020),  // 60 Hz
      mk(GridLabel::B, 0.88, 0.012),  // 50 Hz
      mk(GridLabel::C, 0.96, 0.050),  // 60 Hz
      mk(GridLabel::D, 0.92, 0.028),  // 50 Hz
      mk(GridLabel::E, 0.95, 0.044),  // 50 Hz
      mk(GridLabel::F, 0.97, 0.060),  // 50 Hz
      mk(GridLabel::G, 0.985, 0.076), // 50 Hz
      mk(GridLabel::H, 0.995, 0.092), // 50 Hz
      mk(GridLabel::I, 0.99, 0.085),  // 60 Hz
  };
}

// Held-out grid for None-class testing: parameters sit between A and C.
inline SynthGridParams default_unknown_params() {
  SynthGridParams p;
  p.label = GridLabel::N;
  p.nominal = NominalFreq::Hz60;
  p.ar_coeff = 0.93;
  p.deviation_std = 0.035;
  return p;
}

struct CorpusSpec {
  std::vector<SynthGridParams> grids = default_grid_params();
  std::optional<SynthGridParams> unknown = default_unknown_params();
  int per_grid_minutes = 60;     // training audio AND power minutes per grid
  int train_chunk_minutes = 30;  // length of each training recording
  int test_per_grid = 1;         // 10-minute test recordings per grid per type
  int unknown_test = 4;          // 10-minute unknown-grid test recordings
  int test_minutes = 10;
};

struct CorpusPaths {
  std::string dir;
  std::string train_manifest;
  std::string test_manifest;
};

// Writes WAV recordings plus train/test manifests under out_dir. Same seed,
// same spec -> identical bytes.
inline CorpusPaths synth_corpus(const CorpusSpec& spec, const std::string& out_dir,
                                std::uint64_t seed) {
  require(!spec.grids.empty(), "corpus needs at least one grid");
  for (const auto& g : spec.grids) validate(g);
  if (spec.unknown) validate(*spec.unknown);
  require(spec.per_grid_minutes >= spec.train_chunk_minutes,
          "per_grid_minutes below one training chunk");
  require(spec.train_chunk_minutes >= 30 && spec.train_chunk_minutes <= 60,
          "training recordings must be 30..60 minutes long");

  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "train");
  fs::create_directories(fs::path(out_dir) / "test");

  const RecType types[2] = {RecType::Audio, RecType::Power};
  std::vector<ManifestEntry> train_entries, test_entries;

  const int chunks = (spec.per_grid_minutes + spec.train_chunk_minutes - 1) /
                     spec.train_chunk_minutes;
  for (std::size_t gi = 0; gi < spec.grids.size(); ++gi) {
    const auto& g = spec.grids[gi];
    for (int ti = 0; ti < 2; ++ti) {
      for (int c = 0; c < chunks; ++c) {
        const std::uint64_t s = derive_seed(seed, 1, gi, static_cast<std::uint64_t>(ti),
                                            static_cast<std::uint64_t>(c));
        Recording rec = synth_recording(g, spec.train_chunk_minutes * 60.0, types[ti], s);
        char name[64];
        std::snprintf(name, sizeof(name), "train/%c_%s_%02d.wav", to_char(g.label),
                      to_string(types[ti]).c_str(), c);
        const std::string path = (fs::path(out_dir) / name).string();
        write_wav_pcm16(path, rec.samples, rec.sample_rate);
        train_entries.push_back({path, g.label, types[ti]});
      }
      for (int c = 0; c < spec.test_per_grid; ++c) {
        const std::uint64_t s = derive_seed(seed, 2, gi, static_cast<std::uint64_t>(ti),
                                            static_cast<std::uint64_t>(c));
        Recording rec = synth_recording(g, spec.test_minutes * 60.0, types[ti], s);
        char name[64];
        std::snprintf(name, sizeof(name), "test/%c_%s_%02d.wav", to_char(g.label),
                      to_string(types[ti]).c_str(), c);
        const std::string path = (fs::path(out_dir) / name).string();
        write_wav_pcm16(path, rec.samples, rec.sample_rate);
        test_entries.push_back({path, g.label, types[ti]});
      }
    }
  }

  if (spec.unknown && spec.unknown_test > 0) {
    for (int c = 0; c < spec.unknown_test; ++c) {
      const RecType t = types[c % 2];
      const std::uint64_t s = derive_seed(seed, 3, static_cast<std::uint64_t>(c));
      Recording rec = synth_recording(*spec.unknown, spec.test_minutes * 60.0, t, s);
      char name[64];
      std::snprintf(name, sizeof(name), "test/unknown_%s_%02d.wav", to_string(t).c_str(), c);
      const std::string path = (fs::path(out_dir) / name).string();
      write_wav_pcm16(path, rec.samples, rec.sample_rate);
      test_entries.push_back({path, std::nullopt, t});  // manifest label '?'
    }
  }

  CorpusPaths paths;
  paths.dir = out_dir;
  paths.train_manifest = (fs::path(out_dir) / "train_manifest.tsv").string();
  paths.test_manifest = (fs::path(out_dir) / "test_manifest.tsv").string();
  write_manifest(paths.train_manifest, train_entries);
  write_manifest(paths.test_manifest, test_entries);
  return paths;
}

}  // namespace enf
