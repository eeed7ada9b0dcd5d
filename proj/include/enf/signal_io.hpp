// Corpus ingestion: recording loading/resampling, five-minute segmentation,
// tab-separated manifests and the ENFSEG01 segment container.
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "enf/error.hpp"
#include "enf/io_binary.hpp"
#include "enf/resample.hpp"
#include "enf/types.hpp"
#include "enf/wav.hpp"

namespace enf {

// Analysis band extends to the third harmonic of 60 Hz plus margin; sources
// sampled below twice that cannot be used.
constexpr int kMinSourceRate = 720;

struct ManifestEntry {
  std::string path;  // resolved relative to the manifest's directory
  std::optional<GridLabel> label;
  std::optional<RecType> rec_type;
};

inline std::vector<ManifestEntry> parse_manifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  require(in.good(), "cannot open manifest: " + manifest_path);
  const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();

  std::vector<ManifestEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string path, label, rtype;
    if (!std::getline(ls, path, '\t') || !std::getline(ls, label, '\t') ||
        !std::getline(ls, rtype, '\t')) {
      throw Error("malformed manifest line " + std::to_string(lineno) + " in " + manifest_path);
    }
    ManifestEntry e;
    e.path = (base / path).string();
    if (label != "?") e.label = grid_label_from_char(label.empty() ? '?' : label[0]);
    if (rtype != "?") e.rec_type = rec_type_from_string(rtype);
    entries.push_back(std::move(e));
  }
  return entries;
}

inline void write_manifest(const std::string& manifest_path,
                           const std::vector<ManifestEntry>& entries) {
  std::ofstream out(manifest_path, std::ios::trunc);
  require(out.good(), "cannot write manifest: " + manifest_path);
  const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
  for (const auto& e : entries) {
    std::string rel = std::filesystem::relative(e.path, base).string();
    out << rel << '\t' << (e.label ? std::string(1, to_char(*e.label)) : "?") << '\t'
        << (e.rec_type ? to_string(*e.rec_type) : "?") << '\n';
  }
  out.close();
  require(out.good(), "manifest write failed: " + manifest_path);
}

namespace signal_io_detail {

// Sidecar metadata file "<recording>.meta": key=value lines.
inline void apply_sidecar(Recording& rec, const std::string& wav_path) {
  const std::string meta_path = wav_path + ".meta";
  std::ifstream in(meta_path);
  if (!in.good()) return;
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    if (key == "label" && !val.empty() && val != "?") {
      rec.label = grid_label_from_char(val[0]);
    } else if (key == "rec_type" && val != "?") {
      rec.rec_type = rec_type_from_string(val);
    }
  }
}

}  // namespace signal_io_detail

// Loads a mono PCM recording, resamples it to the canonical 1 kHz rate and
// attaches sidecar metadata when a "<path>.meta" file exists. The nominal
// frequency is derived from the label when one is known.
inline Recording load_recording(const std::string& path,
                                std::optional<int> expected_rate = std::nullopt) {
  WavData wav = read_wav(path);
  if (expected_rate && wav.sample_rate != *expected_rate) {
    throw Error("unexpected sample rate in " + path + ": got " +
                std::to_string(wav.sample_rate) + ", expected " + std::to_string(*expected_rate));
  }
  require(wav.sample_rate >= kMinSourceRate,
          "sample rate " + std::to_string(wav.sample_rate) + " below Nyquist for the 360 Hz "
          "analysis band: " + path);

  Recording rec;
  rec.source_id = std::filesystem::path(path).stem().string();
  rec.sample_rate = kCanonicalRate;
  rec.samples = (wav.sample_rate == kCanonicalRate)
                    ? std::move(wav.samples)
                    : resample(wav.samples, wav.sample_rate, kCanonicalRate);
  signal_io_detail::apply_sidecar(rec, path);
  if (rec.label) rec.nominal = nominal_of(*rec.label);
  return rec;
}

inline Recording load_recording(const ManifestEntry& entry,
                                std::optional<int> expected_rate = std::nullopt) {
  Recording rec = load_recording(entry.path, expected_rate);
  if (entry.label) {
    rec.label = entry.label;
    rec.nominal = nominal_of(*entry.label);
  }
  if (entry.rec_type) rec.rec_type = entry.rec_type;
  return rec;
}

// Splits a recording into contiguous, non-overlapping five-minute segments.
// A tail shorter than five minutes is dropped.
inline std::vector<SegmentSample> segment(const Recording& rec) {
  const std::size_t seg_len = static_cast<std::size_t>(kSegmentSeconds) *
                              static_cast<std::size_t>(rec.sample_rate);
  require(rec.samples.size() >= seg_len, "too short to segment: " + rec.source_id);

  const std::size_t count = rec.samples.size() / seg_len;
  std::vector<SegmentSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SegmentSample s;
    s.samples.assign(rec.samples.begin() + static_cast<std::ptrdiff_t>(i * seg_len),
                     rec.samples.begin() + static_cast<std::ptrdiff_t>((i + 1) * seg_len));
    s.sample_rate = rec.sample_rate;
    s.parent = rec.source_id;
    s.index = static_cast<int>(i);
    s.label = rec.label;
    s.rec_type = rec.rec_type;
    s.nominal = rec.nominal;
    out.push_back(std::move(s));
  }
  return out;
}

// --- ENFSEG01 segment container ------------------------------------------
//
// 32-byte header: magic "ENFSEG01", u32 rate, u32 reserved, u64 sample
// count, u32 metadata offset, u32 metadata length. Samples follow as
// float32, then a key=value metadata block.

inline void write_segment_file(const std::string& path, const SegmentSample& seg) {
  std::ostringstream meta;
  meta << "parent=" << seg.parent << "\n";
  meta << "index=" << seg.index << "\n";
  if (seg.label) meta << "label=" << to_char(*seg.label) << "\n";
  if (seg.rec_type) meta << "rec_type=" << to_string(*seg.rec_type) << "\n";
  if (seg.nominal) meta << "nominal=" << static_cast<int>(*seg.nominal) << "\n";
  const std::string meta_s = meta.str();

  BinaryWriter w(path);
  const std::uint32_t meta_off =
      32 + static_cast<std::uint32_t>(seg.samples.size() * sizeof(float));
  w.magic("ENFSEG01");
  w.u32(static_cast<std::uint32_t>(seg.sample_rate));
  w.u32(0);
  w.u64(seg.samples.size());
  w.u32(meta_off);
  w.u32(static_cast<std::uint32_t>(meta_s.size()));
  std::vector<float> f(seg.samples.begin(), seg.samples.end());
  w.f32_array(f);
  w.bytes(meta_s.data(), meta_s.size());
  w.close();
}

inline SegmentSample read_segment_file(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic("ENFSEG01");
  SegmentSample seg;
  seg.sample_rate = static_cast<int>(r.u32());
  r.u32();  // reserved
  const std::uint64_t n = r.u64();
  const std::uint32_t meta_off = r.u32();
  const std::uint32_t meta_len = r.u32();
  std::vector<float> f = r.f32_array(n);
  seg.samples.assign(f.begin(), f.end());
  r.seek(meta_off);
  std::string meta(meta_len, '\0');
  if (meta_len) r.bytes(meta.data(), meta_len);

  std::istringstream ms(meta);
  std::string line;
  while (std::getline(ms, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    if (key == "parent") seg.parent = val;
    else if (key == "index") seg.index = std::stoi(val);
    else if (key == "label") seg.label = grid_label_from_char(val[0]);
    else if (key == "rec_type") seg.rec_type = rec_type_from_string(val);
    else if (key == "nominal")
      seg.nominal = std::stoi(val) == 60 ? NominalFreq::Hz60 : NominalFreq::Hz50;
  }
  return seg;
}

}  // namespace enf
