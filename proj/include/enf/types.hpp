// Core domain model: grid labels, recording types, nominal frequencies,
// recordings, five-minute segments and sub-dataset routing.
//
// The label -> nominal mapping lives here and nowhere else.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "enf/error.hpp"

namespace enf {

// Nine known grids A..I plus N for "no known grid". N is only ever produced
// by the fusion decision stage; training corpora never contain it.
enum class GridLabel : std::uint8_t { A, B, C, D, E, F, G, H, I, N };

enum class RecType : std::uint8_t { Audio, Power };

enum class NominalFreq : std::uint16_t { Hz50 = 50, Hz60 = 60 };

constexpr int kCanonicalRate = 1000;        // Hz, internal rate for all analysis
constexpr int kSegmentSeconds = 300;        // five-minute samples
constexpr double kEnfBandHalfwidthHz = 1.0; // tolerance around the nominal

inline double hz(NominalFreq f) { return static_cast<double>(f); }

inline char to_char(GridLabel g) { return "ABCDEFGHIN"[static_cast<int>(g)]; }

inline GridLabel grid_label_from_char(char c) {
  const char* tbl = "ABCDEFGHIN";
  for (int i = 0; i < 10; ++i)
    if (tbl[i] == c) return static_cast<GridLabel>(i);
  throw Error(std::string("unknown grid label '") + c + "'");
}

inline std::string to_string(RecType t) { return t == RecType::Audio ? "audio" : "power"; }

inline RecType rec_type_from_string(const std::string& s) {
  if (s == "audio" || s == "Audio") return RecType::Audio;
  if (s == "power" || s == "Power") return RecType::Power;
  throw Error("unknown recording type '" + s + "'");
}

// Grids A, C, I run at 60 Hz; B, D, E, F, G, H at 50 Hz.
inline NominalFreq nominal_of(GridLabel g) {
  switch (g) {
    case GridLabel::A:
    case GridLabel::C:
    case GridLabel::I:
      return NominalFreq::Hz60;
    case GridLabel::B:
    case GridLabel::D:
    case GridLabel::E:
    case GridLabel::F:
    case GridLabel::G:
    case GridLabel::H:
      return NominalFreq::Hz50;
    case GridLabel::N:
      break;
  }
  throw Error("label N has no nominal frequency");
}

// Alphabetically ordered labels for one nominal frequency.
inline std::vector<GridLabel> labels_for(NominalFreq f) {
  if (f == NominalFreq::Hz60) return {GridLabel::A, GridLabel::C, GridLabel::I};
  return {GridLabel::B, GridLabel::D, GridLabel::E, GridLabel::F, GridLabel::G, GridLabel::H};
}

struct Recording {
  std::vector<double> samples;  // amplitude in [-1, 1]
  int sample_rate = kCanonicalRate;
  std::optional<GridLabel> label;
  std::optional<RecType> rec_type;
  std::optional<NominalFreq> nominal;
  std::string source_id;

  double duration_s() const {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
  }
};

struct SegmentSample {
  std::vector<double> samples;
  int sample_rate = kCanonicalRate;
  std::string parent;  // source_id of the recording this came from
  int index = 0;       // ordinal within the recording
  std::optional<GridLabel> label;
  std::optional<RecType> rec_type;
  std::optional<NominalFreq> nominal;
};

// One of the four routing keys: {audio, power} x {50, 60}.
struct SubDatasetKey {
  RecType rec_type;
  NominalFreq nominal;

  bool operator==(const SubDatasetKey&) const = default;

  std::string name() const {
    return to_string(rec_type) + std::to_string(static_cast<int>(nominal));
  }
  std::vector<GridLabel> labels() const { return labels_for(nominal); }
  int group_size() const { return nominal == NominalFreq::Hz60 ? 3 : 6; }
};

inline SubDatasetKey route(RecType rec_type, NominalFreq nominal) {
  return SubDatasetKey{rec_type, nominal};
}

inline std::vector<SubDatasetKey> all_subdataset_keys() {
  return {
      {RecType::Audio, NominalFreq::Hz50},
      {RecType::Audio, NominalFreq::Hz60},
      {RecType::Power, NominalFreq::Hz50},
      {RecType::Power, NominalFreq::Hz60},
  };
}

}  // namespace enf
