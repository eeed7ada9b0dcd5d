// Minimal RIFF/WAVE reader and writer. Mono linear PCM (16-bit) and IEEE
// float32 are accepted on input; output is always 16-bit PCM.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "enf/error.hpp"

namespace enf {

struct WavData {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = 0;
};

namespace wav_detail {

inline std::uint32_t rd_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t rd_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace wav_detail

inline WavData read_wav(const std::string& path) {
  using namespace wav_detail;
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open WAV file: " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  require(buf.size() >= 44, "not a WAV file (too short): " + path);
  require(std::memcmp(buf.data(), "RIFF", 4) == 0 && std::memcmp(buf.data() + 8, "WAVE", 4) == 0,
          "not a RIFF/WAVE file: " + path);

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_len = 0;

  // walk chunks; tolerate extra chunks (LIST, fact, ...)
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const char* id = reinterpret_cast<const char*>(buf.data() + pos);
    std::uint32_t len = rd_u32(buf.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + len > buf.size()) len = static_cast<std::uint32_t>(buf.size() - body);
    if (std::memcmp(id, "fmt ", 4) == 0 && len >= 16) {
      format = rd_u16(buf.data() + body);
      channels = rd_u16(buf.data() + body + 2);
      rate = rd_u32(buf.data() + body + 4);
      bits = rd_u16(buf.data() + body + 14);
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = buf.data() + body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }

  require(rate > 0 && channels > 0, "WAV missing fmt chunk: " + path);
  require(data != nullptr, "WAV missing data chunk: " + path);
  require(channels == 1, "multichannel unsupported: " + path);

  WavData out;
  out.sample_rate = static_cast<int>(rate);
  if (format == 1 && bits == 16) {
    const std::size_t n = data_len / 2;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::int16_t s;
      std::memcpy(&s, data + 2 * i, 2);
      out.samples[i] = static_cast<double>(s) / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    const std::size_t n = data_len / 4;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      float f;
      std::memcpy(&f, data + 4 * i, 4);
      out.samples[i] = static_cast<double>(f);
    }
  } else {
    throw Error("unsupported WAV encoding (need PCM16 or float32 mono): " + path);
  }
  require(!out.samples.empty(), "WAV has no samples: " + path);
  return out;
}

inline void write_wav_pcm16(const std::string& path, const std::vector<double>& samples,
                            int sample_rate) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), "cannot open WAV for writing: " + path);

  const std::uint32_t data_len = static_cast<std::uint32_t>(samples.size() * 2);
  auto w_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  auto w_u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };

  out.write("RIFF", 4);
  w_u32(36 + data_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  w_u32(16);
  w_u16(1);  // PCM
  w_u16(1);  // mono
  w_u32(static_cast<std::uint32_t>(sample_rate));
  w_u32(static_cast<std::uint32_t>(sample_rate * 2));  // byte rate
  w_u16(2);                                            // block align
  w_u16(16);                                           // bits
  out.write("data", 4);
  w_u32(data_len);
  for (double s : samples) {
    double clamped = std::clamp(s, -1.0, 1.0);
    auto q = static_cast<std::int16_t>(std::lrint(clamped * 32767.0));
    out.write(reinterpret_cast<const char*>(&q), 2);
  }
  out.close();
  require(out.good(), "WAV write failed: " + path);
}

}  // namespace enf
