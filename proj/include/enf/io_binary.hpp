// Little-endian binary readers/writers used by the ENFSEG01 / ENFSPC01 /
// ENFMDL01 container formats.
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "enf/error.hpp"

namespace enf {

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::string& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    require(out_.good(), "cannot open for writing: " + path);
  }

  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void magic(const char (&m)[9]) { bytes(m, 8); }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void u64(std::uint64_t v) { bytes(&v, 8); }
  void f64(double v) { bytes(&v, 8); }
  void f32(float v) { bytes(&v, 4); }

  void f64_array(const std::vector<double>& v) {
    bytes(v.data(), v.size() * sizeof(double));
  }
  void f32_array(const std::vector<float>& v) { bytes(v.data(), v.size() * sizeof(float)); }

  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

  std::uint64_t tell() { return static_cast<std::uint64_t>(out_.tellp()); }

  void close() {
    out_.close();
    require(out_.good(), "write failed: " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::string& path)
      : path_(path), in_(path, std::ios::binary) {
    require(in_.good(), "cannot open for reading: " + path);
  }

  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    require(in_.gcount() == static_cast<std::streamsize>(n), "truncated file: " + path_);
  }

  void expect_magic(const char (&m)[9]) {
    char got[8];
    bytes(got, 8);
    require(std::memcmp(got, m, 8) == 0,
            "bad magic in " + path_ + " (expected " + std::string(m, 8) + ")");
  }

  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    bytes(&v, 8);
    return v;
  }
  double f64() {
    double v;
    bytes(&v, 8);
    return v;
  }
  float f32() {
    float v;
    bytes(&v, 4);
    return v;
  }

  std::vector<double> f64_array(std::size_t n) {
    std::vector<double> v(n);
    if (n) bytes(v.data(), n * sizeof(double));
    return v;
  }
  std::vector<float> f32_array(std::size_t n) {
    std::vector<float> v(n);
    if (n) bytes(v.data(), n * sizeof(float));
    return v;
  }

  std::string str() {
    std::uint32_t n = u32();
    std::string s(n, '\0');
    if (n) bytes(s.data(), n);
    return s;
  }

  void seek(std::uint64_t pos) { in_.seekg(static_cast<std::streamoff>(pos)); }

 private:
  std::string path_;
  std::ifstream in_;
};

}  // namespace enf
