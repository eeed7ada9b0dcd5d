#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "enf/error.hpp"

namespace enf {

// Dense row-major 2-D grid of doubles. Used for spectrogram magnitudes
// (freq x time) and as the flat feature container inside the classifiers.
struct Tensor2 {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;

  Tensor2() = default;
  Tensor2(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), v(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
  std::size_t size() const { return v.size(); }

  bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }

  double max_value() const {
    double m = v.empty() ? 0.0 : v[0];
    for (double x : v) m = std::max(m, x);
    return m;
  }

  void check_finite(const std::string& what) const {
    for (double x : v) {
      if (!std::isfinite(x)) throw Error("non-finite value in " + what);
    }
  }
};

}  // namespace enf
