// The five layer kinds (Conv2D, MaxPool, Flatten, Dense, Dropout) with
// manual forward/backward passes.
//
// Geometry: activations are (height, width, channels), channel-last.
// Conv2D and MaxPool use valid padding at stride 1; a kernel or pool window
// taller/wider than its input is clamped to the available extent, so the
// spatial algebra stays total for thin inputs like focused spectrograms.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "enf/error.hpp"
#include "enf/rng.hpp"

namespace enf::ml {

struct Shape3 {
  int h = 1, w = 1, c = 1;
  int size() const { return h * w * c; }
  bool operator==(const Shape3&) const = default;
  std::string str() const {
    return std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c);
  }
};

struct Tensor3 {
  Shape3 shape;
  std::vector<double> v;

  Tensor3() = default;
  explicit Tensor3(Shape3 s, double fill = 0.0)
      : shape(s), v(static_cast<std::size_t>(s.size()), fill) {}

  double& at(int y, int x, int ch) {
    return v[static_cast<std::size_t>((y * shape.w + x) * shape.c + ch)];
  }
  double at(int y, int x, int ch) const {
    return v[static_cast<std::size_t>((y * shape.w + x) * shape.c + ch)];
  }
};

enum class LayerKind : std::uint32_t { Conv2D = 0, MaxPool = 1, Flatten = 2, Dense = 3, Dropout = 4 };

enum class Activation : std::uint32_t { None = 0, Relu = 1 };

inline std::string to_string(LayerKind k) {
  switch (k) {
    case LayerKind::Conv2D: return "Conv2D";
    case LayerKind::MaxPool: return "MaxPool";
    case LayerKind::Flatten: return "Flatten";
    case LayerKind::Dense: return "Dense";
    case LayerKind::Dropout: return "Dropout";
  }
  return "?";
}

struct LayerSpec {
  LayerKind kind = LayerKind::Dense;
  int filters = 0;               // Conv2D
  int kernel_h = 3, kernel_w = 3;
  int pool_h = 2, pool_w = 2;    // MaxPool
  int units = 0;                 // Dense
  double drop_rate = 0.0;        // Dropout
  Activation act = Activation::Relu;

  bool operator==(const LayerSpec&) const = default;

  static LayerSpec conv2d(int filters, int kh = 3, int kw = 3, Activation a = Activation::Relu) {
    LayerSpec s;
    s.kind = LayerKind::Conv2D;
    s.filters = filters;
    s.kernel_h = kh;
    s.kernel_w = kw;
    s.act = a;
    return s;
  }
  static LayerSpec maxpool(int ph = 2, int pw = 2) {
    LayerSpec s;
    s.kind = LayerKind::MaxPool;
    s.pool_h = ph;
    s.pool_w = pw;
    return s;
  }
  static LayerSpec flatten() {
    LayerSpec s;
    s.kind = LayerKind::Flatten;
    return s;
  }
  static LayerSpec dense(int units, Activation a = Activation::Relu) {
    LayerSpec s;
    s.kind = LayerKind::Dense;
    s.units = units;
    s.act = a;
    return s;
  }
  static LayerSpec dropout(double rate) {
    LayerSpec s;
    s.kind = LayerKind::Dropout;
    s.drop_rate = rate;
    return s;
  }
};

// Per-layer state captured by a training-mode forward pass; backward needs it.
struct LayerCache {
  Tensor3 input;
  Tensor3 preact;              // conv/dense, before the activation
  std::vector<int> argmax;     // maxpool routing
  std::vector<double> mask;    // dropout (already includes the 1/(1-p) scale)
};

// A materialized layer: spec + resolved geometry + weights.
struct Layer {
  LayerSpec spec;
  Shape3 in_shape, out_shape;
  int kh_eff = 0, kw_eff = 0;  // conv kernel after clamping
  int ph_eff = 0, pw_eff = 0;  // pool window after clamping
  std::vector<double> weights; // conv: [f][ky][kx][cin]; dense: [unit][in]
  std::vector<double> bias;

  // -- geometry ------------------------------------------------------------

  static Layer build(const LayerSpec& spec, Shape3 in, int index) {
    Layer l;
    l.spec = spec;
    l.in_shape = in;
    auto fail = [&](const std::string& msg) {
      throw Error("layer " + std::to_string(index) + " (" + to_string(spec.kind) + "): " + msg +
                  " (input " + in.str() + ")");
    };
    switch (spec.kind) {
      case LayerKind::Conv2D: {
        if (spec.filters <= 0) fail("needs a positive filter count");
        if (spec.kernel_h <= 0 || spec.kernel_w <= 0) fail("needs a positive kernel");
        l.kh_eff = std::min(spec.kernel_h, in.h);
        l.kw_eff = std::min(spec.kernel_w, in.w);
        l.out_shape = {in.h - l.kh_eff + 1, in.w - l.kw_eff + 1, spec.filters};
        l.weights.assign(static_cast<std::size_t>(spec.filters) * l.kh_eff * l.kw_eff * in.c, 0.0);
        l.bias.assign(static_cast<std::size_t>(spec.filters), 0.0);
        break;
      }
      case LayerKind::MaxPool: {
        if (spec.pool_h <= 0 || spec.pool_w <= 0) fail("needs a positive pool window");
        l.ph_eff = std::min(spec.pool_h, in.h);
        l.pw_eff = std::min(spec.pool_w, in.w);
        l.out_shape = {in.h / l.ph_eff, in.w / l.pw_eff, in.c};
        if (l.out_shape.h == 0 || l.out_shape.w == 0) fail("pools the input away entirely");
        break;
      }
      case LayerKind::Flatten:
        l.out_shape = {1, 1, in.size()};
        break;
      case LayerKind::Dense: {
        if (spec.units <= 0) fail("needs a positive unit count");
        l.out_shape = {1, 1, spec.units};
        l.weights.assign(static_cast<std::size_t>(spec.units) * in.size(), 0.0);
        l.bias.assign(static_cast<std::size_t>(spec.units), 0.0);
        break;
      }
      case LayerKind::Dropout: {
        if (spec.drop_rate < 0.0 || spec.drop_rate >= 1.0) fail("rate must lie in [0,1)");
        l.out_shape = in;
        break;
      }
    }
    return l;
  }

  bool trainable() const { return !weights.empty(); }

  void init_weights(Rng& rng, bool zero_init) {
    if (!trainable()) return;
    if (zero_init) {
      std::fill(weights.begin(), weights.end(), 0.0);
      std::fill(bias.begin(), bias.end(), 0.0);
      return;
    }
    const int fan_in = spec.kind == LayerKind::Conv2D ? kh_eff * kw_eff * in_shape.c
                                                      : in_shape.size();
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& w : weights) w = rng.gaussian(0.0, stddev);
    std::fill(bias.begin(), bias.end(), 0.0);
  }

  // -- forward -------------------------------------------------------------

  void forward(const Tensor3& in, Tensor3& out, bool training, LayerCache* cache,
               Rng* dropout_rng) const {
    require(in.shape == in_shape, "layer input shape mismatch: got " + in.shape.str() +
                                      ", want " + in_shape.str());
    out = Tensor3(out_shape);
    switch (spec.kind) {
      case LayerKind::Conv2D: forward_conv(in, out, training, cache); break;
      case LayerKind::MaxPool: forward_pool(in, out, training, cache); break;
      case LayerKind::Flatten:
        out.v = in.v;
        break;
      case LayerKind::Dense: forward_dense(in, out, training, cache); break;
      case LayerKind::Dropout: forward_dropout(in, out, training, cache, dropout_rng); break;
    }
    if (training && cache) cache->input = in;
  }

  // Backward for one layer: dout is the loss gradient wrt this layer's
  // output; fills din and accumulates weight/bias gradients.
  void backward(const LayerCache& cache, const Tensor3& dout, Tensor3& din,
                std::vector<double>& dweights, std::vector<double>& dbias) const {
    din = Tensor3(in_shape);
    switch (spec.kind) {
      case LayerKind::Conv2D: backward_conv(cache, dout, din, dweights, dbias); break;
      case LayerKind::MaxPool: backward_pool(cache, dout, din); break;
      case LayerKind::Flatten:
        din.v = dout.v;
        break;
      case LayerKind::Dense: backward_dense(cache, dout, din, dweights, dbias); break;
      case LayerKind::Dropout: backward_dropout(cache, dout, din); break;
    }
  }

 private:
  double activate(double x) const { return spec.act == Activation::Relu ? (x > 0.0 ? x : 0.0) : x; }

  void forward_conv(const Tensor3& in, Tensor3& out, bool training, LayerCache* cache) const {
    const int C = in_shape.c, F = spec.filters;
    const int span = kh_eff * kw_eff * C;
    Tensor3 pre(out_shape);
    for (int oy = 0; oy < out_shape.h; ++oy) {
      for (int ox = 0; ox < out_shape.w; ++ox) {
        for (int f = 0; f < F; ++f) {
          const double* wf = weights.data() + static_cast<std::size_t>(f) * span;
          double acc = bias[static_cast<std::size_t>(f)];
          int wi = 0;
          for (int ky = 0; ky < kh_eff; ++ky) {
            const double* row = &in.v[static_cast<std::size_t>(((oy + ky) * in_shape.w + ox) * C)];
            for (int i = 0; i < kw_eff * C; ++i) acc += row[i] * wf[wi + i];
            wi += kw_eff * C;
          }
          pre.at(oy, ox, f) = acc;
          out.at(oy, ox, f) = activate(acc);
        }
      }
    }
    if (training && cache) cache->preact = std::move(pre);
  }

  void backward_conv(const LayerCache& cache, const Tensor3& dout, Tensor3& din,
                     std::vector<double>& dweights, std::vector<double>& dbias) const {
    const int C = in_shape.c, F = spec.filters;
    const int span = kh_eff * kw_eff * C;
    for (int oy = 0; oy < out_shape.h; ++oy) {
      for (int ox = 0; ox < out_shape.w; ++ox) {
        for (int f = 0; f < F; ++f) {
          double d = dout.at(oy, ox, f);
          if (spec.act == Activation::Relu && cache.preact.at(oy, ox, f) <= 0.0) continue;
          if (d == 0.0) continue;
          dbias[static_cast<std::size_t>(f)] += d;
          const double* wf = weights.data() + static_cast<std::size_t>(f) * span;
          double* dwf = dweights.data() + static_cast<std::size_t>(f) * span;
          int wi = 0;
          for (int ky = 0; ky < kh_eff; ++ky) {
            const std::size_t base = static_cast<std::size_t>(((oy + ky) * in_shape.w + ox) * C);
            const double* row = &cache.input.v[base];
            double* drow = &din.v[base];
            for (int i = 0; i < kw_eff * C; ++i) {
              dwf[wi + i] += d * row[i];
              drow[i] += d * wf[wi + i];
            }
            wi += kw_eff * C;
          }
        }
      }
    }
  }

  void forward_pool(const Tensor3& in, Tensor3& out, bool training, LayerCache* cache) const {
    const int C = in_shape.c;
    if (training && cache) {
      cache->argmax.assign(static_cast<std::size_t>(out_shape.size()), -1);
    }
    for (int oy = 0; oy < out_shape.h; ++oy) {
      for (int ox = 0; ox < out_shape.w; ++ox) {
        for (int ch = 0; ch < C; ++ch) {
          double best = -1e300;
          int best_idx = -1;
          for (int py = 0; py < ph_eff; ++py) {
            for (int px = 0; px < pw_eff; ++px) {
              const int y = oy * ph_eff + py, x = ox * pw_eff + px;
              const double v = in.at(y, x, ch);
              if (v > best) {
                best = v;
                best_idx = (y * in_shape.w + x) * C + ch;
              }
            }
          }
          out.at(oy, ox, ch) = best;
          if (training && cache) {
            cache->argmax[static_cast<std::size_t>((oy * out_shape.w + ox) * C + ch)] = best_idx;
          }
        }
      }
    }
  }

  void backward_pool(const LayerCache& cache, const Tensor3& dout, Tensor3& din) const {
    for (std::size_t i = 0; i < dout.v.size(); ++i) {
      const int src = cache.argmax[i];
      din.v[static_cast<std::size_t>(src)] += dout.v[i];
    }
  }

  void forward_dense(const Tensor3& in, Tensor3& out, bool training, LayerCache* cache) const {
    const int n = in_shape.size(), m = spec.units;
    Tensor3 pre(out_shape);
    for (int u = 0; u < m; ++u) {
      const double* wu = weights.data() + static_cast<std::size_t>(u) * n;
      double acc = bias[static_cast<std::size_t>(u)];
      for (int i = 0; i < n; ++i) acc += wu[i] * in.v[static_cast<std::size_t>(i)];
      pre.v[static_cast<std::size_t>(u)] = acc;
      out.v[static_cast<std::size_t>(u)] = activate(acc);
    }
    if (training && cache) cache->preact = std::move(pre);
  }

  void backward_dense(const LayerCache& cache, const Tensor3& dout, Tensor3& din,
                      std::vector<double>& dweights, std::vector<double>& dbias) const {
    const int n = in_shape.size(), m = spec.units;
    for (int u = 0; u < m; ++u) {
      double d = dout.v[static_cast<std::size_t>(u)];
      if (spec.act == Activation::Relu && cache.preact.v[static_cast<std::size_t>(u)] <= 0.0) {
        continue;
      }
      if (d == 0.0) continue;
      dbias[static_cast<std::size_t>(u)] += d;
      const double* wu = weights.data() + static_cast<std::size_t>(u) * n;
      double* dwu = dweights.data() + static_cast<std::size_t>(u) * n;
      for (int i = 0; i < n; ++i) {
        dwu[i] += d * cache.input.v[static_cast<std::size_t>(i)];
        din.v[static_cast<std::size_t>(i)] += d * wu[i];
      }
    }
  }

  void forward_dropout(const Tensor3& in, Tensor3& out, bool training, LayerCache* cache,
                       Rng* rng) const {
    if (!training || spec.drop_rate == 0.0) {
      out.v = in.v;  // inference: identity (inverted dropout)
      if (training && cache) cache->mask.assign(in.v.size(), 1.0);
      return;
    }
    require(rng != nullptr, "dropout in training mode needs an RNG");
    const double keep = 1.0 - spec.drop_rate;
    std::vector<double> mask(in.v.size());
    for (auto& m : mask) m = rng->uniform() < keep ? 1.0 / keep : 0.0;
    for (std::size_t i = 0; i < in.v.size(); ++i) out.v[i] = in.v[i] * mask[i];
    if (cache) cache->mask = std::move(mask);
  }

  void backward_dropout(const LayerCache& cache, const Tensor3& dout, Tensor3& din) const {
    for (std::size_t i = 0; i < dout.v.size(); ++i) din.v[i] = dout.v[i] * cache.mask[i];
  }
};

}  // namespace enf::ml
