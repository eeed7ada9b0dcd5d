// Sequential network over the five layer kinds, with explicit forward
// caches so prediction stays pure and thread-safe on shared models.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "enf/error.hpp"
#include "enf/io_binary.hpp"
#include "enf/ml/layers.hpp"
#include "enf/rng.hpp"

namespace enf::ml {

inline double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// Numerically stable binary cross-entropy on a logit.
inline double bce_with_logits(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

inline double bce_grad(double z, double y) { return sigmoid(z) - y; }

class Network {
 public:
  struct ForwardCache {
    std::vector<LayerCache> layers;
    bool valid = false;
  };

  struct Grads {
    std::vector<std::vector<double>> w, b;

    void zero() {
      for (auto& g : w) std::fill(g.begin(), g.end(), 0.0);
      for (auto& g : b) std::fill(g.begin(), g.end(), 0.0);
    }
    void add_scaled(const Grads& o, double s) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t j = 0; j < w[i].size(); ++j) w[i][j] += s * o.w[i][j];
        for (std::size_t j = 0; j < b[i].size(); ++j) b[i][j] += s * o.b[i][j];
      }
    }
  };

  Network() = default;

  // Builds geometry and initializes weights: He-normal for hidden layers,
  // zeros for the output layer so an untrained head emits logit 0.
  Network(Shape3 input, const std::vector<LayerSpec>& specs, std::uint64_t seed) {
    require(!specs.empty(), "network needs at least one layer");
    input_shape_ = input;
    Shape3 cur = input;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      layers_.push_back(Layer::build(specs[i], cur, static_cast<int>(i)));
      cur = layers_.back().out_shape;
    }
    int last_trainable = -1;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      if (layers_[i].trainable()) last_trainable = static_cast<int>(i);
    }
    Rng rng(derive_seed(seed, 0x4e455457));  // "NETW"
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      layers_[i].init_weights(rng, static_cast<int>(i) == last_trainable);
    }
  }

  const Shape3& input_shape() const { return input_shape_; }
  Shape3 output_shape() const { return layers_.back().out_shape; }
  int output_size() const { return layers_.back().out_shape.size(); }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  // Forward pass. In training mode the caller must pass a cache (filled for
  // backward) and an RNG for dropout masks. Inference mode touches no
  // mutable state, so a const Network is safe to share across threads.
  std::vector<double> forward(const Tensor3& x, bool training = false,
                              ForwardCache* cache = nullptr, Rng* dropout_rng = nullptr) const {
    require(x.shape == input_shape_, "network input shape mismatch: got " + x.shape.str() +
                                         ", want " + input_shape_.str());
    if (training) {
      require(cache != nullptr, "training-mode forward needs a cache");
      cache->layers.assign(layers_.size(), LayerCache{});
      cache->valid = true;
    }
    check_finite(x.v, "network input");
    Tensor3 cur = x;
    Tensor3 next;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      layers_[i].forward(cur, next, training, training ? &cache->layers[i] : nullptr,
                         dropout_rng);
      check_finite(next.v, "output of layer " + std::to_string(i) + " (" +
                               to_string(layers_[i].spec.kind) + ")");
      cur = std::move(next);
    }
    return cur.v;
  }

  Grads make_grads() const {
    Grads g;
    g.w.resize(layers_.size());
    g.b.resize(layers_.size());
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      g.w[i].assign(layers_[i].weights.size(), 0.0);
      g.b[i].assign(layers_[i].bias.size(), 0.0);
    }
    return g;
  }

  // Backpropagates dloss/doutput through the cached activations,
  // accumulating into grads.
  void backward(const ForwardCache& cache, const std::vector<double>& dout, Grads& grads) const {
    require(cache.valid && cache.layers.size() == layers_.size(),
            "backward called without a training-mode forward cache");
    require(dout.size() == static_cast<std::size_t>(output_size()), "loss gradient size mismatch");
    Tensor3 d(layers_.back().out_shape);
    d.v = dout;
    Tensor3 din;
    for (std::size_t i = layers_.size(); i-- > 0;) {
      layers_[i].backward(cache.layers[i], d, din, grads.w[i], grads.b[i]);
      d = std::move(din);
    }
  }

  void save(BinaryWriter& wtr) const {
    wtr.u32(static_cast<std::uint32_t>(input_shape_.h));
    wtr.u32(static_cast<std::uint32_t>(input_shape_.w));
    wtr.u32(static_cast<std::uint32_t>(input_shape_.c));
    wtr.u32(static_cast<std::uint32_t>(layers_.size()));
    for (const auto& l : layers_) {
      wtr.u32(static_cast<std::uint32_t>(l.spec.kind));
      wtr.u32(static_cast<std::uint32_t>(l.spec.filters));
      wtr.u32(static_cast<std::uint32_t>(l.spec.kernel_h));
      wtr.u32(static_cast<std::uint32_t>(l.spec.kernel_w));
      wtr.u32(static_cast<std::uint32_t>(l.spec.pool_h));
      wtr.u32(static_cast<std::uint32_t>(l.spec.pool_w));
      wtr.u32(static_cast<std::uint32_t>(l.spec.units));
      wtr.f64(l.spec.drop_rate);
      wtr.u32(static_cast<std::uint32_t>(l.spec.act));
    }
    for (const auto& l : layers_) {
      wtr.u64(l.weights.size());
      wtr.f64_array(l.weights);
      wtr.u64(l.bias.size());
      wtr.f64_array(l.bias);
    }
  }

  static Network load(BinaryReader& rdr) {
    Shape3 input;
    input.h = static_cast<int>(rdr.u32());
    input.w = static_cast<int>(rdr.u32());
    input.c = static_cast<int>(rdr.u32());
    const std::uint32_t n = rdr.u32();
    std::vector<LayerSpec> specs(n);
    for (auto& s : specs) {
      s.kind = static_cast<LayerKind>(rdr.u32());
      s.filters = static_cast<int>(rdr.u32());
      s.kernel_h = static_cast<int>(rdr.u32());
      s.kernel_w = static_cast<int>(rdr.u32());
      s.pool_h = static_cast<int>(rdr.u32());
      s.pool_w = static_cast<int>(rdr.u32());
      s.units = static_cast<int>(rdr.u32());
      s.drop_rate = rdr.f64();
      s.act = static_cast<Activation>(rdr.u32());
    }
    Network net(input, specs, 0);
    for (auto& l : net.layers_) {
      const std::uint64_t nw = rdr.u64();
      require(nw == l.weights.size(), "weight blob size mismatch while loading network");
      l.weights = rdr.f64_array(nw);
      const std::uint64_t nb = rdr.u64();
      require(nb == l.bias.size(), "bias blob size mismatch while loading network");
      l.bias = rdr.f64_array(nb);
    }
    return net;
  }

 private:
  static void check_finite(const std::vector<double>& v, const std::string& what) {
    double s = 0.0;
    for (double x : v) s += x;
    if (!std::isfinite(s)) throw Error("non-finite value in " + what);
  }

  Shape3 input_shape_;
  std::vector<Layer> layers_;
};

}  // namespace enf::ml
