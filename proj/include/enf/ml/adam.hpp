// Adam optimizer with bias-corrected moment estimates.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "enf/error.hpp"

namespace enf::ml {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

inline void validate(const AdamConfig& c) {
  require(c.learning_rate > 0.0, "learning rate must be positive");
  require(c.beta1 > 0.0 && c.beta1 < 1.0, "beta1 must lie in (0,1)");
  require(c.beta2 > 0.0 && c.beta2 < 1.0, "beta2 must lie in (0,1)");
  require(c.epsilon > 0.0, "epsilon must be positive");
}

struct AdamState {
  std::vector<double> m;  // first moments
  std::vector<double> v;  // second moments

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// One update, t >= 1. Weights and state are modified in place.
inline void adam_step(std::vector<double>& w, const std::vector<double>& g, AdamState& state,
                      const AdamConfig& cfg, int t) {
  require(t >= 1, "Adam step index starts at 1");
  require(w.size() == g.size() && w.size() == state.m.size() && w.size() == state.v.size(),
          "Adam shape mismatch");
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < w.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    w[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

}  // namespace enf::ml
