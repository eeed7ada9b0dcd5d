// Mini-batch Adam trainer with early stopping on a validation plateau.
#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "enf/error.hpp"
#include "enf/ml/adam.hpp"
#include "enf/ml/network.hpp"
#include "enf/rng.hpp"

namespace enf::ml {

struct TrainOptions {
  AdamConfig adam;
  int batch_size = 32;
  int max_epochs = 100;
  int patience = 10;           // epochs without val improvement before stopping
  int min_epochs = 20;         // warm-up before the plateau check may fire
  double val_fraction = 0.2;   // internal split used for early stopping
  double min_improvement = 1e-4;  // val-loss delta that counts as progress
  double target_train_loss = 0.01;  // converged: stop once train loss sinks below
};

struct FitResult {
  int epochs_run = 0;
  double best_val_loss = 0.0;
  double final_train_loss = 0.0;
};

namespace train_detail {

inline double eval_mean_loss(const Network& net, const std::vector<Tensor3>& X,
                             const std::vector<std::vector<double>>& Y,
                             const std::vector<std::size_t>& idx) {
  if (idx.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i : idx) {
    const auto out = net.forward(X[i]);
    for (std::size_t k = 0; k < out.size(); ++k) total += bce_with_logits(out[k], Y[i][k]);
  }
  return total / static_cast<double>(idx.size());
}

struct WeightSnapshot {
  std::vector<std::vector<double>> w, b;

  static WeightSnapshot take(const Network& net) {
    WeightSnapshot s;
    for (const auto& l : net.layers()) {
      s.w.push_back(l.weights);
      s.b.push_back(l.bias);
    }
    return s;
  }
  void restore(Network& net) const {
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
      net.layers()[i].weights = w[i];
      net.layers()[i].bias = b[i];
    }
  }
};

}  // namespace train_detail

// Trains with sigmoid/BCE heads: every output unit is a logit matched
// against its target in [0,1] (single unit for binary models, one unit per
// class for the multi-label fusion head).
inline FitResult fit_network(Network& net, const std::vector<Tensor3>& X,
                             const std::vector<std::vector<double>>& Y, std::uint64_t seed,
                             const TrainOptions& opts) {
  require(X.size() == Y.size() && !X.empty(), "training data mismatch");
  validate(opts.adam);
  for (const auto& y : Y) {
    require(y.size() == static_cast<std::size_t>(net.output_size()), "target size mismatch");
  }

  Rng rng(derive_seed(seed, 0x46495421));  // "FIT!"

  // Stratified validation split: group by dominant target so a skewed
  // holdout cannot reward a degenerate model.
  std::vector<std::size_t> val_idx, train_idx;
  {
    auto stratum_of = [&](std::size_t i) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < Y[i].size(); ++k) {
        if (Y[i][k] > Y[i][best]) best = k;
      }
      return Y[i][best] >= 0.5 ? best + 1 : 0;  // all-low targets form their own stratum
    };
    std::vector<std::vector<std::size_t>> strata(static_cast<std::size_t>(net.output_size()) + 1);
    for (std::size_t i = 0; i < X.size(); ++i) strata[stratum_of(i)].push_back(i);
    for (auto& group : strata) {
      rng.shuffle(group);
      std::size_t n_val = static_cast<std::size_t>(opts.val_fraction *
                                                   static_cast<double>(group.size()));
      if (group.size() - n_val < 1) n_val = 0;
      for (std::size_t k = 0; k < group.size(); ++k) {
        (k < n_val ? val_idx : train_idx).push_back(group[k]);
      }
    }
    if (train_idx.size() < 2) {
      train_idx.insert(train_idx.end(), val_idx.begin(), val_idx.end());
      val_idx.clear();
    }
  }

  std::vector<AdamState> state_w, state_b;
  for (const auto& l : net.layers()) {
    state_w.emplace_back(l.weights.size());
    state_b.emplace_back(l.bias.size());
  }

  Network::Grads grads = net.make_grads();
  Network::ForwardCache cache;
  FitResult result;
  double best_val = 1e300;
  int bad_epochs = 0;
  int adam_t = 0;
  train_detail::WeightSnapshot best;
  const bool early_stop = !val_idx.empty();

  for (int epoch = 1; epoch <= opts.max_epochs; ++epoch) {
    rng.shuffle(train_idx);
    double train_loss = 0.0;
    for (std::size_t start = 0; start < train_idx.size();
         start += static_cast<std::size_t>(opts.batch_size)) {
      const std::size_t stop =
          std::min(train_idx.size(), start + static_cast<std::size_t>(opts.batch_size));
      grads.zero();
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (std::size_t bi = start; bi < stop; ++bi) {
        const std::size_t i = train_idx[bi];
        const auto out = net.forward(X[i], true, &cache, &rng);
        std::vector<double> dout(out.size());
        for (std::size_t k = 0; k < out.size(); ++k) {
          train_loss += bce_with_logits(out[k], Y[i][k]);
          dout[k] = bce_grad(out[k], Y[i][k]) * inv;
        }
        net.backward(cache, dout, grads);
      }
      ++adam_t;
      for (std::size_t li = 0; li < net.layers().size(); ++li) {
        auto& l = net.layers()[li];
        if (!l.trainable()) continue;
        adam_step(l.weights, grads.w[li], state_w[li], opts.adam, adam_t);
        adam_step(l.bias, grads.b[li], state_b[li], opts.adam, adam_t);
      }
    }
    result.epochs_run = epoch;
    result.final_train_loss =
        train_idx.empty() ? 0.0 : train_loss / static_cast<double>(train_idx.size());
    if (result.final_train_loss < opts.target_train_loss) break;

    if (early_stop) {
      const double val = train_detail::eval_mean_loss(net, X, Y, val_idx);
      if (val < best_val - opts.min_improvement) {
        best_val = val;
        best = train_detail::WeightSnapshot::take(net);
        bad_epochs = 0;
      } else if (++bad_epochs >= opts.patience && epoch >= opts.min_epochs) {
        break;
      }
    }
  }
  if (early_stop && !best.w.empty()) {
    const double final_val = train_detail::eval_mean_loss(net, X, Y, val_idx);
    if (best_val < final_val) {
      best.restore(net);
      result.best_val_loss = best_val;
    } else {
      result.best_val_loss = final_val;
    }
  } else {
    result.best_val_loss = result.final_train_loss;
  }
  return result;
}

}  // namespace enf::ml
