#include "enf/ml/network.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "enf/ml/adam.hpp"
#include "enf/ml/train.hpp"
#include "enf/rng.hpp"

namespace {

using enf::Rng;
using enf::ml::Activation;
using enf::ml::LayerSpec;
using enf::ml::Network;
using enf::ml::Shape3;
using enf::ml::Tensor3;

void randomize_weights(Network& net, Rng& rng, double scale = 0.5) {
  for (auto& l : net.layers()) {
    for (auto& w : l.weights) w = rng.gaussian(0.0, scale);
    for (auto& b : l.bias) b = rng.gaussian(0.0, scale);
  }
}

// Margin guard: finite differencing is only valid away from ReLU kinks and
// max-pool ties; resample until all cached preactivations clear the margin.
bool activations_have_margin(const Network& net, const Tensor3& x, double margin) {
  Network::ForwardCache cache;
  Rng rng(1);
  (void)net.forward(x, true, &cache, &rng);
  for (std::size_t li = 0; li < net.layers().size(); ++li) {
    const auto& layer = net.layers()[li];
    const auto& c = cache.layers[li];
    if (layer.spec.kind == enf::ml::LayerKind::Conv2D ||
        layer.spec.kind == enf::ml::LayerKind::Dense) {
      if (layer.spec.act == Activation::Relu) {
        for (double p : c.preact.v) {
          if (std::abs(p) < margin) return false;
        }
      }
    }
    if (layer.spec.kind == enf::ml::LayerKind::MaxPool) {
      // second-best in each window must trail the max by the margin
      const auto& in = c.input;
      for (int oy = 0; oy < layer.out_shape.h; ++oy) {
        for (int ox = 0; ox < layer.out_shape.w; ++ox) {
          for (int ch = 0; ch < layer.out_shape.c; ++ch) {
            double best = -1e300, second = -1e300;
            for (int py = 0; py < layer.ph_eff; ++py) {
              for (int px = 0; px < layer.pw_eff; ++px) {
                const double v = in.at(oy * layer.ph_eff + py, ox * layer.pw_eff + px, ch);
                if (v > best) {
                  second = best;
                  best = v;
                } else if (v > second) {
                  second = v;
                }
              }
            }
            if (layer.ph_eff * layer.pw_eff > 1 && best - second < margin) return false;
          }
        }
      }
    }
  }
  return true;
}

struct FdCheckStats {
  double worst_rel = 0.0;
  int checked = 0;
};

// Central finite differences on the scalar BCE loss; independent of the
// backward pass it verifies.
FdCheckStats check_gradients(Network& net, const Tensor3& x, double y,
                             std::uint64_t dropout_seed) {
  const double h = 1e-6;
  auto loss_of = [&]() {
    Rng drop_rng(dropout_seed);
    Network::ForwardCache cache;
    const auto out = net.forward(x, true, &cache, &drop_rng);
    return enf::ml::bce_with_logits(out[0], y);
  };

  Network::ForwardCache cache;
  Rng drop_rng(dropout_seed);
  const auto out = net.forward(x, true, &cache, &drop_rng);
  auto grads = net.make_grads();
  net.backward(cache, {enf::ml::bce_grad(out[0], y)}, grads);

  FdCheckStats stats;
  for (std::size_t li = 0; li < net.layers().size(); ++li) {
    auto& layer = net.layers()[li];
    auto check_array = [&](std::vector<double>& params, const std::vector<double>& analytic) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double keep = params[i];
        params[i] = keep + h;
        const double lp = loss_of();
        params[i] = keep - h;
        const double lm = loss_of();
        params[i] = keep;
        const double fd = (lp - lm) / (2.0 * h);
        const double rel =
            std::abs(analytic[i] - fd) / std::max({1e-6, std::abs(analytic[i]), std::abs(fd)});
        stats.worst_rel = std::max(stats.worst_rel, rel);
        ++stats.checked;
      }
    };
    check_array(layer.weights, grads.w[li]);
    check_array(layer.bias, grads.b[li]);
  }
  return stats;
}

TEST(Gradients, EveryLayerKindMatchesFiniteDifferences) {
  Rng meta(2024);
  int configs_done = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int kind = trial % 5;
    std::vector<LayerSpec> specs;
    Shape3 in;
    std::uint64_t dropout_seed = 1;
    switch (kind) {
      case 0: {  // Conv2D
        in = {3 + static_cast<int>(meta.uniform_int(4)), 3 + static_cast<int>(meta.uniform_int(6)),
              1 + static_cast<int>(meta.uniform_int(3))};
        const int kh = 2 + static_cast<int>(meta.uniform_int(2));
        specs = {LayerSpec::conv2d(1 + static_cast<int>(meta.uniform_int(3)), kh, kh),
                 LayerSpec::flatten(), LayerSpec::dense(1, Activation::None)};
        break;
      }
      case 1: {  // MaxPool
        in = {2 + static_cast<int>(meta.uniform_int(5)), 2 + static_cast<int>(meta.uniform_int(7)),
              1 + static_cast<int>(meta.uniform_int(3))};
        specs = {LayerSpec::maxpool(2, 2), LayerSpec::flatten(),
                 LayerSpec::dense(1, Activation::None)};
        break;
      }
      case 2: {  // Flatten
        in = {1 + static_cast<int>(meta.uniform_int(4)), 1 + static_cast<int>(meta.uniform_int(5)),
              1 + static_cast<int>(meta.uniform_int(4))};
        specs = {LayerSpec::flatten(), LayerSpec::dense(1, Activation::None)};
        break;
      }
      case 3: {  // Dense stack
        in = {1, 1, 2 + static_cast<int>(meta.uniform_int(10))};
        specs = {LayerSpec::dense(2 + static_cast<int>(meta.uniform_int(6))),
                 LayerSpec::dense(1, Activation::None)};
        break;
      }
      default: {  // Dropout (fixed mask across FD evaluations)
        in = {1, 1, 3 + static_cast<int>(meta.uniform_int(8))};
        specs = {LayerSpec::dense(4), LayerSpec::dropout(0.3),
                 LayerSpec::dense(1, Activation::None)};
        dropout_seed = 77 + static_cast<std::uint64_t>(trial);
        break;
      }
    }

    Network net(in, specs, meta.next_u64());
    Tensor3 x(in);
    const double y = meta.uniform() < 0.5 ? 0.0 : 1.0;
    bool ok = false;
    for (int attempt = 0; attempt < 50 && !ok; ++attempt) {
      Rng wrng(meta.next_u64());
      randomize_weights(net, wrng);
      for (auto& v : x.v) v = wrng.gaussian(0.0, 1.0);
      ok = activations_have_margin(net, x, 1e-3);
    }
    ASSERT_TRUE(ok) << "could not find a kink-free configuration, trial " << trial;

    const auto stats = check_gradients(net, x, y, dropout_seed);
    EXPECT_GT(stats.checked, 0);
    EXPECT_LE(stats.worst_rel, 1e-4) << "trial " << trial << " kind " << kind;
    worst = std::max(worst, stats.worst_rel);
    ++configs_done;
  }
  EXPECT_EQ(configs_done, 100);
  RecordProperty("worst_rel_err", std::to_string(worst));
}

TEST(Gradients, TwoLayerToyNetworkMatchesFiniteDifferences) {
  Shape3 in{1, 1, 4};
  Network net(in, {LayerSpec::dense(5), LayerSpec::dense(1, Activation::None)}, 3);
  Rng rng(10);
  Tensor3 x(in);
  bool ok = false;
  for (int attempt = 0; attempt < 20 && !ok; ++attempt) {
    randomize_weights(net, rng);
    for (auto& v : x.v) v = rng.gaussian();
    ok = activations_have_margin(net, x, 1e-3);
  }
  ASSERT_TRUE(ok);
  const auto stats = check_gradients(net, x, 1.0, 1);
  EXPECT_LE(stats.worst_rel, 1e-4);
}

TEST(Network, ZeroWeightsGiveHalfProbability) {
  Network net({1, 1, 6}, {LayerSpec::dense(4), LayerSpec::dense(1, Activation::None)}, 5);
  for (auto& l : net.layers()) {
    std::fill(l.weights.begin(), l.weights.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
  Tensor3 x({1, 1, 6});
  Rng rng(1);
  for (auto& v : x.v) v = rng.gaussian();
  const auto out = net.forward(x);
  EXPECT_DOUBLE_EQ(enf::ml::sigmoid(out[0]), 0.5);
}

TEST(Network, FreshHeadEmitsLogitZero) {
  // hidden layers are He-initialized but the output layer starts at zero
  Network net({1, 1, 8}, {LayerSpec::dense(16), LayerSpec::dense(1, Activation::None)}, 99);
  Tensor3 x({1, 1, 8});
  Rng rng(2);
  for (auto& v : x.v) v = rng.gaussian();
  EXPECT_DOUBLE_EQ(net.forward(x)[0], 0.0);
}

TEST(Network, DropoutRateZeroMakesTrainingMatchInference) {
  Network net({1, 1, 5}, {LayerSpec::dense(4), LayerSpec::dropout(0.0),
                          LayerSpec::dense(1, Activation::None)},
              7);
  Rng rng(3);
  randomize_weights(net, rng);
  Tensor3 x({1, 1, 5});
  for (auto& v : x.v) v = rng.gaussian();
  Network::ForwardCache cache;
  Rng drop(4);
  const auto train_out = net.forward(x, true, &cache, &drop);
  const auto eval_out = net.forward(x);
  ASSERT_EQ(train_out.size(), eval_out.size());
  EXPECT_DOUBLE_EQ(train_out[0], eval_out[0]);
}

TEST(Network, DropoutMaskIsDeterministicGivenSeed) {
  Network net({1, 1, 10}, {LayerSpec::dense(8), LayerSpec::dropout(0.5),
                           LayerSpec::dense(1, Activation::None)},
              8);
  Rng rng(5);
  randomize_weights(net, rng);
  Tensor3 x({1, 1, 10});
  for (auto& v : x.v) v = rng.gaussian();
  Network::ForwardCache c1, c2;
  Rng d1(42), d2(42);
  const auto o1 = net.forward(x, true, &c1, &d1);
  const auto o2 = net.forward(x, true, &c2, &d2);
  EXPECT_DOUBLE_EQ(o1[0], o2[0]);
}

TEST(Network, ShapeMismatchNamesTheOffendingLayer) {
  try {
    Network net({4, 4, 1},
                {LayerSpec::conv2d(2), LayerSpec::dropout(1.5), LayerSpec::flatten(),
                 LayerSpec::dense(1, Activation::None)},
                1);
    FAIL() << "expected a build error";
  } catch (const enf::Error& e) {
    EXPECT_NE(std::string(e.what()).find("layer 1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("Dropout"), std::string::npos);
  }
  // wrong input shape at forward time
  Network net({1, 1, 4}, {LayerSpec::dense(1, Activation::None)}, 1);
  Tensor3 bad({1, 1, 5});
  EXPECT_THROW(net.forward(bad), enf::Error);
}

TEST(Network, BackwardWithoutCacheThrows) {
  Network net({1, 1, 3}, {LayerSpec::dense(1, Activation::None)}, 1);
  Network::ForwardCache cache;  // never filled
  auto grads = net.make_grads();
  EXPECT_THROW(net.backward(cache, {0.5}, grads), enf::Error);
}

TEST(Network, RejectsNonFiniteInput) {
  Network net({1, 1, 3}, {LayerSpec::dense(1, Activation::None)}, 1);
  Tensor3 x({1, 1, 3});
  x.v[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(net.forward(x), enf::Error);
}

TEST(Network, SaveLoadRoundTripsBitExactly) {
  Network net({3, 5, 1},
              {LayerSpec::conv2d(2), LayerSpec::maxpool(), LayerSpec::flatten(),
               LayerSpec::dense(4), LayerSpec::dropout(0.3), LayerSpec::dense(1, Activation::None)},
              21);
  Rng rng(6);
  randomize_weights(net, rng);
  const std::string path = (std::filesystem::temp_directory_path() / "enf_net.bin").string();
  {
    enf::BinaryWriter w(path);
    net.save(w);
    w.close();
  }
  enf::BinaryReader r(path);
  Network back = Network::load(r);
  Tensor3 x({3, 5, 1});
  for (auto& v : x.v) v = rng.gaussian();
  const auto a = net.forward(x);
  const auto b = back.forward(x);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Adam, ZeroGradientLeavesFreshWeightsUnchanged) {
  std::vector<double> w = {1.0, -2.0, 0.5};
  std::vector<double> g = {0.0, 0.0, 0.0};
  enf::ml::AdamState st(3);
  enf::ml::adam_step(w, g, st, {}, 1);
  EXPECT_EQ(w, (std::vector<double>{1.0, -2.0, 0.5}));
}

TEST(Adam, MomentsDecayUnderZeroGradient) {
  std::vector<double> w = {1.0};
  enf::ml::AdamState st(1);
  enf::ml::AdamConfig cfg;
  enf::ml::adam_step(w, {1.0}, st, cfg, 1);
  const double m1 = st.m[0], v1 = st.v[0];
  enf::ml::adam_step(w, {0.0}, st, cfg, 2);
  EXPECT_DOUBLE_EQ(st.m[0], cfg.beta1 * m1);
  EXPECT_DOUBLE_EQ(st.v[0], cfg.beta2 * v1);
}

TEST(Adam, FirstStepMatchesHandComputation) {
  // with bias correction, step 1 gives w -= lr * g / (|g| + eps)
  enf::ml::AdamConfig cfg;
  cfg.learning_rate = 7.2e-4;
  cfg.beta1 = 0.98;
  cfg.beta2 = 0.99;
  std::vector<double> w = {0.3, -0.7};
  const std::vector<double> g = {0.25, -1.5};
  enf::ml::AdamState st(2);
  enf::ml::adam_step(w, g, st, cfg, 1);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double mhat = g[i];                 // (1-b1)g / (1-b1)
    const double vhat = g[i] * g[i];          // (1-b2)g^2 / (1-b2)
    const double expect = (i == 0 ? 0.3 : -0.7) -
                          cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    EXPECT_NEAR(w[i], expect, 1e-15);
  }
}

TEST(Adam, RejectsShapeMismatch) {
  std::vector<double> w = {1.0, 2.0};
  enf::ml::AdamState st(3);
  EXPECT_THROW(enf::ml::adam_step(w, {0.1, 0.2}, st, {}, 1), enf::Error);
}

std::pair<std::vector<Tensor3>, std::vector<std::vector<double>>> separable_toy(int n,
                                                                                std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Tensor3> X;
  std::vector<std::vector<double>> Y;
  for (int i = 0; i < n; ++i) {
    const double cls = i % 2 ? 1.0 : 0.0;
    Tensor3 x({1, 1, 2});
    x.v[0] = rng.gaussian(cls ? 2.0 : -2.0, 0.4);
    x.v[1] = rng.gaussian(cls ? -1.0 : 1.0, 0.4);
    X.push_back(x);
    Y.push_back({cls});
  }
  return {X, Y};
}

double mean_loss(const Network& net, const std::vector<Tensor3>& X,
                 const std::vector<std::vector<double>>& Y) {
  double total = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const auto out = net.forward(X[i]);
    for (std::size_t k = 0; k < out.size(); ++k) {
      total += enf::ml::bce_with_logits(out[k], Y[i][k]);
    }
  }
  return total / static_cast<double>(X.size());
}

TEST(Training, LossDecreasesOverFiftyAdamSteps) {
  auto [X, Y] = separable_toy(64, 11);
  Network net({1, 1, 2}, {LayerSpec::dense(8), LayerSpec::dense(1, Activation::None)}, 12);
  const double before = mean_loss(net, X, Y);
  EXPECT_NEAR(before, std::log(2.0), 1e-12);  // zero-logit head

  enf::ml::TrainOptions opts;
  opts.adam.learning_rate = 0.05;
  opts.batch_size = 64;  // full batch: one Adam step per epoch
  opts.max_epochs = 50;
  opts.val_fraction = 0.0;
  enf::ml::fit_network(net, X, Y, 2, opts);
  const double after = mean_loss(net, X, Y);
  EXPECT_LT(after, before * 0.5);
  EXPECT_LT(after, 0.1);
}

TEST(Training, EarlyStoppingRestoresBestWeights) {
  auto [X, Y] = separable_toy(100, 13);
  Network net({1, 1, 2}, {LayerSpec::dense(8), LayerSpec::dense(1, Activation::None)}, 14);
  enf::ml::TrainOptions opts;
  opts.adam.learning_rate = 0.02;
  opts.max_epochs = 500;
  opts.patience = 5;
  auto r = enf::ml::fit_network(net, X, Y, 3, opts);
  EXPECT_LT(r.epochs_run, 500);  // plateaued and stopped
  EXPECT_LT(r.best_val_loss, 0.2);
}

TEST(Training, SameSeedGivesIdenticalWeightTrajectories) {
  auto [X, Y] = separable_toy(40, 17);
  enf::ml::TrainOptions opts;
  opts.max_epochs = 10;
  Network a({1, 1, 2}, {LayerSpec::dense(4), LayerSpec::dense(1, Activation::None)}, 20);
  Network b({1, 1, 2}, {LayerSpec::dense(4), LayerSpec::dense(1, Activation::None)}, 20);
  enf::ml::fit_network(a, X, Y, 9, opts);
  enf::ml::fit_network(b, X, Y, 9, opts);
  for (std::size_t li = 0; li < a.layers().size(); ++li) {
    ASSERT_EQ(a.layers()[li].weights, b.layers()[li].weights);
    ASSERT_EQ(a.layers()[li].bias, b.layers()[li].bias);
  }
}

}  // namespace
