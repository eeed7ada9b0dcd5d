// MLP head: dense 100 -> 50 -> 1 over the flattened focused spectrogram.
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "enf/classifiers/classifier.hpp"
#include "enf/ml/network.hpp"
#include "enf/ml/train.hpp"

namespace enf {

class MlpModel final : public BinaryClassifier {
 public:
  MlpModel(std::size_t rows, std::size_t cols, ml::Network net)
      : rows_(rows), cols_(cols), net_(std::move(net)) {}

  Family family() const override { return Family::Mlp; }
  std::size_t input_rows() const override { return rows_; }
  std::size_t input_cols() const override { return cols_; }

  double predict_proba(const Tensor2& grid) const override {
    check_dims(grid);
    ml::Tensor3 x({1, 1, static_cast<int>(grid.size())});
    x.v = grid.v;
    return ml::sigmoid(net_.forward(x)[0]);
  }

  void save_body(BinaryWriter& w) const override {
    w.u64(rows_);
    w.u64(cols_);
    net_.save(w);
  }

  static std::unique_ptr<MlpModel> load_body(BinaryReader& r) {
    const std::size_t rows = r.u64(), cols = r.u64();
    return std::make_unique<MlpModel>(rows, cols, ml::Network::load(r));
  }

  const ml::Network& network() const { return net_; }

 private:
  std::size_t rows_, cols_;
  ml::Network net_;
};

inline std::vector<ml::LayerSpec> mlp_spec() {
  return {ml::LayerSpec::dense(100), ml::LayerSpec::dense(50),
          ml::LayerSpec::dense(1, ml::Activation::None)};
}

inline std::unique_ptr<MlpModel> train_mlp(const std::vector<const Tensor2*>& X,
                                           const std::vector<int>& y, std::uint64_t seed,
                                           const ClassifierOptions& opts = {}) {
  classifier_detail::check_training_set(X, y);
  const int dim = static_cast<int>(X[0]->size());
  ml::Network net({1, 1, dim}, mlp_spec(), derive_seed(seed, 0x4d4c5031));  // "MLP1"

  std::vector<ml::Tensor3> inputs;
  std::vector<std::vector<double>> targets;
  inputs.reserve(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    ml::Tensor3 t({1, 1, dim});
    t.v = X[i]->v;
    inputs.push_back(std::move(t));
    targets.push_back({static_cast<double>(y[i])});
  }

  ml::TrainOptions topts;
  topts.adam = opts.mlp_adam;
  topts.batch_size = opts.batch_size;
  topts.max_epochs = opts.max_epochs;
  topts.patience = opts.patience;
  ml::fit_network(net, inputs, targets, derive_seed(seed, 0x4d4c5032), topts);
  return std::make_unique<MlpModel>(X[0]->rows, X[0]->cols, std::move(net));
}

}  // namespace enf
