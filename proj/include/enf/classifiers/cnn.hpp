// The convolutional head. Channel widths 32/64/128, a 101-unit dense layer,
// dropout and a single-unit output; kernels are 3x3 at stride 1 with valid
// padding, pools 2x2, both clamped on inputs thinner than the window so the
// stack stays well-formed on focused-spectrogram geometry.
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "enf/classifiers/classifier.hpp"
#include "enf/ml/network.hpp"
#include "enf/ml/train.hpp"

namespace enf {

// Reference output sizes reported for the tuned architecture; kept as
// metadata for consistency checks, not used to size this implementation.
struct CnnReference {
  static constexpr int kChannels[3] = {32, 64, 128};
  static constexpr int kDenseUnits = 101;
  static constexpr int kOutputUnits = 1;
  static constexpr int kFlattenRows = 864;
  static constexpr int kFlattenChannels = 128;
  static constexpr int kFlattenTotal = 110592;  // 864 x 128
};

inline std::vector<ml::LayerSpec> cnn_spec(int dense_units = CnnReference::kDenseUnits,
                                           double dropout = 0.3) {
  using ml::LayerSpec;
  return {
      LayerSpec::conv2d(32, 3, 3),  LayerSpec::maxpool(2, 2),
      LayerSpec::conv2d(64, 3, 3),  LayerSpec::maxpool(2, 2),
      LayerSpec::conv2d(128, 3, 3), LayerSpec::maxpool(2, 2),
      LayerSpec::flatten(),         LayerSpec::dense(dense_units),
      LayerSpec::dropout(dropout),  LayerSpec::dense(1, ml::Activation::None),
  };
}

inline ml::AdamConfig default_cnn_adam() { return {7.2e-4, 0.98, 0.99, 1e-8}; }

class CnnModel final : public BinaryClassifier {
 public:
  CnnModel(std::size_t rows, std::size_t cols, ml::Network net)
      : rows_(rows), cols_(cols), net_(std::move(net)) {}

  Family family() const override { return Family::Cnn; }
  std::size_t input_rows() const override { return rows_; }
  std::size_t input_cols() const override { return cols_; }

  double predict_proba(const Tensor2& grid) const override {
    check_dims(grid);
    ml::Tensor3 x({static_cast<int>(rows_), static_cast<int>(cols_), 1});
    x.v = grid.v;
    return ml::sigmoid(net_.forward(x)[0]);
  }

  void save_body(BinaryWriter& w) const override {
    w.u64(rows_);
    w.u64(cols_);
    net_.save(w);
  }

  static std::unique_ptr<CnnModel> load_body(BinaryReader& r) {
    const std::size_t rows = r.u64(), cols = r.u64();
    return std::make_unique<CnnModel>(rows, cols, ml::Network::load(r));
  }

  const ml::Network& network() const { return net_; }

 private:
  std::size_t rows_, cols_;
  ml::Network net_;
};

inline std::unique_ptr<CnnModel> train_cnn(const std::vector<const Tensor2*>& X,
                                           const std::vector<int>& y,
                                           const std::vector<ml::LayerSpec>& spec,
                                           const ml::AdamConfig& adam, std::uint64_t seed,
                                           const ClassifierOptions& opts = {}) {
  classifier_detail::check_training_set(X, y);
  const int rows = static_cast<int>(X[0]->rows);
  const int cols = static_cast<int>(X[0]->cols);
  ml::Network net({rows, cols, 1}, spec, derive_seed(seed, 0x434e4e31));  // "CNN1"

  std::vector<ml::Tensor3> inputs;
  std::vector<std::vector<double>> targets;
  inputs.reserve(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    ml::Tensor3 t({rows, cols, 1});
    t.v = X[i]->v;
    inputs.push_back(std::move(t));
    targets.push_back({static_cast<double>(y[i])});
  }

  ml::TrainOptions topts;
  topts.adam = adam;
  topts.batch_size = opts.batch_size;
  topts.max_epochs = opts.max_epochs;
  topts.patience = opts.patience;
  ml::fit_network(net, inputs, targets, derive_seed(seed, 0x434e4e32), topts);
  return std::make_unique<CnnModel>(X[0]->rows, X[0]->cols, std::move(net));
}

inline std::unique_ptr<CnnModel> train_cnn(const std::vector<const Tensor2*>& X,
                                           const std::vector<int>& y, std::uint64_t seed,
                                           const ClassifierOptions& opts = {}) {
  return train_cnn(X, y, cnn_spec(opts.cnn_dense_units, opts.cnn_dropout), opts.cnn_adam, seed,
                   opts);
}

}  // namespace enf
