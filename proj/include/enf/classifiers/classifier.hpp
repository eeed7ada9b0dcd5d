// Uniform interface over the five classifier families. Every model consumes
// a focused-spectrogram grid (the non-CNN families flatten it internally)
// and emits a probability in [0,1]; downstream fusion code never branches on
// the family.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "enf/error.hpp"
#include "enf/io_binary.hpp"
#include "enf/ml/adam.hpp"
#include "enf/tensor.hpp"

namespace enf {

enum class Family : std::uint32_t { LogReg = 0, NaiveBayes = 1, RandomForest = 2, Mlp = 3, Cnn = 4 };

constexpr std::array<Family, 5> kAllFamilies = {Family::LogReg, Family::NaiveBayes,
                                                Family::RandomForest, Family::Mlp, Family::Cnn};

inline std::string to_string(Family f) {
  switch (f) {
    case Family::LogReg: return "LogReg";
    case Family::NaiveBayes: return "NB";
    case Family::RandomForest: return "RF";
    case Family::Mlp: return "MLP";
    case Family::Cnn: return "CNN";
  }
  return "?";
}

class BinaryClassifier {
 public:
  virtual ~BinaryClassifier() = default;

  virtual Family family() const = 0;
  virtual std::size_t input_rows() const = 0;
  virtual std::size_t input_cols() const = 0;

  // Pure and safe to call concurrently on a shared const model.
  virtual double predict_proba(const Tensor2& grid) const = 0;

  virtual void save_body(BinaryWriter& w) const = 0;

 protected:
  void check_dims(const Tensor2& grid) const {
    require(grid.rows == input_rows() && grid.cols == input_cols(),
            "input dims mismatch: got " + std::to_string(grid.rows) + "x" +
                std::to_string(grid.cols) + ", model wants " + std::to_string(input_rows()) +
                "x" + std::to_string(input_cols()));
  }
};

// Knobs shared by the training entry points. The CNN's Adam configuration
// defaults to the tuned values; the MLP uses stock Adam.
struct ClassifierOptions {
  ml::AdamConfig cnn_adam{7.2e-4, 0.98, 0.99, 1e-8};
  ml::AdamConfig mlp_adam{};
  int batch_size = 32;
  int max_epochs = 100;
  int patience = 10;
  int cnn_dense_units = 101;
  double cnn_dropout = 0.3;
  int rf_trees = 100;
};

namespace classifier_detail {

inline void check_training_set(const std::vector<const Tensor2*>& X, const std::vector<int>& y) {
  require(!X.empty() && X.size() == y.size(), "empty or mismatched training set");
  bool has0 = false, has1 = false;
  for (int v : y) {
    require(v == 0 || v == 1, "labels must be 0/1");
    (v ? has1 : has0) = true;
  }
  require(has0 && has1, "training set must contain both classes");
  for (const auto* g : X) {
    require(g->rows == X[0]->rows && g->cols == X[0]->cols, "inconsistent input dims");
  }
}

inline std::vector<double> flatten(const Tensor2& g) { return g.v; }

}  // namespace classifier_detail

}  // namespace enf
