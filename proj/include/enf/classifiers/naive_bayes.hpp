// Gaussian naive Bayes with per-feature variance floored at
// 1e-9 x the largest overall feature variance.
#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "enf/classifiers/classifier.hpp"

namespace enf {

class NaiveBayesModel final : public BinaryClassifier {
 public:
  NaiveBayesModel(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), mean_{std::vector<double>(rows * cols, 0.0),
                                        std::vector<double>(rows * cols, 0.0)},
        var_{std::vector<double>(rows * cols, 1.0), std::vector<double>(rows * cols, 1.0)} {}

  Family family() const override { return Family::NaiveBayes; }
  std::size_t input_rows() const override { return rows_; }
  std::size_t input_cols() const override { return cols_; }

  double predict_proba(const Tensor2& grid) const override {
    check_dims(grid);
    double ll[2];
    for (int c = 0; c < 2; ++c) {
      double acc = std::log(prior_[c]);
      const auto& mu = mean_[c];
      const auto& va = var_[c];
      for (std::size_t j = 0; j < mu.size(); ++j) {
        const double d = grid.v[j] - mu[j];
        acc += -0.5 * (std::log(2.0 * 3.141592653589793 * va[j]) + d * d / va[j]);
      }
      ll[c] = acc;
    }
    // stable two-class softmax
    const double m = std::max(ll[0], ll[1]);
    const double e0 = std::exp(ll[0] - m), e1 = std::exp(ll[1] - m);
    return e1 / (e0 + e1);
  }

  void save_body(BinaryWriter& w) const override {
    w.u64(rows_);
    w.u64(cols_);
    w.f64(prior_[0]);
    w.f64(prior_[1]);
    for (int c = 0; c < 2; ++c) w.f64_array(mean_[c]);
    for (int c = 0; c < 2; ++c) w.f64_array(var_[c]);
  }

  static std::unique_ptr<NaiveBayesModel> load_body(BinaryReader& r) {
    const std::size_t rows = r.u64(), cols = r.u64();
    auto m = std::make_unique<NaiveBayesModel>(rows, cols);
    m->prior_[0] = r.f64();
    m->prior_[1] = r.f64();
    for (int c = 0; c < 2; ++c) m->mean_[c] = r.f64_array(rows * cols);
    for (int c = 0; c < 2; ++c) m->var_[c] = r.f64_array(rows * cols);
    return m;
  }

  double prior_[2] = {0.5, 0.5};
  std::vector<double> mean_[2];
  std::vector<double> var_[2];

 private:
  std::size_t rows_, cols_;
};

inline std::unique_ptr<NaiveBayesModel> train_nb(const std::vector<const Tensor2*>& X,
                                                 const std::vector<int>& y,
                                                 double smoothing = 1e-9) {
  classifier_detail::check_training_set(X, y);
  const std::size_t n = X.size(), d = X[0]->size();
  auto model = std::make_unique<NaiveBayesModel>(X[0]->rows, X[0]->cols);

  std::size_t count[2] = {0, 0};
  for (int v : y) ++count[v];
  for (int c = 0; c < 2; ++c) {
    model->prior_[c] = static_cast<double>(count[c]) / static_cast<double>(n);
  }

  for (int c = 0; c < 2; ++c) {
    auto& mu = model->mean_[c];
    auto& va = model->var_[c];
    std::fill(mu.begin(), mu.end(), 0.0);
    std::fill(va.begin(), va.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] != c) continue;
      for (std::size_t j = 0; j < d; ++j) mu[j] += X[i]->v[j];
    }
    for (auto& v : mu) v /= static_cast<double>(count[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] != c) continue;
      for (std::size_t j = 0; j < d; ++j) {
        const double dd = X[i]->v[j] - mu[j];
        va[j] += dd * dd;
      }
    }
    for (auto& v : va) v /= static_cast<double>(count[c]);
  }

  // overall (pooled) per-feature variance drives the smoothing floor
  double max_var = 0.0;
  {
    std::vector<double> mean_all(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) mean_all[j] += X[i]->v[j];
    }
    for (auto& v : mean_all) v /= static_cast<double>(n);
    std::vector<double> var_all(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double dd = X[i]->v[j] - mean_all[j];
        var_all[j] += dd * dd;
      }
    }
    for (double v : var_all) max_var = std::max(max_var, v / static_cast<double>(n));
  }
  const double floor = std::max(smoothing * max_var, 1e-12);
  for (int c = 0; c < 2; ++c) {
    for (auto& v : model->var_[c]) v = std::max(v, floor);
  }
  return model;
}

}  // namespace enf
