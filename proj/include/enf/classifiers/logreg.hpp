// L2-regularized logistic regression, C = 1.0, fit by full-batch gradient
// descent with backtracking line search.
#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "enf/classifiers/classifier.hpp"
#include "enf/ml/network.hpp"  // sigmoid / bce

namespace enf {

class LogRegModel final : public BinaryClassifier {
 public:
  LogRegModel(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), w_(rows * cols, 0.0) {}

  Family family() const override { return Family::LogReg; }
  std::size_t input_rows() const override { return rows_; }
  std::size_t input_cols() const override { return cols_; }

  double predict_proba(const Tensor2& grid) const override {
    check_dims(grid);
    double z = b_;
    for (std::size_t i = 0; i < w_.size(); ++i) z += w_[i] * grid.v[i];
    return ml::sigmoid(z);
  }

  void save_body(BinaryWriter& w) const override {
    w.u64(rows_);
    w.u64(cols_);
    w.f64_array(w_);
    w.f64(b_);
  }

  static std::unique_ptr<LogRegModel> load_body(BinaryReader& r) {
    const std::size_t rows = r.u64(), cols = r.u64();
    auto m = std::make_unique<LogRegModel>(rows, cols);
    m->w_ = r.f64_array(rows * cols);
    m->b_ = r.f64();
    return m;
  }

  std::vector<double>& weights() { return w_; }
  double& intercept() { return b_; }

 private:
  std::size_t rows_, cols_;
  std::vector<double> w_;
  double b_ = 0.0;
};

// Objective: 0.5 ||w||^2 + C * sum_i log(1 + exp(-y_i f(x_i))), C fixed at 1.
// The intercept is not regularized.
inline std::unique_ptr<LogRegModel> train_logreg(const std::vector<const Tensor2*>& X,
                                                 const std::vector<int>& y,
                                                 int max_iters = 2000, double grad_tol = 1e-5) {
  classifier_detail::check_training_set(X, y);
  constexpr double kC = 1.0;
  const std::size_t n = X.size();
  const std::size_t d = X[0]->size();
  auto model = std::make_unique<LogRegModel>(X[0]->rows, X[0]->cols);
  std::vector<double>& w = model->weights();
  double& b = model->intercept();

  auto objective = [&](const std::vector<double>& wv, double bv) {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = bv;
      const auto& x = X[i]->v;
      for (std::size_t j = 0; j < d; ++j) z += wv[j] * x[j];
      loss += ml::bce_with_logits(z, static_cast<double>(y[i]));
    }
    double reg = 0.0;
    for (double v : wv) reg += v * v;
    return kC * loss + 0.5 * reg;
  };

  std::vector<double> grad_w(d), trial_w(d);
  double step = 1.0 / static_cast<double>(n);
  double fw = objective(w, b);
  for (int iter = 0; iter < max_iters; ++iter) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = b;
      const auto& x = X[i]->v;
      for (std::size_t j = 0; j < d; ++j) z += w[j] * x[j];
      const double g = ml::bce_grad(z, static_cast<double>(y[i]));
      for (std::size_t j = 0; j < d; ++j) grad_w[j] += g * x[j];
      grad_b += g;
    }
    double gmax = std::abs(grad_b * kC);
    double gnorm2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      grad_w[j] = kC * grad_w[j] + w[j];  // + d/dw of 0.5||w||^2
      gmax = std::max(gmax, std::abs(grad_w[j]));
      gnorm2 += grad_w[j] * grad_w[j];
    }
    grad_b *= kC;
    gnorm2 += grad_b * grad_b;
    if (gmax < grad_tol) break;

    // backtracking line search on the full objective
    double alpha = step * 4.0;
    double fnew = fw;
    double bnew = b;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t j = 0; j < d; ++j) trial_w[j] = w[j] - alpha * grad_w[j];
      bnew = b - alpha * grad_b;
      fnew = objective(trial_w, bnew);
      if (fnew <= fw - 0.25 * alpha * gnorm2) break;
      alpha *= 0.5;
    }
    if (fnew >= fw) break;  // no progress possible at any step size
    w.swap(trial_w);
    b = bnew;
    fw = fnew;
    step = alpha;
  }
  return model;
}

}  // namespace enf
