// Random forest: 100 trees grown to purity, sqrt(d) feature candidates per
// split, bootstrap sampling per tree. Probability = fraction of trees
// voting positive.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "enf/classifiers/classifier.hpp"
#include "enf/rng.hpp"

namespace enf {

struct TreeNode {
  std::int32_t feature = -1;  // -1: leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t label = 0;  // leaf vote
};

class RandomForestModel final : public BinaryClassifier {
 public:
  RandomForestModel(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  Family family() const override { return Family::RandomForest; }
  std::size_t input_rows() const override { return rows_; }
  std::size_t input_cols() const override { return cols_; }

  double predict_proba(const Tensor2& grid) const override {
    check_dims(grid);
    int votes = 0;
    for (const auto& tree : trees_) {
      int node = 0;
      while (tree[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& nd = tree[static_cast<std::size_t>(node)];
        node = grid.v[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
      }
      votes += tree[static_cast<std::size_t>(node)].label;
    }
    return static_cast<double>(votes) / static_cast<double>(trees_.size());
  }

  void save_body(BinaryWriter& w) const override {
    w.u64(rows_);
    w.u64(cols_);
    w.u32(static_cast<std::uint32_t>(trees_.size()));
    for (const auto& tree : trees_) {
      w.u32(static_cast<std::uint32_t>(tree.size()));
      for (const auto& nd : tree) {
        w.u32(static_cast<std::uint32_t>(nd.feature));
        w.f64(nd.threshold);
        w.u32(static_cast<std::uint32_t>(nd.left));
        w.u32(static_cast<std::uint32_t>(nd.right));
        w.u32(static_cast<std::uint32_t>(nd.label));
      }
    }
  }

  static std::unique_ptr<RandomForestModel> load_body(BinaryReader& r) {
    const std::size_t rows = r.u64(), cols = r.u64();
    auto m = std::make_unique<RandomForestModel>(rows, cols);
    const std::uint32_t n_trees = r.u32();
    m->trees_.resize(n_trees);
    for (auto& tree : m->trees_) {
      tree.resize(r.u32());
      for (auto& nd : tree) {
        nd.feature = static_cast<std::int32_t>(r.u32());
        nd.threshold = r.f64();
        nd.left = static_cast<std::int32_t>(r.u32());
        nd.right = static_cast<std::int32_t>(r.u32());
        nd.label = static_cast<std::int32_t>(r.u32());
      }
    }
    return m;
  }

  std::vector<std::vector<TreeNode>> trees_;

 private:
  std::size_t rows_, cols_;
};

namespace rf_detail {

struct TreeBuilder {
  const std::vector<const Tensor2*>& X;
  const std::vector<int>& y;
  std::size_t dim;
  std::size_t mtry;
  Rng& rng;
  std::vector<TreeNode> nodes;
  std::vector<std::size_t> feature_pool;  // scratch for candidate draws

  int grow(std::vector<std::size_t>& idx) {
    const int me = static_cast<int>(nodes.size());
    nodes.emplace_back();

    std::size_t pos = 0;
    for (std::size_t i : idx) pos += static_cast<std::size_t>(y[i]);
    if (pos == 0 || pos == idx.size() || idx.size() < 2) {
      nodes[static_cast<std::size_t>(me)].label = pos * 2 > idx.size() ? 1 : 0;
      return me;
    }

    // sample mtry distinct candidate features
    for (std::size_t k = 0; k < mtry; ++k) {
      const std::size_t j = k + rng.uniform_int(dim - k);
      std::swap(feature_pool[k], feature_pool[j]);
    }

    double best_gain = 0.0;
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
    const double n = static_cast<double>(idx.size());
    const double parent_gini =
        1.0 - std::pow(pos / n, 2) - std::pow((n - pos) / n, 2);

    std::vector<std::pair<double, int>> vals(idx.size());
    for (std::size_t k = 0; k < mtry; ++k) {
      const std::size_t f = feature_pool[k];
      for (std::size_t i = 0; i < idx.size(); ++i) {
        vals[i] = {X[idx[i]]->v[f], y[idx[i]]};
      }
      std::sort(vals.begin(), vals.end());
      // scan split points between distinct consecutive values
      double left_pos = 0.0;
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        left_pos += vals[i].second;
        if (vals[i].first == vals[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = n - nl;
        const double rp = pos - left_pos;
        const double gl = 1.0 - std::pow(left_pos / nl, 2) - std::pow((nl - left_pos) / nl, 2);
        const double gr = 1.0 - std::pow(rp / nr, 2) - std::pow((nr - rp) / nr, 2);
        const double gain = parent_gini - (nl / n) * gl - (nr / n) * gr;
        if (gain > best_gain + 1e-15) {
          best_gain = gain;
          best_feature = static_cast<std::int32_t>(f);
          best_threshold = 0.5 * (vals[i].first + vals[i + 1].first);
        }
      }
    }

    if (best_feature < 0) {  // all candidates constant or no useful split
      nodes[static_cast<std::size_t>(me)].label = pos * 2 > idx.size() ? 1 : 0;
      return me;
    }

    std::vector<std::size_t> left_idx, right_idx;
    for (std::size_t i : idx) {
      (X[i]->v[static_cast<std::size_t>(best_feature)] <= best_threshold ? left_idx : right_idx)
          .push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = grow(left_idx);
    const int r = grow(right_idx);
    auto& nd = nodes[static_cast<std::size_t>(me)];
    nd.feature = best_feature;
    nd.threshold = best_threshold;
    nd.left = l;
    nd.right = r;
    return me;
  }
};

}  // namespace rf_detail

inline std::unique_ptr<RandomForestModel> train_rf(const std::vector<const Tensor2*>& X,
                                                   const std::vector<int>& y, std::uint64_t seed,
                                                   int n_trees = 100) {
  classifier_detail::check_training_set(X, y);
  const std::size_t n = X.size();
  const std::size_t dim = X[0]->size();
  const std::size_t mtry =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(dim))));
  auto model = std::make_unique<RandomForestModel>(X[0]->rows, X[0]->cols);
  model->trees_.resize(static_cast<std::size_t>(n_trees));

  for (int t = 0; t < n_trees; ++t) {
    Rng rng(derive_seed(seed, 0x52464f52, static_cast<std::uint64_t>(t)));  // "RFOR"
    std::vector<std::size_t> boot(n);
    for (auto& i : boot) i = rng.uniform_int(n);
    rf_detail::TreeBuilder builder{X, y, dim, mtry, rng, {}, {}};
    builder.feature_pool.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) builder.feature_pool[j] = j;
    // a bootstrap draw can be single-class; the root then becomes a leaf
    builder.grow(boot);
    model->trees_[static_cast<std::size_t>(t)] = std::move(builder.nodes);
  }
  return model;
}

}  // namespace enf
