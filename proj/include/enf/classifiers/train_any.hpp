// Family dispatch plus the ENFMDL01 model container.
//
// Container layout: magic "ENFMDL01", u32 version, u32 family, training
// metadata (u64 seed, the Adam configuration used for neural families),
// then the family-specific body.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "enf/classifiers/classifier.hpp"
#include "enf/classifiers/cnn.hpp"
#include "enf/classifiers/logreg.hpp"
#include "enf/classifiers/mlp.hpp"
#include "enf/classifiers/naive_bayes.hpp"
#include "enf/classifiers/random_forest.hpp"

namespace enf {

inline std::unique_ptr<BinaryClassifier> train_classifier(Family family,
                                                          const std::vector<const Tensor2*>& X,
                                                          const std::vector<int>& y,
                                                          std::uint64_t seed,
                                                          const ClassifierOptions& opts = {}) {
  switch (family) {
    case Family::LogReg: return train_logreg(X, y);
    case Family::NaiveBayes: return train_nb(X, y);
    case Family::RandomForest: return train_rf(X, y, seed, opts.rf_trees);
    case Family::Mlp: return train_mlp(X, y, seed, opts);
    case Family::Cnn: return train_cnn(X, y, seed, opts);
  }
  throw Error("unknown classifier family");
}

struct ModelMetadata {
  std::uint64_t seed = 0;
  ml::AdamConfig adam{};
};

inline void save_model(const std::string& path, const BinaryClassifier& model,
                       const ModelMetadata& meta = {}) {
  BinaryWriter w(path);
  w.magic("ENFMDL01");
  w.u32(1);  // version
  w.u32(static_cast<std::uint32_t>(model.family()));
  w.u64(meta.seed);
  w.f64(meta.adam.learning_rate);
  w.f64(meta.adam.beta1);
  w.f64(meta.adam.beta2);
  w.f64(meta.adam.epsilon);
  model.save_body(w);
  w.close();
}

inline std::unique_ptr<BinaryClassifier> load_model(const std::string& path,
                                                    ModelMetadata* meta_out = nullptr) {
  BinaryReader r(path);
  r.expect_magic("ENFMDL01");
  const std::uint32_t version = r.u32();
  require(version == 1, "unsupported model container version in " + path);
  const Family family = static_cast<Family>(r.u32());
  ModelMetadata meta;
  meta.seed = r.u64();
  meta.adam.learning_rate = r.f64();
  meta.adam.beta1 = r.f64();
  meta.adam.beta2 = r.f64();
  meta.adam.epsilon = r.f64();
  if (meta_out) *meta_out = meta;
  switch (family) {
    case Family::LogReg: return LogRegModel::load_body(r);
    case Family::NaiveBayes: return NaiveBayesModel::load_body(r);
    case Family::RandomForest: return RandomForestModel::load_body(r);
    case Family::Mlp: return MlpModel::load_body(r);
    case Family::Cnn: return CnnModel::load_body(r);
  }
  throw Error("unknown family in model container: " + path);
}

}  // namespace enf
