/* Copyright 2026 The Fairhead Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "fairhead/heads/head.h"

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "fairhead/common/binary_io.h"
#include "fairhead/common/error.h"
#include "fairhead/heads/cart.h"
#include "fairhead/heads/gbt_head.h"
#include "fairhead/heads/knn.h"
#include "fairhead/heads/logistic.h"
#include "fairhead/heads/mlp.h"

namespace fairhead::heads {
namespace {

constexpr std::array<std::string_view, 8> kKindNames = {
    "gbt", "logistic_regression", "decision_tree", "random_forest",
    "balanced_random_forest", "mlp", "knn", "adversarial_mlp"};

}  // namespace

std::string_view HeadKindName(HeadKind kind) {
  return kKindNames[static_cast<size_t>(kind)];
}

HeadKind ParseHeadKind(std::string_view text) {
  for (size_t i = 0; i < kKindNames.size(); ++i) {
    if (text == kKindNames[i]) return static_cast<HeadKind>(i);
  }
  if (text == "xgboost") return HeadKind::kGbt;
  if (text == "lr") return HeadKind::kLogisticRegression;
  if (text == "dt") return HeadKind::kDecisionTree;
  if (text == "rf") return HeadKind::kRandomForest;
  if (text == "brf") return HeadKind::kBalancedRandomForest;
  if (text == "nn") return HeadKind::kMlp;
  throw Error(ErrorCode::kUnsupportedParams,
              fmt::format("unknown head kind '{}'", text));
}

HeadParams HeadParams::FromConfig(const KvConfig& c) {
  HeadParams p;
  p.gbt.learning_rate = c.GetDouble("gbt.learning_rate", p.gbt.learning_rate);
  p.gbt.n_estimators = static_cast<int>(c.GetInt("gbt.n_estimators", p.gbt.n_estimators));
  p.gbt.max_depth = static_cast<int>(c.GetInt("gbt.max_depth", p.gbt.max_depth));
  p.gbt.lambda_l2 = c.GetDouble("gbt.lambda_l2", p.gbt.lambda_l2);
  p.gbt.gamma = c.GetDouble("gbt.gamma", p.gbt.gamma);
  p.gbt.min_child_hessian = c.GetDouble("gbt.min_child_hessian", p.gbt.min_child_hessian);
  p.logistic.l2 = c.GetDouble("logistic.l2", p.logistic.l2);
  p.logistic.max_iterations =
      static_cast<int>(c.GetInt("logistic.max_iterations", p.logistic.max_iterations));
  p.tree.max_depth = static_cast<int>(c.GetInt("tree.max_depth", p.tree.max_depth));
  p.tree.min_samples_leaf =
      static_cast<int>(c.GetInt("tree.min_samples_leaf", p.tree.min_samples_leaf));
  p.forest.n_trees = static_cast<int>(c.GetInt("forest.n_trees", p.forest.n_trees));
  p.forest.tree.max_depth =
      static_cast<int>(c.GetInt("forest.max_depth", p.forest.tree.max_depth));
  p.forest.tree.min_samples_leaf = static_cast<int>(
      c.GetInt("forest.min_samples_leaf", p.forest.tree.min_samples_leaf));
  p.forest.tree.max_features =
      static_cast<int>(c.GetInt("forest.max_features", p.forest.tree.max_features));
  p.mlp.hidden_width = static_cast<int>(c.GetInt("mlp.hidden_width", p.mlp.hidden_width));
  p.mlp.epochs = static_cast<int>(c.GetInt("mlp.epochs", p.mlp.epochs));
  p.mlp.step_size = c.GetDouble("mlp.step_size", p.mlp.step_size);
  p.knn.k_neighbors = static_cast<int>(c.GetInt("knn.k_neighbors", p.knn.k_neighbors));
  p.adversarial.hidden_width = static_cast<int>(
      c.GetInt("adversarial.hidden_width", p.adversarial.hidden_width));
  p.adversarial.adversary_weight =
      c.GetDouble("adversarial.adversary_weight", p.adversarial.adversary_weight);
  p.adversarial.epochs =
      static_cast<int>(c.GetInt("adversarial.epochs", p.adversarial.epochs));
  p.adversarial.step_size = c.GetDouble("adversarial.step_size", p.adversarial.step_size);
  return p;
}

KvConfig HeadParams::ToConfig() const {
  KvConfig c;
  const auto set_d = [&](const char* key, double v) { c.Set(key, FormatDouble(v)); };
  const auto set_i = [&](const char* key, int v) { c.Set(key, std::to_string(v)); };
  set_d("gbt.learning_rate", gbt.learning_rate);
  set_i("gbt.n_estimators", gbt.n_estimators);
  set_i("gbt.max_depth", gbt.max_depth);
  set_d("gbt.lambda_l2", gbt.lambda_l2);
  set_d("gbt.gamma", gbt.gamma);
  set_d("gbt.min_child_hessian", gbt.min_child_hessian);
  set_d("logistic.l2", logistic.l2);
  set_i("logistic.max_iterations", logistic.max_iterations);
  set_i("tree.max_depth", tree.max_depth);
  set_i("tree.min_samples_leaf", tree.min_samples_leaf);
  set_i("forest.n_trees", forest.n_trees);
  set_i("forest.max_depth", forest.tree.max_depth);
  set_i("forest.min_samples_leaf", forest.tree.min_samples_leaf);
  set_i("forest.max_features", forest.tree.max_features);
  set_i("mlp.hidden_width", mlp.hidden_width);
  set_i("mlp.epochs", mlp.epochs);
  set_d("mlp.step_size", mlp.step_size);
  set_i("knn.k_neighbors", knn.k_neighbors);
  set_i("adversarial.hidden_width", adversarial.hidden_width);
  set_d("adversarial.adversary_weight", adversarial.adversary_weight);
  set_i("adversarial.epochs", adversarial.epochs);
  set_d("adversarial.step_size", adversarial.step_size);
  return c;
}

namespace internal {

void CheckTrainingInputs(const Matrix& x, std::span<const int> y,
                         std::span<const double> weights) {
  const size_t n = static_cast<size_t>(x.rows());
  if (y.size() != n || weights.size() != n) {
    throw Error(ErrorCode::kDimMismatch,
                fmt::format("{} rows, {} labels, {} weights", n, y.size(),
                            weights.size()));
  }
  if (x.cols() == 0) throw Error(ErrorCode::kDimMismatch, "no features");
  double positive = 0.0;
  double negative = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (y[i] != 0 && y[i] != 1) {
      throw Error(ErrorCode::kUnsupportedParams,
                  fmt::format("label {} at row {} is not 0/1", y[i], i));
    }
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw Error(ErrorCode::kUnsupportedParams,
                  fmt::format("weight {} at row {}", weights[i], i));
    }
    (y[i] == 1 ? positive : negative) += weights[i];
  }
  if (!x.allFinite()) {
    throw Error(ErrorCode::kNonFiniteFeature, "non-finite feature value");
  }
  if (!(positive > 0.0) || !(negative > 0.0)) {
    throw Error(ErrorCode::kSingleClass,
                "need at least one positive and one negative with weight > 0");
  }
}

void CheckInputDim(const Matrix& x, int expected) {
  if (x.cols() != expected) {
    throw Error(ErrorCode::kDimMismatch,
                fmt::format("input has {} columns, head expects {}", x.cols(),
                            expected));
  }
}

}  // namespace internal

void WriteHead(const HeadModel& head, std::ostream& out) {
  BinaryWriter(out).WriteU32(static_cast<uint32_t>(head.kind()));
  head.WritePayload(out);
}

std::unique_ptr<HeadModel> ReadHead(std::istream& in) {
  const uint32_t tag = BinaryReader(in).ReadU32();
  if (tag >= kKindNames.size()) {
    throw Error(ErrorCode::kInvalidSpec, fmt::format("unknown head tag {}", tag));
  }
  const HeadKind kind = static_cast<HeadKind>(tag);
  switch (kind) {
    case HeadKind::kGbt:
      return std::make_unique<GbtHead>(gbt::GbtModel::Read(in));
    case HeadKind::kLogisticRegression:
      return LogisticRegression::ReadPayload(in);
    case HeadKind::kDecisionTree:
      return DecisionTreeHead::ReadPayload(in);
    case HeadKind::kRandomForest:
    case HeadKind::kBalancedRandomForest:
      return ForestHead::ReadPayload(kind, in);
    case HeadKind::kMlp:
    case HeadKind::kAdversarialMlp:
      return MlpHead::ReadPayload(kind, in);
    case HeadKind::kKnn:
      return KnnHead::ReadPayload(in);
  }
  throw Error(ErrorCode::kInvalidSpec, "unknown head kind");
}

std::unique_ptr<HeadModel> TrainHead(HeadKind kind, const Matrix& x,
                                     std::span<const int> y,
                                     std::span<const double> weights,
                                     const HeadParams& params, uint64_t seed,
                                     const AttributeLabels* attributes) {
  switch (kind) {
    case HeadKind::kGbt: {
      gbt::GbtParams p = params.gbt;
      p.seed = seed;
      if (p.threads == 0) p.threads = params.threads;
      return std::make_unique<GbtHead>(gbt::FitGbt(x, y, weights, p));
    }
    case HeadKind::kLogisticRegression:
      return std::make_unique<LogisticRegression>(
          LogisticRegression::Fit(x, y, weights, params.logistic));
    case HeadKind::kDecisionTree:
      return DecisionTreeHead::Fit(x, y, weights, params.tree, seed);
    case HeadKind::kRandomForest:
      return ForestHead::Fit(x, y, weights, params.forest, false, seed, params.threads);
    case HeadKind::kBalancedRandomForest:
      return ForestHead::Fit(x, y, weights, params.forest, true, seed, params.threads);
    case HeadKind::kMlp:
      return TrainMlp(x, y, weights, params.mlp, seed);
    case HeadKind::kKnn:
      return KnnHead::Fit(x, y, weights, params.knn, params.threads);
    case HeadKind::kAdversarialMlp:
      if (attributes == nullptr) {
        throw Error(ErrorCode::kUnsupportedParams,
                    "adversarial_mlp needs sensitive attribute labels");
      }
      return TrainAdversarialMlp(x, y, weights, *attributes, params.adversarial, seed);
  }
  throw Error(ErrorCode::kUnsupportedParams, "unknown head kind");
}

}  // namespace fairhead::heads
