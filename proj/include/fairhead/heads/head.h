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

#ifndef FAIRHEAD_HEADS_HEAD_H_
#define FAIRHEAD_HEADS_HEAD_H_

#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "fairhead/common/kv_config.h"
#include "fairhead/common/types.h"
#include "fairhead/gbt/gbt.h"

namespace fairhead::heads {

enum class HeadKind : uint8_t {
  kGbt = 0,
  kLogisticRegression = 1,
  kDecisionTree = 2,
  kRandomForest = 3,
  kBalancedRandomForest = 4,
  kMlp = 5,
  kKnn = 6,
  kAdversarialMlp = 7,
};

std::string_view HeadKindName(HeadKind kind);
// Accepts the snake_case names above plus the short forms lr, dt, rf, brf,
// nn. Throws Error(kUnsupportedParams).
HeadKind ParseHeadKind(std::string_view text);

struct LogisticParams {
  double l2 = 1.0;  // penalty on the coefficients, not the intercept
  int max_iterations = 100;
  double tolerance = 1e-8;  // gradient norm
};

struct TreeParams {
  int max_depth = 10;
  int min_samples_leaf = 1;
  double min_weight_leaf = 0.0;
  // Features examined per split; 0 selects all for a single tree and
  // floor(sqrt(k)) for forests.
  int max_features = 0;
};

struct ForestParams {
  int n_trees = 100;
  TreeParams tree = {.max_depth = 12};
};

struct MlpParams {
  int hidden_width = 64;
  int epochs = 200;
  double step_size = 0.05;
};

struct KnnParams {
  int k_neighbors = 10;
};

struct AdversarialParams {
  int hidden_width = 64;
  double adversary_weight = 1.0;
  int epochs = 200;
  double step_size = 0.05;
  uint64_t seed = 0;
};

// Hyperparameters of every head kind; only the block matching the trained
// kind is consulted.
struct HeadParams {
  gbt::GbtParams gbt;
  LogisticParams logistic;
  TreeParams tree;
  ForestParams forest;
  MlpParams mlp;
  KnnParams knn;
  AdversarialParams adversarial;
  int threads = 0;

  // Keys are "<block>.<field>", e.g. gbt.max_depth, mlp.epochs.
  static HeadParams FromConfig(const KvConfig& config);
  KvConfig ToConfig() const;
};

// Sensitive attributes for the adversarial head: one vector of group ids in
// [0, G) per attribute, each of length n.
using AttributeLabels = std::vector<std::vector<int>>;

class HeadModel {
 public:
  virtual ~HeadModel() = default;
  virtual HeadKind kind() const = 0;
  virtual int input_dim() const = 0;
  // Probabilities in [0, 1], one per row. Throws Error(kDimMismatch).
  virtual std::vector<double> PredictProba(const Matrix& x) const = 0;
  // Kind-specific payload, without the kind tag.
  virtual void WritePayload(std::ostream& out) const = 0;
};

// Writes a u32 kind tag followed by the payload.
void WriteHead(const HeadModel& head, std::ostream& out);
std::unique_ptr<HeadModel> ReadHead(std::istream& in);

// Fits one binary head. `attributes` is required by kAdversarialMlp and
// ignored otherwise. Throws kSingleClass, kUnsupportedParams, kDimMismatch.
std::unique_ptr<HeadModel> TrainHead(HeadKind kind, const Matrix& x,
                                     std::span<const int> y,
                                     std::span<const double> weights,
                                     const HeadParams& params, uint64_t seed,
                                     const AttributeLabels* attributes = nullptr);

namespace internal {
// Shared input checks: sizes, 0/1 labels, non-negative weights, finite
// features, both classes with positive weight.
void CheckTrainingInputs(const Matrix& x, std::span<const int> y,
                         std::span<const double> weights);
void CheckInputDim(const Matrix& x, int expected);
}  // namespace internal

}  // namespace fairhead::heads

#endif  // FAIRHEAD_HEADS_HEAD_H_
