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

#ifndef FAIRHEAD_HEADS_MLP_H_
#define FAIRHEAD_HEADS_MLP_H_

#include <span>
#include <vector>

#include "fairhead/heads/head.h"

namespace fairhead::heads {

// One tanh hidden layer feeding a logistic output.
struct MlpWeights {
  Matrix w1;  // hidden x input
  Vector b1;  // hidden
  Vector w2;  // hidden
  double b2 = 0.0;
};

// Softmax classifier of one sensitive attribute on the hidden layer.
struct AdversaryWeights {
  Matrix v;  // groups x hidden
  Vector c;  // groups
};

class MlpHead : public HeadModel {
 public:
  MlpHead(HeadKind kind, MlpWeights weights)
      : kind_(kind), weights_(std::move(weights)) {}

  HeadKind kind() const override { return kind_; }
  int input_dim() const override { return static_cast<int>(weights_.w1.cols()); }
  std::vector<double> PredictProba(const Matrix& x) const override;
  void WritePayload(std::ostream& out) const override;
  static std::unique_ptr<MlpHead> ReadPayload(HeadKind kind, std::istream& in);

  // Hidden-layer activations, n x hidden.
  Matrix Hidden(const Matrix& x) const;
  const MlpWeights& weights() const { return weights_; }

 private:
  HeadKind kind_;
  MlpWeights weights_;
};

// Value and gradients of the adversarial objective. The shared layer (w1,
// b1) receives the gradient of task_loss - lambda * adversary_loss (gradient
// reversal); the task output receives the task gradient and each adversary
// the gradient of its own loss. Losses are weighted means of cross-entropy;
// adversary_loss sums over attributes.
struct AdversarialGradients {
  double task_loss = 0.0;
  double adversary_loss = 0.0;
  MlpWeights task;
  std::vector<AdversaryWeights> adversaries;
};

MlpWeights InitMlpWeights(int input_dim, int hidden_width, uint64_t seed);
// Adversary initialization uses its own random stream, so adding adversaries
// never perturbs the task weights.
std::vector<AdversaryWeights> InitAdversaries(int hidden_width,
                                              const AttributeLabels& attributes,
                                              uint64_t seed);

AdversarialGradients ComputeAdversarialGradients(
    const MlpWeights& task, const std::vector<AdversaryWeights>& adversaries,
    const Matrix& x, std::span<const int> y, std::span<const double> weights,
    const AttributeLabels& attributes, double adversary_weight);

// task_loss - lambda * adversary_loss: the quantity whose shared-layer
// gradient ComputeAdversarialGradients returns.
double SharedObjective(const MlpWeights& task,
                       const std::vector<AdversaryWeights>& adversaries,
                       const Matrix& x, std::span<const int> y,
                       std::span<const double> weights,
                       const AttributeLabels& attributes, double adversary_weight);

// Full-batch gradient descent on the weighted mean log loss.
std::unique_ptr<MlpHead> TrainMlp(const Matrix& x, std::span<const int> y,
                                  std::span<const double> weights,
                                  const MlpParams& params, uint64_t seed);

// Shared layer trained against one adversary per attribute. With
// adversary_weight 0 the task weights equal TrainMlp's for the same seed.
// Throws kSingleClass, kSingleGroup.
std::unique_ptr<MlpHead> TrainAdversarialMlp(const Matrix& x, std::span<const int> y,
                                             std::span<const double> weights,
                                             const AttributeLabels& attributes,
                                             const AdversarialParams& params,
                                             uint64_t seed);

}  // namespace fairhead::heads

#endif  // FAIRHEAD_HEADS_MLP_H_
