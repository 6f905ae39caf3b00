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

#include "fairhead/heads/mlp.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fairhead/common/binary_io.h"
#include "fairhead/common/error.h"
#include "fairhead/common/random.h"

namespace fairhead::heads {
namespace {

constexpr uint64_t kTaskStream = 1;
constexpr uint64_t kAdversaryStream = 2;

Eigen::MatrixXd HiddenActivations(const MlpWeights& w, const Matrix& x) {
  Eigen::MatrixXd a = x * w.w1.transpose();
  a.rowwise() += w.b1.transpose();
  return a.array().tanh().matrix();
}

int GroupCount(const std::vector<int>& groups) {
  int max_group = -1;
  for (int g : groups) {
    if (g < 0) throw Error(ErrorCode::kUnsupportedParams, "negative attribute group");
    max_group = std::max(max_group, g);
  }
  return max_group + 1;
}

void CheckAttributes(const AttributeLabels& attributes, size_t n) {
  for (size_t a = 0; a < attributes.size(); ++a) {
    if (attributes[a].size() != n) {
      throw Error(ErrorCode::kDimMismatch,
                  fmt::format("attribute {} has {} labels for {} rows", a,
                              attributes[a].size(), n));
    }
    std::vector<char> present(static_cast<size_t>(GroupCount(attributes[a])), 0);
    for (int g : attributes[a]) present[g] = 1;
    if (std::count(present.begin(), present.end(), 1) < 2) {
      throw Error(ErrorCode::kSingleGroup,
                  fmt::format("attribute {} has fewer than two groups", a));
    }
  }
}

struct Losses {
  double task = 0.0;
  double adversary = 0.0;
};

// Shared forward/backward pass. When `grads` is null only the losses are
// computed.
Losses Evaluate(const MlpWeights& task, const std::vector<AdversaryWeights>& adversaries,
                const Matrix& x, std::span<const int> y, std::span<const double> weights,
                const AttributeLabels& attributes, double lambda,
                AdversarialGradients* grads) {
  const Eigen::Index n = x.rows();
  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;
  const Eigen::MatrixXd hidden = HiddenActivations(task, x);
  const Eigen::VectorXd z = (hidden * task.w2).array() + task.b2;

  Losses losses;
  Eigen::VectorXd dz(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double zi = z(i);
    const double softplus = zi > 0.0 ? zi + std::log1p(std::exp(-zi)) : std::log1p(std::exp(zi));
    losses.task += weights[i] * (softplus - (y[i] == 1 ? zi : 0.0));
    const double p = 1.0 / (1.0 + std::exp(-zi));
    dz(i) = weights[i] * (p - y[i]) / weight_sum;
  }
  losses.task /= weight_sum;

  Eigen::MatrixXd d_hidden_adv = Eigen::MatrixXd::Zero(n, hidden.cols());
  if (grads) grads->adversaries.resize(adversaries.size());
  for (size_t a = 0; a < adversaries.size(); ++a) {
    const AdversaryWeights& adv = adversaries[a];
    Eigen::MatrixXd logits = hidden * adv.v.transpose();
    logits.rowwise() += adv.c.transpose();
    const Eigen::Index groups = logits.cols();
    Eigen::MatrixXd d_logits(n, groups);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = logits.row(i).maxCoeff();
      double denom = 0.0;
      for (Eigen::Index g = 0; g < groups; ++g) denom += std::exp(logits(i, g) - m);
      const double log_denom = std::log(denom) + m;
      const int target = attributes[a][i];
      loss += weights[i] * (log_denom - logits(i, target));
      for (Eigen::Index g = 0; g < groups; ++g) {
        const double q = std::exp(logits(i, g) - log_denom);
        d_logits(i, g) = weights[i] * (q - (g == target ? 1.0 : 0.0)) / weight_sum;
      }
    }
    losses.adversary += loss / weight_sum;
    if (grads) {
      grads->adversaries[a].v = d_logits.transpose() * hidden;
      grads->adversaries[a].c = d_logits.colwise().sum().transpose();
      d_hidden_adv += d_logits * adv.v;
    }
  }
  if (!grads) return losses;

  grads->task_loss = losses.task;
  grads->adversary_loss = losses.adversary;
  grads->task.w2 = hidden.transpose() * dz;
  grads->task.b2 = dz.sum();
  const Eigen::MatrixXd d_hidden = dz * task.w2.transpose() - lambda * d_hidden_adv;
  const Eigen::MatrixXd d_pre =
      d_hidden.array() * (1.0 - hidden.array().square());
  grads->task.w1 = d_pre.transpose() * x;
  grads->task.b1 = d_pre.colwise().sum().transpose();
  return losses;
}

std::unique_ptr<MlpHead> Train(HeadKind kind, const Matrix& x, std::span<const int> y,
                               std::span<const double> weights,
                               const AttributeLabels& attributes, int hidden_width,
                               int epochs, double step_size, double lambda,
                               uint64_t seed) {
  internal::CheckTrainingInputs(x, y, weights);
  if (hidden_width < 1 || epochs < 1 || !(step_size > 0.0) || !(lambda >= 0.0)) {
    throw Error(ErrorCode::kUnsupportedParams, "invalid network parameters");
  }
  CheckAttributes(attributes, y.size());
  MlpWeights task = InitMlpWeights(static_cast<int>(x.cols()), hidden_width, seed);
  std::vector<AdversaryWeights> adversaries =
      InitAdversaries(hidden_width, attributes, seed);
  AdversarialGradients grads;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    Evaluate(task, adversaries, x, y, weights, attributes, lambda, &grads);
    task.w1 -= step_size * grads.task.w1;
    task.b1 -= step_size * grads.task.b1;
    task.w2 -= step_size * grads.task.w2;
    task.b2 -= step_size * grads.task.b2;
    for (size_t a = 0; a < adversaries.size(); ++a) {
      adversaries[a].v -= step_size * grads.adversaries[a].v;
      adversaries[a].c -= step_size * grads.adversaries[a].c;
    }
  }
  return std::make_unique<MlpHead>(kind, std::move(task));
}

}  // namespace

MlpWeights InitMlpWeights(int input_dim, int hidden_width, uint64_t seed) {
  Rng rng(Rng::Derive(seed, kTaskStream));
  MlpWeights w;
  w.w1.resize(hidden_width, input_dim);
  const double scale1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (int h = 0; h < hidden_width; ++h) {
    for (int j = 0; j < input_dim; ++j) w.w1(h, j) = scale1 * rng.Normal();
  }
  w.b1 = Vector::Zero(hidden_width);
  w.w2.resize(hidden_width);
  const double scale2 = 1.0 / std::sqrt(static_cast<double>(hidden_width));
  for (int h = 0; h < hidden_width; ++h) w.w2(h) = scale2 * rng.Normal();
  w.b2 = 0.0;
  return w;
}

std::vector<AdversaryWeights> InitAdversaries(int hidden_width,
                                              const AttributeLabels& attributes,
                                              uint64_t seed) {
  Rng rng(Rng::Derive(seed, kAdversaryStream));
  const double scale = 1.0 / std::sqrt(static_cast<double>(hidden_width));
  std::vector<AdversaryWeights> out(attributes.size());
  for (size_t a = 0; a < attributes.size(); ++a) {
    const int groups = GroupCount(attributes[a]);
    out[a].v.resize(groups, hidden_width);
    for (int g = 0; g < groups; ++g) {
      for (int h = 0; h < hidden_width; ++h) out[a].v(g, h) = scale * rng.Normal();
    }
    out[a].c = Vector::Zero(groups);
  }
  return out;
}

AdversarialGradients ComputeAdversarialGradients(
    const MlpWeights& task, const std::vector<AdversaryWeights>& adversaries,
    const Matrix& x, std::span<const int> y, std::span<const double> weights,
    const AttributeLabels& attributes, double adversary_weight) {
  AdversarialGradients grads;
  Evaluate(task, adversaries, x, y, weights, attributes, adversary_weight, &grads);
  return grads;
}

double SharedObjective(const MlpWeights& task,
                       const std::vector<AdversaryWeights>& adversaries,
                       const Matrix& x, std::span<const int> y,
                       std::span<const double> weights,
                       const AttributeLabels& attributes, double adversary_weight) {
  const Losses l = Evaluate(task, adversaries, x, y, weights, attributes,
                            adversary_weight, nullptr);
  return l.task - adversary_weight * l.adversary;
}

std::unique_ptr<MlpHead> TrainMlp(const Matrix& x, std::span<const int> y,
                                  std::span<const double> weights,
                                  const MlpParams& params, uint64_t seed) {
  return Train(HeadKind::kMlp, x, y, weights, {}, params.hidden_width,
               params.epochs, params.step_size, 0.0, seed);
}

std::unique_ptr<MlpHead> TrainAdversarialMlp(const Matrix& x, std::span<const int> y,
                                             std::span<const double> weights,
                                             const AttributeLabels& attributes,
                                             const AdversarialParams& params,
                                             uint64_t seed) {
  if (attributes.empty()) {
    throw Error(ErrorCode::kUnsupportedParams,
                "adversarial head needs at least one sensitive attribute");
  }
  return Train(HeadKind::kAdversarialMlp, x, y, weights, attributes,
               params.hidden_width, params.epochs, params.step_size,
               params.adversary_weight, seed);
}

Matrix MlpHead::Hidden(const Matrix& x) const {
  internal::CheckInputDim(x, input_dim());
  return HiddenActivations(weights_, x);
}

std::vector<double> MlpHead::PredictProba(const Matrix& x) const {
  const Eigen::MatrixXd hidden = Hidden(x);
  const Eigen::VectorXd z = (hidden * weights_.w2).array() + weights_.b2;
  std::vector<double> p(static_cast<size_t>(x.rows()));
  for (Eigen::Index i = 0; i < z.size(); ++i) p[i] = 1.0 / (1.0 + std::exp(-z(i)));
  return p;
}

void MlpHead::WritePayload(std::ostream& out) const {
  BinaryWriter w(out);
  const int hidden = static_cast<int>(weights_.w1.rows());
  const int input = static_cast<int>(weights_.w1.cols());
  w.WriteU32(static_cast<uint32_t>(input));
  w.WriteU32(static_cast<uint32_t>(hidden));
  for (int h = 0; h < hidden; ++h) {
    for (int j = 0; j < input; ++j) w.WriteF64(weights_.w1(h, j));
  }
  for (int h = 0; h < hidden; ++h) w.WriteF64(weights_.b1(h));
  for (int h = 0; h < hidden; ++h) w.WriteF64(weights_.w2(h));
  w.WriteF64(weights_.b2);
}

std::unique_ptr<MlpHead> MlpHead::ReadPayload(HeadKind kind, std::istream& in) {
  BinaryReader r(in);
  const int input = static_cast<int>(r.ReadU32());
  const int hidden = static_cast<int>(r.ReadU32());
  MlpWeights w;
  w.w1.resize(hidden, input);
  for (int h = 0; h < hidden; ++h) {
    for (int j = 0; j < input; ++j) w.w1(h, j) = r.ReadF64();
  }
  w.b1.resize(hidden);
  for (int h = 0; h < hidden; ++h) w.b1(h) = r.ReadF64();
  w.w2.resize(hidden);
  for (int h = 0; h < hidden; ++h) w.w2(h) = r.ReadF64();
  w.b2 = r.ReadF64();
  return std::make_unique<MlpHead>(kind, std::move(w));
}

}  // namespace fairhead::heads
