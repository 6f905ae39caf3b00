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

#ifndef FAIRHEAD_GBT_GBT_H_
#define FAIRHEAD_GBT_GBT_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "fairhead/common/types.h"

namespace fairhead::gbt {

inline constexpr char kGbtMagic[] = "FAIRGBT1";

// Probabilities are clamped to [kProbabilityClamp, 1 - kProbabilityClamp]
// before gradient statistics are computed.
inline constexpr double kProbabilityClamp = 1e-7;

struct GbtParams {
  double learning_rate = 0.05;
  int n_estimators = 150;
  int max_depth = 10;
  double lambda_l2 = 1.0;          // leaf weight regularizer
  double gamma = 0.0;              // per-split penalty
  double min_child_hessian = 1.0;  // minimum hessian sum in each child
  uint64_t seed = 0;  // recorded for provenance; exact greedy is deterministic
  int threads = 0;    // 0: process default

  void Validate() const;
};

// One node of a regression tree. Leaves have left == right == -1. Samples go
// left when x[feature] < threshold.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;  // raw Newton step, before the learning rate
  double cover = 0.0;       // sum of (weighted) hessians reaching the node

  bool IsLeaf() const { return left < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int LeafIndex(std::span<const double> x) const;
  double Predict(std::span<const double> x) const {
    return nodes[LeafIndex(x)].leaf_value;
  }
  int Depth() const;
  // Cover-weighted mean leaf value, i.e. the expected output under the
  // training distribution.
  double ExpectedValue() const;
};

struct GbtModel {
  GbtParams params;
  int num_features = 0;
  double base_score = 0.0;  // log-odds
  std::vector<RegressionTree> trees;

  // base_score + sum_t learning_rate * leaf_t(x). Throws kDimMismatch.
  double PredictMargin(std::span<const double> x) const;
  std::vector<double> PredictMargin(const Matrix& x) const;
  std::vector<double> PredictProba(const Matrix& x) const;

  void Write(std::ostream& out) const;
  static GbtModel Read(std::istream& in);
};

// Per-round diagnostics collected during fitting.
struct FitTrace {
  // Weighted mean; entry 0 is the base score, then one entry per round.
  std::vector<double> train_logloss;
};

// Newton statistics of the logistic loss at probability p: (p - y, p(1-p)).
std::pair<double, double> LoglossGradHess(double p, int y);

// Second-order split gain:
//   1/2 [GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l)] - gamma
double SplitGain(double gl, double hl, double gr, double hr, double lambda_l2,
                 double gamma);

double Sigmoid(double margin);

// Fits a boosted ensemble on the logistic loss. Each round grows one tree
// level by level with exact greedy search over every feature and every
// midpoint between consecutive distinct values. Ties in gain go to the lowest
// feature index, then the lowest threshold. Sample weights multiply the
// gradient and hessian. Output is bitwise identical for any thread count.
// Throws kSingleClass, kNonFiniteFeature, kDimMismatch, kUnsupportedParams.
GbtModel FitGbt(const Matrix& x, std::span<const int> y,
                std::span<const double> weights, const GbtParams& params,
                FitTrace* trace = nullptr);

// Weighted mean log loss of probabilities against labels.
double WeightedLogloss(std::span<const double> probabilities,
                       std::span<const int> y, std::span<const double> weights);

}  // namespace fairhead::gbt

#endif  // FAIRHEAD_GBT_GBT_H_
