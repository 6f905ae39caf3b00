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

#ifndef FAIRHEAD_HEADS_CART_H_
#define FAIRHEAD_HEADS_CART_H_

#include <span>
#include <vector>

#include "fairhead/common/random.h"
#include "fairhead/heads/head.h"

namespace fairhead::heads {

struct CartNode {
  int feature = -1;
  double threshold = 0.0;  // left when x[feature] < threshold
  int left = -1;
  int right = -1;
  double value = 0.0;  // weighted positive fraction of the node

  bool IsLeaf() const { return left < 0; }
};

// Binary classification tree grown by weighted Gini impurity. Rows with zero
// weight are ignored, which is how bootstrap counts are applied.
class ClassificationTree {
 public:
  // `max_features` features are drawn without replacement at every split
  // (0 or >= k means all, in index order). Ties keep the first candidate in
  // examination order, then the lowest threshold.
  static ClassificationTree Fit(const Matrix& x, std::span<const int> y,
                                std::span<const double> weights,
                                const TreeParams& params, int max_features,
                                Rng& rng);

  double Predict(std::span<const double> x) const;
  const std::vector<CartNode>& nodes() const { return nodes_; }
  int Depth() const;

  void Write(std::ostream& out) const;
  static ClassificationTree Read(std::istream& in);

 private:
  std::vector<CartNode> nodes_;
};

class DecisionTreeHead : public HeadModel {
 public:
  DecisionTreeHead(ClassificationTree tree, int dim)
      : tree_(std::move(tree)), dim_(dim) {}

  static std::unique_ptr<DecisionTreeHead> Fit(const Matrix& x,
                                               std::span<const int> y,
                                               std::span<const double> weights,
                                               const TreeParams& params,
                                               uint64_t seed);

  HeadKind kind() const override { return HeadKind::kDecisionTree; }
  int input_dim() const override { return dim_; }
  std::vector<double> PredictProba(const Matrix& x) const override;
  void WritePayload(std::ostream& out) const override;
  static std::unique_ptr<DecisionTreeHead> ReadPayload(std::istream& in);

  const ClassificationTree& tree() const { return tree_; }

 private:
  ClassificationTree tree_;
  int dim_;
};

// Bagged trees with sqrt(k) features per split. The balanced variant draws
// each tree's bootstrap with equal counts from both classes (the minority
// class size, with replacement). Tree t is seeded with seed + t.
class ForestHead : public HeadModel {
 public:
  ForestHead(HeadKind kind, std::vector<ClassificationTree> trees, int dim)
      : kind_(kind), trees_(std::move(trees)), dim_(dim) {}

  static std::unique_ptr<ForestHead> Fit(const Matrix& x, std::span<const int> y,
                                         std::span<const double> weights,
                                         const ForestParams& params, bool balanced,
                                         uint64_t seed, int threads);

  HeadKind kind() const override { return kind_; }
  int input_dim() const override { return dim_; }
  std::vector<double> PredictProba(const Matrix& x) const override;
  void WritePayload(std::ostream& out) const override;
  static std::unique_ptr<ForestHead> ReadPayload(HeadKind kind, std::istream& in);

  const std::vector<ClassificationTree>& trees() const { return trees_; }

 private:
  HeadKind kind_;
  std::vector<ClassificationTree> trees_;
  int dim_;
};

}  // namespace fairhead::heads

#endif  // FAIRHEAD_HEADS_CART_H_
