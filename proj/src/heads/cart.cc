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

#include "fairhead/heads/cart.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "fairhead/common/binary_io.h"
#include "fairhead/common/error.h"
#include "fairhead/common/parallel.h"

namespace fairhead::heads {
namespace {

struct NodeStats {
  double positive = 0.0;
  double negative = 0.0;
  double total() const { return positive + negative; }
  // Total weight times Gini impurity.
  double WeightedImpurity() const {
    const double w = total();
    return w > 0.0 ? w - (positive * positive + negative * negative) / w : 0.0;
  }
};

class CartBuilder {
 public:
  CartBuilder(const Matrix& x, std::span<const int> y,
              std::span<const double> weights, const TreeParams& params,
              int max_features, Rng& rng)
      : x_(x), y_(y), w_(weights), params_(params), rng_(rng),
        num_features_(static_cast<int>(x.cols())) {
    max_features_ = (max_features <= 0 || max_features >= num_features_)
                        ? num_features_
                        : max_features;
  }

  std::vector<CartNode> Build() {
    std::vector<int> rows;
    for (size_t i = 0; i < y_.size(); ++i) {
      if (w_[i] > 0.0) rows.push_back(static_cast<int>(i));
    }
    Grow(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  int Grow(std::vector<int> rows, int depth) {
    NodeStats stats;
    for (int r : rows) (y_[r] == 1 ? stats.positive : stats.negative) += w_[r];
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(CartNode{});
    nodes_[id].value = stats.total() > 0.0 ? stats.positive / stats.total() : 0.0;
    const bool pure = stats.positive == 0.0 || stats.negative == 0.0;
    if (pure || depth >= params_.max_depth ||
        static_cast<int>(rows.size()) < 2 * std::max(1, params_.min_samples_leaf)) {
      return id;
    }

    std::vector<int> features(num_features_);
    std::iota(features.begin(), features.end(), 0);
    if (max_features_ < num_features_) {
      for (int i = 0; i < max_features_; ++i) {
        const int j = i + static_cast<int>(rng_.UniformInt(num_features_ - i));
        std::swap(features[i], features[j]);
      }
      features.resize(max_features_);
    }

    const double parent = stats.WeightedImpurity();
    double best_decrease = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<int> order(rows);
    const int min_leaf = std::max(1, params_.min_samples_leaf);
    for (int f : features) {
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double va = x_(a, f);
        const double vb = x_(b, f);
        return va < vb || (va == vb && a < b);
      });
      NodeStats left;
      const int count = static_cast<int>(order.size());
      for (int i = 0; i + 1 < count; ++i) {
        const int r = order[i];
        (y_[r] == 1 ? left.positive : left.negative) += w_[r];
        const double v = x_(r, f);
        const double next = x_(order[i + 1], f);
        if (!(next > v)) continue;
        if (i + 1 < min_leaf || count - i - 1 < min_leaf) continue;
        NodeStats right{stats.positive - left.positive, stats.negative - left.negative};
        if (left.total() < params_.min_weight_leaf ||
            right.total() < params_.min_weight_leaf) {
          continue;
        }
        const double decrease =
            parent - left.WeightedImpurity() - right.WeightedImpurity();
        if (decrease > best_decrease + 1e-12 * stats.total()) {
          best_decrease = decrease;
          best_feature = f;
          const double mid = v + (next - v) * 0.5;
          best_threshold = mid > v ? mid : next;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<int> left_rows;
    std::vector<int> right_rows;
    for (int r : rows) {
      (x_(r, best_feature) < best_threshold ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    order.clear();
    order.shrink_to_fit();
    nodes_[id].feature = best_feature;
    nodes_[id].threshold = best_threshold;
    const int left = Grow(std::move(left_rows), depth + 1);
    nodes_[id].left = left;
    const int right = Grow(std::move(right_rows), depth + 1);
    nodes_[id].right = right;
    return id;
  }

  const Matrix& x_;
  std::span<const int> y_;
  std::span<const double> w_;
  const TreeParams& params_;
  Rng& rng_;
  int num_features_;
  int max_features_;
  std::vector<CartNode> nodes_;
};

std::vector<double> PredictTrees(const std::vector<ClassificationTree>& trees,
                                 const Matrix& x) {
  std::vector<double> p(static_cast<size_t>(x.rows()), 0.0);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const std::span<const double> row(x.row(r).data(), static_cast<size_t>(x.cols()));
    double total = 0.0;
    for (const auto& tree : trees) total += tree.Predict(row);
    p[r] = total / static_cast<double>(trees.size());
  }
  return p;
}

}  // namespace

ClassificationTree ClassificationTree::Fit(const Matrix& x, std::span<const int> y,
                                           std::span<const double> weights,
                                           const TreeParams& params,
                                           int max_features, Rng& rng) {
  if (params.max_depth < 1 || params.min_samples_leaf < 1) {
    throw Error(ErrorCode::kUnsupportedParams,
                "tree max_depth and min_samples_leaf must be >= 1");
  }
  ClassificationTree tree;
  tree.nodes_ = CartBuilder(x, y, weights, params, max_features, rng).Build();
  return tree;
}

double ClassificationTree::Predict(std::span<const double> x) const {
  int node = 0;
  while (!nodes_[node].IsLeaf()) {
    const CartNode& n = nodes_[node];
    node = x[n.feature] < n.threshold ? n.left : n.right;
  }
  return nodes_[node].value;
}

int ClassificationTree::Depth() const {
  int max_depth = 0;
  std::vector<std::pair<int, int>> stack = {{0, 0}};
  while (!stack.empty()) {
    const auto [node, depth] = stack.back();
    stack.pop_back();
    max_depth = std::max(max_depth, depth);
    if (!nodes_[node].IsLeaf()) {
      stack.push_back({nodes_[node].left, depth + 1});
      stack.push_back({nodes_[node].right, depth + 1});
    }
  }
  return max_depth;
}

void ClassificationTree::Write(std::ostream& out) const {
  BinaryWriter w(out);
  w.WriteU32(static_cast<uint32_t>(nodes_.size()));
  for (const CartNode& n : nodes_) {
    w.WriteI32(n.feature);
    w.WriteF64(n.threshold);
    w.WriteI32(n.left);
    w.WriteI32(n.right);
    w.WriteF64(n.value);
  }
}

ClassificationTree ClassificationTree::Read(std::istream& in) {
  BinaryReader r(in);
  ClassificationTree tree;
  tree.nodes_.resize(r.ReadU32());
  const int count = static_cast<int>(tree.nodes_.size());
  for (CartNode& n : tree.nodes_) {
    n.feature = r.ReadI32();
    n.threshold = r.ReadF64();
    n.left = r.ReadI32();
    n.right = r.ReadI32();
    n.value = r.ReadF64();
    if (n.left >= count || n.right >= count || (n.left < 0) != (n.right < 0)) {
      throw Error(ErrorCode::kInvalidSpec, "malformed classification tree");
    }
  }
  if (count == 0) throw Error(ErrorCode::kInvalidSpec, "empty classification tree");
  return tree;
}

std::unique_ptr<DecisionTreeHead> DecisionTreeHead::Fit(
    const Matrix& x, std::span<const int> y, std::span<const double> weights,
    const TreeParams& params, uint64_t seed) {
  internal::CheckTrainingInputs(x, y, weights);
  Rng rng(seed);
  return std::make_unique<DecisionTreeHead>(
      ClassificationTree::Fit(x, y, weights, params, params.max_features, rng),
      static_cast<int>(x.cols()));
}

std::vector<double> DecisionTreeHead::PredictProba(const Matrix& x) const {
  internal::CheckInputDim(x, dim_);
  std::vector<double> p(static_cast<size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    p[r] = tree_.Predict({x.row(r).data(), static_cast<size_t>(x.cols())});
  }
  return p;
}

void DecisionTreeHead::WritePayload(std::ostream& out) const {
  BinaryWriter(out).WriteU32(static_cast<uint32_t>(dim_));
  tree_.Write(out);
}

std::unique_ptr<DecisionTreeHead> DecisionTreeHead::ReadPayload(std::istream& in) {
  const int dim = static_cast<int>(BinaryReader(in).ReadU32());
  return std::make_unique<DecisionTreeHead>(ClassificationTree::Read(in), dim);
}

std::unique_ptr<ForestHead> ForestHead::Fit(const Matrix& x, std::span<const int> y,
                                            std::span<const double> weights,
                                            const ForestParams& params,
                                            bool balanced, uint64_t seed,
                                            int threads) {
  internal::CheckTrainingInputs(x, y, weights);
  if (params.n_trees < 1) {
    throw Error(ErrorCode::kUnsupportedParams, "forest needs n_trees >= 1");
  }
  const size_t n = y.size();
  const int k = static_cast<int>(x.cols());
  const int max_features =
      params.tree.max_features > 0
          ? params.tree.max_features
          : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(k)))));
  std::vector<int> positives;
  std::vector<int> negatives;
  for (size_t i = 0; i < n; ++i) {
    if (weights[i] <= 0.0) continue;
    (y[i] == 1 ? positives : negatives).push_back(static_cast<int>(i));
  }
  std::vector<ClassificationTree> trees(params.n_trees);
  ParallelFor(static_cast<size_t>(params.n_trees), threads, [&](size_t t) {
    Rng rng(seed + t);
    std::vector<double> counts(n, 0.0);
    if (balanced) {
      const size_t m = std::min(positives.size(), negatives.size());
      for (const auto* cls : {&negatives, &positives}) {
        for (size_t d = 0; d < m; ++d) counts[(*cls)[rng.UniformInt(cls->size())]] += 1.0;
      }
    } else {
      for (size_t d = 0; d < n; ++d) counts[rng.UniformInt(n)] += 1.0;
    }
    for (size_t i = 0; i < n; ++i) counts[i] *= weights[i];
    trees[t] = ClassificationTree::Fit(x, y, counts, params.tree, max_features, rng);
  });
  return std::make_unique<ForestHead>(
      balanced ? HeadKind::kBalancedRandomForest : HeadKind::kRandomForest,
      std::move(trees), k);
}

std::vector<double> ForestHead::PredictProba(const Matrix& x) const {
  internal::CheckInputDim(x, dim_);
  return PredictTrees(trees_, x);
}

void ForestHead::WritePayload(std::ostream& out) const {
  BinaryWriter w(out);
  w.WriteU32(static_cast<uint32_t>(dim_));
  w.WriteU32(static_cast<uint32_t>(trees_.size()));
  for (const auto& tree : trees_) tree.Write(out);
}

std::unique_ptr<ForestHead> ForestHead::ReadPayload(HeadKind kind, std::istream& in) {
  BinaryReader r(in);
  const int dim = static_cast<int>(r.ReadU32());
  std::vector<ClassificationTree> trees(r.ReadU32());
  for (auto& tree : trees) tree = ClassificationTree::Read(in);
  if (trees.empty()) throw Error(ErrorCode::kInvalidSpec, "empty forest");
  return std::make_unique<ForestHead>(kind, std::move(trees), dim);
}

}  // namespace fairhead::heads
