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

#include "fairhead/gbt/gbt.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fairhead/common/binary_io.h"
#include "fairhead/common/error.h"
#include "fairhead/common/parallel.h"

namespace fairhead::gbt {
namespace {

struct ColumnEntry {
  double value;
  int32_t row;
};

struct SplitCandidate {
  double gain = 0.0;  // only strictly positive gains are accepted
  double threshold = 0.0;
  double gl = 0.0;
  double hl = 0.0;
  int feature = -1;
};

// Midpoint between consecutive distinct values a < b such that a < t <= b.
double Midpoint(double a, double b) {
  const double mid = a + (b - a) * 0.5;
  return mid > a ? mid : b;
}

// Renumbers a tree so that nodes are stored in pre-order (node, left subtree,
// right subtree). This is the serialized order, so reading a model back
// reproduces the same node arrays.
RegressionTree ToPreorder(const RegressionTree& tree) {
  RegressionTree out;
  out.nodes.reserve(tree.nodes.size());
  // Iterative pre-order walk that patches child indices as they are emitted.
  struct Frame {
    int source;
    int parent;
    bool is_left;
  };
  std::vector<Frame> frames = {{0, -1, false}};
  while (!frames.empty()) {
    const Frame f = frames.back();
    frames.pop_back();
    const int index = static_cast<int>(out.nodes.size());
    TreeNode node = tree.nodes[f.source];
    const int left = node.left;
    const int right = node.right;
    node.left = node.right = -1;
    out.nodes.push_back(node);
    if (f.parent >= 0) {
      if (f.is_left) {
        out.nodes[f.parent].left = index;
      } else {
        out.nodes[f.parent].right = index;
      }
    }
    if (left >= 0) {
      frames.push_back({right, index, false});
      frames.push_back({left, index, true});
    }
  }
  return out;
}

void CheckInputs(const Matrix& x, std::span<const int> y,
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
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (!std::isfinite(x(static_cast<Eigen::Index>(i), c))) {
        throw Error(ErrorCode::kNonFiniteFeature,
                    fmt::format("row {}, feature {}", i, c));
      }
    }
  }
  if (!(positive > 0.0) || !(negative > 0.0)) {
    throw Error(ErrorCode::kSingleClass,
                "need at least one positive and one negative with weight > 0");
  }
}

class TreeGrower {
 public:
  TreeGrower(const Matrix& x, const GbtParams& params)
      : x_(x), params_(params), n_(static_cast<size_t>(x.rows())),
        num_features_(static_cast<int>(x.cols())), columns_(num_features_) {
    for (int f = 0; f < num_features_; ++f) {
      auto& col = columns_[f];
      col.resize(n_);
      for (size_t i = 0; i < n_; ++i) {
        col[i] = {x(static_cast<Eigen::Index>(i), f), static_cast<int32_t>(i)};
      }
      std::sort(col.begin(), col.end(), [](const ColumnEntry& a, const ColumnEntry& b) {
        return a.value < b.value || (a.value == b.value && a.row < b.row);
      });
    }
    position_.resize(n_);
  }

  // Grows one tree on gradients/hessians and leaves `position_` pointing at
  // each row's leaf.
  RegressionTree Grow(const std::vector<double>& grad,
                      const std::vector<double>& hess) {
    RegressionTree tree;
    std::vector<double> node_g;
    std::vector<double> node_h;
    double g_total = 0.0;
    double h_total = 0.0;
    for (size_t i = 0; i < n_; ++i) {
      g_total += grad[i];
      h_total += hess[i];
    }
    std::fill(position_.begin(), position_.end(), 0);
    tree.nodes.push_back(TreeNode{});
    tree.nodes[0].cover = h_total;
    node_g.push_back(g_total);
    node_h.push_back(h_total);

    std::vector<int> frontier = {0};
    std::vector<int> slot_of_node(1, -1);
    for (int depth = 0; depth < params_.max_depth && !frontier.empty(); ++depth) {
      const size_t slots = frontier.size();
      slot_of_node.assign(tree.nodes.size(), -1);
      for (size_t s = 0; s < slots; ++s) slot_of_node[frontier[s]] = static_cast<int>(s);

      std::vector<SplitCandidate> per_feature(static_cast<size_t>(num_features_) * slots);
      ParallelFor(static_cast<size_t>(num_features_), params_.threads, [&](size_t f) {
        ScanFeature(static_cast<int>(f), grad, hess, slot_of_node, node_g, node_h,
                    frontier, std::span<SplitCandidate>(per_feature).subspan(f * slots, slots));
      });

      std::vector<SplitCandidate> best(slots);
      for (int f = 0; f < num_features_; ++f) {
        for (size_t s = 0; s < slots; ++s) {
          const SplitCandidate& c = per_feature[static_cast<size_t>(f) * slots + s];
          if (c.feature >= 0 && c.gain > best[s].gain) best[s] = c;
        }
      }

      std::vector<int> next_frontier;
      std::vector<int> split_feature(slots, -1);
      std::vector<double> split_threshold(slots, 0.0);
      std::vector<int> left_child(slots, -1);
      for (size_t s = 0; s < slots; ++s) {
        if (best[s].feature < 0) continue;
        const int node = frontier[s];
        const int left = static_cast<int>(tree.nodes.size());
        const int right = left + 1;
        const double gl = best[s].gl;
        const double hl = best[s].hl;
        const double gr = node_g[node] - gl;
        const double hr = node_h[node] - hl;
        tree.nodes[node].feature = best[s].feature;
        tree.nodes[node].threshold = best[s].threshold;
        tree.nodes[node].left = left;
        tree.nodes[node].right = right;
        TreeNode left_node;
        left_node.cover = hl;
        TreeNode right_node;
        right_node.cover = hr;
        tree.nodes.push_back(left_node);
        tree.nodes.push_back(right_node);
        node_g.push_back(gl);
        node_h.push_back(hl);
        node_g.push_back(gr);
        node_h.push_back(hr);
        split_feature[s] = best[s].feature;
        split_threshold[s] = best[s].threshold;
        left_child[s] = left;
        if (depth + 1 < params_.max_depth) {
          next_frontier.push_back(left);
          next_frontier.push_back(right);
        }
      }
      for (size_t i = 0; i < n_; ++i) {
        const int node = position_[i];
        if (node >= static_cast<int>(slot_of_node.size())) continue;
        const int s = slot_of_node[node];
        if (s < 0 || split_feature[s] < 0) continue;
        const double v = x_(static_cast<Eigen::Index>(i), split_feature[s]);
        position_[i] = v < split_threshold[s] ? left_child[s] : left_child[s] + 1;
      }
      frontier = std::move(next_frontier);
    }

    for (size_t id = 0; id < tree.nodes.size(); ++id) {
      TreeNode& node = tree.nodes[id];
      if (!node.IsLeaf()) continue;
      const double denom = node_h[id] + params_.lambda_l2;
      node.leaf_value = denom > 0.0 ? -node_g[id] / denom : 0.0;
    }
    return tree;
  }

  const std::vector<int>& position() const { return position_; }

 private:
  void ScanFeature(int f, const std::vector<double>& grad,
                   const std::vector<double>& hess,
                   const std::vector<int>& slot_of_node,
                   const std::vector<double>& node_g,
                   const std::vector<double>& node_h,
                   const std::vector<int>& frontier,
                   std::span<SplitCandidate> out) const {
    const size_t slots = out.size();
    std::vector<double> gl(slots, 0.0);
    std::vector<double> hl(slots, 0.0);
    std::vector<double> last(slots, 0.0);
    std::vector<char> seen(slots, 0);
    const double lambda = params_.lambda_l2;
    const double gamma = params_.gamma;
    const double min_h = params_.min_child_hessian;
    const int num_nodes = static_cast<int>(slot_of_node.size());
    for (const ColumnEntry& e : columns_[f]) {
      const int node = position_[e.row];
      if (node >= num_nodes) continue;
      const int s = slot_of_node[node];
      if (s < 0) continue;
      if (seen[s] && e.value != last[s]) {
        const int parent = frontier[s];
        const double hr = node_h[parent] - hl[s];
        if (hl[s] >= min_h && hr >= min_h && hl[s] > 0.0 && hr > 0.0) {
          const double gr = node_g[parent] - gl[s];
          const double gain = SplitGain(gl[s], hl[s], gr, hr, lambda, gamma);
          if (gain > out[s].gain) {
            out[s] = {gain, Midpoint(last[s], e.value), gl[s], hl[s], f};
          }
        }
      }
      gl[s] += grad[e.row];
      hl[s] += hess[e.row];
      last[s] = e.value;
      seen[s] = 1;
    }
  }

  const Matrix& x_;
  const GbtParams& params_;
  size_t n_;
  int num_features_;
  std::vector<std::vector<ColumnEntry>> columns_;
  std::vector<int> position_;
};

}  // namespace

void GbtParams::Validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::kUnsupportedParams, "learning_rate must be positive");
  }
  if (n_estimators < 0) {
    throw Error(ErrorCode::kUnsupportedParams, "n_estimators must be >= 0");
  }
  if (max_depth < 1) {
    throw Error(ErrorCode::kUnsupportedParams, "max_depth must be >= 1");
  }
  if (!(lambda_l2 >= 0.0) || !(gamma >= 0.0) || !(min_child_hessian >= 0.0)) {
    throw Error(ErrorCode::kUnsupportedParams,
                "lambda_l2, gamma and min_child_hessian must be >= 0");
  }
}

std::pair<double, double> LoglossGradHess(double p, int y) {
  return {p - static_cast<double>(y), p * (1.0 - p)};
}

double SplitGain(double gl, double hl, double gr, double hr, double lambda_l2,
                 double gamma) {
  const double g = gl + gr;
  const double h = hl + hr;
  return 0.5 * (gl * gl / (hl + lambda_l2) + gr * gr / (hr + lambda_l2) -
                g * g / (h + lambda_l2)) -
         gamma;
}

double Sigmoid(double margin) { return 1.0 / (1.0 + std::exp(-margin)); }

double WeightedLogloss(std::span<const double> probabilities,
                       std::span<const int> y, std::span<const double> weights) {
  double total = 0.0;
  double weight_sum = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double p =
        std::clamp(probabilities[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    total -= weights[i] * (y[i] == 1 ? std::log(p) : std::log(1.0 - p));
    weight_sum += weights[i];
  }
  return weight_sum > 0.0 ? total / weight_sum : 0.0;
}

int RegressionTree::LeafIndex(std::span<const double> x) const {
  int node = 0;
  while (!nodes[node].IsLeaf()) {
    const TreeNode& n = nodes[node];
    node = x[n.feature] < n.threshold ? n.left : n.right;
  }
  return node;
}

int RegressionTree::Depth() const {
  if (nodes.empty()) return 0;
  int max_depth = 0;
  std::vector<std::pair<int, int>> stack = {{0, 0}};
  while (!stack.empty()) {
    const auto [node, depth] = stack.back();
    stack.pop_back();
    max_depth = std::max(max_depth, depth);
    if (!nodes[node].IsLeaf()) {
      stack.push_back({nodes[node].left, depth + 1});
      stack.push_back({nodes[node].right, depth + 1});
    }
  }
  return max_depth;
}

double RegressionTree::ExpectedValue() const {
  double total = 0.0;
  for (const TreeNode& n : nodes) {
    if (n.IsLeaf()) total += n.cover * n.leaf_value;
  }
  return nodes[0].cover > 0.0 ? total / nodes[0].cover : 0.0;
}

double GbtModel::PredictMargin(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != num_features) {
    throw Error(ErrorCode::kDimMismatch,
                fmt::format("{} features, model expects {}", x.size(), num_features));
  }
  double margin = base_score;
  for (const RegressionTree& tree : trees) {
    margin += params.learning_rate * tree.Predict(x);
  }
  return margin;
}

std::vector<double> GbtModel::PredictMargin(const Matrix& x) const {
  if (x.cols() != num_features) {
    throw Error(ErrorCode::kDimMismatch,
                fmt::format("{} features, model expects {}", x.cols(), num_features));
  }
  std::vector<double> margins(static_cast<size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    margins[r] = PredictMargin(
        std::span<const double>(x.row(r).data(), static_cast<size_t>(x.cols())));
  }
  return margins;
}

std::vector<double> GbtModel::PredictProba(const Matrix& x) const {
  std::vector<double> p = PredictMargin(x);
  for (double& v : p) v = Sigmoid(v);
  return p;
}

GbtModel FitGbt(const Matrix& x, std::span<const int> y,
                std::span<const double> weights, const GbtParams& params,
                FitTrace* trace) {
  params.Validate();
  CheckInputs(x, y, weights);
  const size_t n = static_cast<size_t>(x.rows());

  GbtModel model;
  model.params = params;
  model.num_features = static_cast<int>(x.cols());
  double positive = 0.0;
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    total += weights[i];
    if (y[i] == 1) positive += weights[i];
  }
  const double prior = positive / total;
  model.base_score = std::log(prior / (1.0 - prior));

  std::vector<double> margin(n, model.base_score);
  std::vector<double> prob(n);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  const auto refresh_probabilities = [&] {
    for (size_t i = 0; i < n; ++i) prob[i] = Sigmoid(margin[i]);
  };
  refresh_probabilities();
  if (trace) {
    trace->train_logloss.clear();
    trace->train_logloss.push_back(WeightedLogloss(prob, y, weights));
  }
  if (params.n_estimators == 0) return model;

  TreeGrower grower(x, params);
  model.trees.reserve(params.n_estimators);
  for (int round = 0; round < params.n_estimators; ++round) {
    for (size_t i = 0; i < n; ++i) {
      const double p =
          std::clamp(prob[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
      const auto [g, h] = LoglossGradHess(p, y[i]);
      grad[i] = weights[i] * g;
      hess[i] = weights[i] * h;
    }
    RegressionTree tree = grower.Grow(grad, hess);
    const auto& leaf_of = grower.position();
    for (size_t i = 0; i < n; ++i) {
      margin[i] += params.learning_rate * tree.nodes[leaf_of[i]].leaf_value;
    }
    refresh_probabilities();
    if (trace) trace->train_logloss.push_back(WeightedLogloss(prob, y, weights));
    model.trees.push_back(ToPreorder(tree));
  }
  return model;
}

void GbtModel::Write(std::ostream& out) const {
  BinaryWriter w(out);
  w.WriteMagic(kGbtMagic);
  w.WriteF64(params.learning_rate);
  w.WriteU32(static_cast<uint32_t>(params.n_estimators));
  w.WriteU32(static_cast<uint32_t>(params.max_depth));
  w.WriteF64(params.lambda_l2);
  w.WriteF64(params.gamma);
  w.WriteF64(params.min_child_hessian);
  w.WriteU64(params.seed);
  w.WriteU32(static_cast<uint32_t>(num_features));
  w.WriteF64(base_score);
  w.WriteU32(static_cast<uint32_t>(trees.size()));
  for (const RegressionTree& tree : trees) {
    w.WriteU32(static_cast<uint32_t>(tree.nodes.size()));
    // Pre-order records; child links are implied by the order.
    for (const TreeNode& node : tree.nodes) {
      w.WriteI32(node.IsLeaf() ? -1 : node.feature);
      w.WriteF64(node.threshold);
      w.WriteF64(node.leaf_value);
      w.WriteF64(node.cover);
    }
  }
}

GbtModel GbtModel::Read(std::istream& in) {
  BinaryReader r(in);
  r.ExpectMagic(kGbtMagic);
  GbtModel model;
  model.params.learning_rate = r.ReadF64();
  model.params.n_estimators = static_cast<int>(r.ReadU32());
  model.params.max_depth = static_cast<int>(r.ReadU32());
  model.params.lambda_l2 = r.ReadF64();
  model.params.gamma = r.ReadF64();
  model.params.min_child_hessian = r.ReadF64();
  model.params.seed = r.ReadU64();
  model.num_features = static_cast<int>(r.ReadU32());
  model.base_score = r.ReadF64();
  const uint32_t num_trees = r.ReadU32();
  model.trees.resize(num_trees);
  for (auto& tree : model.trees) {
    const uint32_t count = r.ReadU32();
    tree.nodes.resize(count);
    for (auto& node : tree.nodes) {
      node.feature = r.ReadI32();
      node.threshold = r.ReadF64();
      node.leaf_value = r.ReadF64();
      node.cover = r.ReadF64();
    }
    // Rebuild child links from the pre-order sequence.
    std::vector<int> open;  // internal nodes still waiting for a right child
    for (uint32_t i = 0; i < count; ++i) {
      if (i > 0) {
        if (open.empty()) throw Error(ErrorCode::kInvalidSpec, "malformed tree");
        const int parent = open.back();
        if (tree.nodes[parent].left < 0) {
          tree.nodes[parent].left = static_cast<int>(i);
        } else {
          tree.nodes[parent].right = static_cast<int>(i);
          open.pop_back();
        }
      }
      if (tree.nodes[i].feature >= 0) {
        if (tree.nodes[i].feature >= model.num_features) {
          throw Error(ErrorCode::kInvalidSpec, "tree feature out of range");
        }
        open.push_back(static_cast<int>(i));
      }
    }
    if (!open.empty()) throw Error(ErrorCode::kInvalidSpec, "malformed tree");
  }
  return model;
}

}  // namespace fairhead::gbt
