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

#include "fairhead/gbt/tree_shap.h"

#include <fmt/format.h>

#include "fairhead/common/error.h"
#include "fairhead/common/parallel.h"

namespace fairhead::gbt {
namespace {

struct PathElement {
  int feature;
  double zero_fraction;
  double one_fraction;
  double pweight;
};

void ExtendPath(std::vector<PathElement>& path, double zero_fraction,
                double one_fraction, int feature) {
  const int d = static_cast<int>(path.size());
  path.push_back({feature, zero_fraction, one_fraction, d == 0 ? 1.0 : 0.0});
  for (int i = d - 1; i >= 0; --i) {
    path[i + 1].pweight += one_fraction * path[i].pweight * (i + 1) / (d + 1);
    path[i].pweight = zero_fraction * path[i].pweight * (d - i) / (d + 1);
  }
}

void UnwindPath(std::vector<PathElement>& path, int index) {
  const int d = static_cast<int>(path.size()) - 1;
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next = path[d].pweight;
  for (int i = d - 1; i >= 0; --i) {
    if (one != 0.0) {
      const double tmp = path[i].pweight;
      path[i].pweight = next * (d + 1) / ((i + 1) * one);
      next = tmp - path[i].pweight * zero * (d - i) / (d + 1);
    } else {
      path[i].pweight = path[i].pweight * (d + 1) / (zero * (d - i));
    }
  }
  for (int i = index; i < d; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
  path.pop_back();
}

// Total permutation weight of the path with element `index` removed.
double UnwoundSum(const std::vector<PathElement>& path, int index) {
  const int d = static_cast<int>(path.size()) - 1;
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next = path[d].pweight;
  double total = 0.0;
  for (int i = d - 1; i >= 0; --i) {
    if (one != 0.0) {
      const double tmp = next * (d + 1) / ((i + 1) * one);
      total += tmp;
      next = path[i].pweight - tmp * zero * (d - i) / (d + 1);
    } else {
      total += path[i].pweight / zero * (d + 1) / (d - i);
    }
  }
  return total;
}

void Recurse(const RegressionTree& tree, std::span<const double> x, int node,
             std::vector<PathElement> path, double zero_fraction,
             double one_fraction, int feature, std::vector<double>& phi) {
  ExtendPath(path, zero_fraction, one_fraction, feature);
  const TreeNode& n = tree.nodes[node];
  if (n.IsLeaf()) {
    for (int i = 1; i < static_cast<int>(path.size()); ++i) {
      const double w = UnwoundSum(path, i);
      phi[path[i].feature] +=
          w * (path[i].one_fraction - path[i].zero_fraction) * n.leaf_value;
    }
    return;
  }
  const int hot = x[n.feature] < n.threshold ? n.left : n.right;
  const int cold = hot == n.left ? n.right : n.left;
  double incoming_zero = 1.0;
  double incoming_one = 1.0;
  for (int i = 1; i < static_cast<int>(path.size()); ++i) {
    if (path[i].feature == n.feature) {
      incoming_zero = path[i].zero_fraction;
      incoming_one = path[i].one_fraction;
      UnwindPath(path, i);
      break;
    }
  }
  const double cover = n.cover;
  const double hot_share = cover > 0.0 ? tree.nodes[hot].cover / cover : 0.0;
  const double cold_share = cover > 0.0 ? tree.nodes[cold].cover / cover : 0.0;
  Recurse(tree, x, hot, path, incoming_zero * hot_share, incoming_one,
          n.feature, phi);
  Recurse(tree, x, cold, std::move(path), incoming_zero * cold_share, 0.0,
          n.feature, phi);
}

}  // namespace

std::vector<double> TreeShapleySingle(const RegressionTree& tree,
                                      std::span<const double> x,
                                      int num_features) {
  std::vector<double> phi(num_features, 0.0);
  if (tree.nodes.empty() || tree.nodes[0].IsLeaf()) return phi;
  std::vector<PathElement> path;
  path.reserve(static_cast<size_t>(tree.Depth()) + 2);
  Recurse(tree, x, 0, std::move(path), 1.0, 1.0, -1, phi);
  return phi;
}

double ExpectedMargin(const GbtModel& model) {
  double value = model.base_score;
  for (const RegressionTree& tree : model.trees) {
    value += model.params.learning_rate * tree.ExpectedValue();
  }
  return value;
}

ShapleyAttribution TreeShapley(const GbtModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.num_features) {
    throw Error(ErrorCode::kDimMismatch,
                fmt::format("{} features, model expects {}", x.size(),
                            model.num_features));
  }
  ShapleyAttribution out;
  out.base_value = ExpectedMargin(model);
  out.phi.assign(model.num_features, 0.0);
  for (const RegressionTree& tree : model.trees) {
    const std::vector<double> phi = TreeShapleySingle(tree, x, model.num_features);
    for (int f = 0; f < model.num_features; ++f) {
      out.phi[f] += model.params.learning_rate * phi[f];
    }
  }
  return out;
}

Matrix TreeShapleyMatrix(const GbtModel& model, const Matrix& x, int threads) {
  if (x.cols() != model.num_features) {
    throw Error(ErrorCode::kDimMismatch,
                fmt::format("{} features, model expects {}", x.cols(),
                            model.num_features));
  }
  Matrix out(x.rows(), x.cols());
  ParallelFor(static_cast<size_t>(x.rows()), threads, [&](size_t r) {
    const ShapleyAttribution a = TreeShapley(
        model, std::span<const double>(x.row(r).data(), static_cast<size_t>(x.cols())));
    for (int f = 0; f < model.num_features; ++f) out(r, f) = a.phi[f];
  });
  return out;
}

}  // namespace fairhead::gbt
