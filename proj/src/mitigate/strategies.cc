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

#include "fairhead/mitigate/strategies.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "fairhead/common/error.h"
#include "fairhead/common/random.h"

namespace fairhead::mitigate {

std::vector<double> BalanceWeights(std::span<const int> groups) {
  std::map<int, int> counts;
  for (int g : groups) counts[g] += 1;
  const double n = static_cast<double>(groups.size());
  const double num_groups = static_cast<double>(counts.size());
  std::vector<double> weights(groups.size());
  for (size_t i = 0; i < groups.size(); ++i) {
    weights[i] = n / (num_groups * counts[groups[i]]);
  }
  return weights;
}

AugmentedData AugmentSubgroup(const Matrix& x, std::span<const int> y,
                              std::span<const int> groups, int target_group,
                              int n_new, uint64_t seed,
                              const AugmentOptions& options) {
  const size_t n = static_cast<size_t>(x.rows());
  if (y.size() != n || groups.size() != n) {
    throw Error(ErrorCode::kDimMismatch, "augmentation inputs differ in length");
  }
  if (n_new < 0) throw Error(ErrorCode::kInvalidSpec, "n_new must be >= 0");
  if (options.alpha && !(*options.alpha >= 0.0 && *options.alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidSpec, "alpha outside [0, 1]");
  }
  std::map<int, std::vector<int>> by_label;
  for (size_t i = 0; i < n; ++i) {
    if (groups[i] != target_group) continue;
    if (options.label && y[i] != *options.label) continue;
    by_label[y[i]].push_back(static_cast<int>(i));
  }
  std::vector<int> anchors;
  for (const auto& [label, rows] : by_label) {
    if (rows.size() >= 2) anchors.insert(anchors.end(), rows.begin(), rows.end());
  }
  if (anchors.empty() && n_new > 0) {
    throw Error(ErrorCode::kInsufficientPairs,
                fmt::format("group {} has no label with two or more rows", target_group));
  }
  std::sort(anchors.begin(), anchors.end());

  AugmentedData out;
  out.x.resize(static_cast<Eigen::Index>(n) + n_new, x.cols());
  out.x.topRows(x.rows()) = x;
  out.y.assign(y.begin(), y.end());
  out.groups.assign(groups.begin(), groups.end());
  out.source.resize(n);
  std::iota(out.source.begin(), out.source.end(), 0);
  Rng rng(seed);
  for (int k = 0; k < n_new; ++k) {
    const int i = anchors[rng.UniformInt(anchors.size())];
    const std::vector<int>& mates = by_label[y[i]];
    int j = i;
    while (j == i) j = mates[rng.UniformInt(mates.size())];
    const double alpha = rng.Uniform(kMinAlpha, kMaxAlpha);
    const double a = options.alpha ? *options.alpha : alpha;
    out.x.row(static_cast<Eigen::Index>(n) + k) = a * x.row(i) + (1.0 - a) * x.row(j);
    out.y.push_back(y[i]);
    out.groups.push_back(target_group);
    out.source.push_back(i);
  }
  return out;
}

std::vector<double> UncertaintyScores(const Matrix& probabilities) {
  std::vector<double> u(static_cast<size_t>(probabilities.rows()), 0.0);
  const Eigen::Index c = probabilities.cols();
  for (Eigen::Index r = 0; r < probabilities.rows(); ++r) {
    double total = 0.0;
    for (Eigen::Index k = 0; k < c; ++k) {
      total += 1.0 - 2.0 * std::abs(probabilities(r, k) - 0.5);
    }
    u[r] = c > 0 ? total / static_cast<double>(c) : 0.0;
  }
  return u;
}

}  // namespace fairhead::mitigate
