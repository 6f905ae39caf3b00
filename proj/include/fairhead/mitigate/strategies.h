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

#ifndef FAIRHEAD_MITIGATE_STRATEGIES_H_
#define FAIRHEAD_MITIGATE_STRATEGIES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fairhead/common/types.h"

namespace fairhead::mitigate {

// w_i = N / (G * n_g(i)) over the G distinct group ids present, so every
// group carries total weight N / G.
std::vector<double> BalanceWeights(std::span<const int> groups);

struct AugmentedData {
  Matrix x;
  std::vector<int> y;
  std::vector<int> groups;
  // Row each output row derives from: itself for copied rows, the first
  // (alpha-weighted) parent for synthetic rows.
  std::vector<int> source;
};

// Bounds of the mixing coefficient.
inline constexpr double kMinAlpha = 0.2;
inline constexpr double kMaxAlpha = 0.8;

struct AugmentOptions {
  // Restrict new rows to one label; otherwise anchors are drawn uniformly
  // from the target group, so labels follow the group's class mix.
  std::optional<int> label;
  // Fixed mixing coefficient, for tests.
  std::optional<double> alpha;
};

// Returns the input rows followed by n_new synthetic rows of target_group.
// Each new row is alpha * x_i + (1 - alpha) * x_j for distinct rows i, j of
// the target group sharing a label, alpha ~ U[0.2, 0.8]. Labels with fewer
// than two rows in the group are not augmented. Throws
// Error(kInsufficientPairs) when no label can be augmented.
AugmentedData AugmentSubgroup(const Matrix& x, std::span<const int> y,
                              std::span<const int> groups, int target_group,
                              int n_new, uint64_t seed,
                              const AugmentOptions& options = {});

// Per-sample mean over conditions of 1 - 2|p - 0.5|.
std::vector<double> UncertaintyScores(const Matrix& probabilities);

}  // namespace fairhead::mitigate

#endif  // FAIRHEAD_MITIGATE_STRATEGIES_H_
