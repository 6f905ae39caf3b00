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

#ifndef FAIRHEAD_GBT_TREE_SHAP_H_
#define FAIRHEAD_GBT_TREE_SHAP_H_

#include <span>
#include <vector>

#include "fairhead/common/types.h"
#include "fairhead/gbt/gbt.h"

namespace fairhead::gbt {

// Additive explanation of one prediction in margin units:
// base_value + sum(phi) == model margin.
struct ShapleyAttribution {
  double base_value = 0.0;
  std::vector<double> phi;
};

// Path-dependent TreeSHAP. Missing features are marginalized with the cover
// (hessian) distribution recorded at each split. Per-tree values are scaled by
// the learning rate and summed. Throws kDimMismatch.
ShapleyAttribution TreeShapley(const GbtModel& model, std::span<const double> x);

// Attribution of a single tree's raw leaf values (no learning rate).
std::vector<double> TreeShapleySingle(const RegressionTree& tree,
                                      std::span<const double> x,
                                      int num_features);

// Expected model margin under the cover distribution.
double ExpectedMargin(const GbtModel& model);

// Rows of `x` explained in parallel; result is n x num_features.
Matrix TreeShapleyMatrix(const GbtModel& model, const Matrix& x, int threads = 0);

}  // namespace fairhead::gbt

#endif  // FAIRHEAD_GBT_TREE_SHAP_H_
