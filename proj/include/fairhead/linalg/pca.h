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

#ifndef FAIRHEAD_LINALG_PCA_H_
#define FAIRHEAD_LINALG_PCA_H_

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "fairhead/common/types.h"

namespace fairhead::linalg {

inline constexpr char kPcaMagic[] = "FAIRPCA1";
inline constexpr double kDefaultVarianceTarget = 0.95;

// Principal components fitted on a training split. Immutable after fitting;
// transforming other splits never refits.
struct PcaModel {
  Vector mean;        // dim
  Matrix components;  // k x dim, orthonormal rows
  std::vector<double> explained_variance_ratio;  // k, non-increasing
  // Ratios of every singular direction (length min(n, dim)); they sum to 1.
  std::vector<double> full_variance_ratio;

  int k() const { return static_cast<int>(components.rows()); }
  int dim() const { return static_cast<int>(mean.size()); }

  // (x - mean) * components^T, n x k. Throws Error(kDimMismatch).
  Matrix Transform(const Matrix& x) const;
  // Maps reduced coordinates back to the original space.
  Matrix Reconstruct(const Matrix& reduced) const;

  void Write(std::ostream& out) const;
  static PcaModel Read(std::istream& in);
};

// Smallest k whose cumulative ratio reaches `target`.
int ComponentsForVariance(std::span<const double> ratios, double target);

// Fits by SVD of the centered matrix. Each component is oriented so that its
// largest-magnitude entry (first one on ties) is non-negative. Throws
// Error(kDegenerateData) for zero total variance or fewer than two rows.
PcaModel FitPca(const Matrix& x, double variance_target = kDefaultVarianceTarget);

// Same as FitPca but keeps exactly `k` components (used for 2-D projections).
PcaModel FitPcaComponents(const Matrix& x, int k);

}  // namespace fairhead::linalg

#endif  // FAIRHEAD_LINALG_PCA_H_
