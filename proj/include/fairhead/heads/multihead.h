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

#ifndef FAIRHEAD_HEADS_MULTIHEAD_H_
#define FAIRHEAD_HEADS_MULTIHEAD_H_

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fairhead/heads/head.h"
#include "fairhead/linalg/pca.h"

namespace fairhead::heads {

inline constexpr char kMultiHeadMagic[] = "FAIRMHD1";

// Condition filter thresholds: keep iff auc > 0.70 and positive rate >= 0.10.
inline constexpr double kMinConditionAuc = 0.70;
inline constexpr double kMinPositiveRate = 0.10;

// One independent binary head per condition, sharing the input space.
struct MultiHeadModel {
  std::vector<std::string> condition_names;
  std::vector<std::shared_ptr<const HeadModel>> heads;
  // Projection applied to raw embeddings; null when inputs are pre-reduced.
  std::shared_ptr<const linalg::PcaModel> pca;

  int num_conditions() const { return static_cast<int>(heads.size()); }
  // Probabilities for reduced inputs, n x conditions.
  Matrix PredictProba(const Matrix& reduced) const;
  // Applies the PCA first.
  Matrix PredictProbaEmbeddings(const Matrix& embeddings) const;

  void Write(std::ostream& out) const;
  static MultiHeadModel Read(std::istream& in);
  void Save(const std::filesystem::path& path) const;
  static MultiHeadModel Load(const std::filesystem::path& path);
};

// labels[c][i] is 0, 1 or -1 (missing). Rows missing a label are left out of
// that condition's head. Condition c is trained with seed + c. Errors carry
// the condition name.
MultiHeadModel TrainMultihead(HeadKind kind, const Matrix& x,
                              const std::vector<std::vector<int>>& labels,
                              const std::vector<std::string>& condition_names,
                              std::span<const double> weights,
                              const HeadParams& params, uint64_t seed,
                              const AttributeLabels* attributes = nullptr);

bool KeepCondition(double roc_auc, double positive_rate);
// Indices of kept conditions, in order.
std::vector<int> FilterConditions(std::span<const double> roc_auc,
                                  std::span<const double> positive_rate);

}  // namespace fairhead::heads

#endif  // FAIRHEAD_HEADS_MULTIHEAD_H_
