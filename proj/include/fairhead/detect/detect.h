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

#ifndef FAIRHEAD_DETECT_DETECT_H_
#define FAIRHEAD_DETECT_DETECT_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairhead/common/types.h"
#include "fairhead/dataio/samples.h"
#include "fairhead/gbt/gbt.h"
#include "fairhead/heads/head.h"
#include "fairhead/heads/multihead.h"
#include "fairhead/metrics/metrics.h"

namespace fairhead::detect {

// One row of the class-distribution table. Shares are fractions of the
// labeled samples of that condition on that axis; positive_rate is
// positives / (positives + negatives) within the group.
struct PrevalenceCell {
  dataio::Axis axis;
  std::string group;
  std::string condition;
  int negatives = 0;
  int positives = 0;
  double negative_share = 0.0;
  double positive_share = 0.0;
  double positive_rate = 0.0;
};

struct PrevalenceTable {
  std::vector<PrevalenceCell> cells;  // axis-major, then group, then condition
};

// Missing labels are excluded; race "other" is not reported.
PrevalenceTable ComputePrevalence(const dataio::SampleTable& samples);

// ROC-AUC of a logistic probe predicting a group id from features. Samples
// with negative ids are ignored. With more than two groups the result is the
// macro average of one-vs-rest AUCs over groups present in both folds.
// Throws Error(kSingleGroup) when fewer than two groups are usable.
double ProbeAuc(const Matrix& train_x, std::span<const int> train_groups,
                const Matrix& test_x, std::span<const int> test_groups,
                const heads::LogisticParams& params = {});

struct LeakageResult {
  double sex_auc = 0.0;
  double age_auc = 0.0;
  double race_auc = 0.0;  // one-vs-rest macro over white/asian/black

  double ForAxis(dataio::Axis axis) const;
};

// Probes trained on the train split and scored on the test split of raw
// embeddings (rows aligned with `samples`).
LeakageResult LeakageProbe(const Matrix& embeddings,
                           const dataio::SampleTable& samples,
                           const heads::LogisticParams& params = {});

enum class Direction : uint8_t { kSame, kOpposite, kIndeterminate };
std::string_view DirectionName(Direction d);

inline constexpr int kDefaultTopK = 5;
inline constexpr double kIndeterminateMean = 1e-6;

struct AxisGroups {
  std::string name;
  std::vector<int> groups;  // per row; negative ids are ignored
  std::vector<std::string> group_names;
};

struct DirectionRow {
  int feature = 0;
  double mean_abs_phi = 0.0;
  // Per axis: the verdict and each group's mean attribution (NaN if empty).
  std::vector<Direction> verdicts;
  std::vector<std::vector<double>> group_means;
};

struct DirectionTable {
  std::vector<std::string> axes;
  std::vector<DirectionRow> rows;
};

// Ranks features by mean |phi| over the rows of x and, for the top_k, checks
// whether the per-group mean attribution has one sign on every axis.
// Throws kDimMismatch, kInvalidSpec (top_k < 1).
DirectionTable DirectionConsistency(const gbt::GbtModel& model, const Matrix& x,
                                    const std::vector<AxisGroups>& axes,
                                    int top_k = kDefaultTopK, int threads = 0);

// Verdict for one feature on one axis from its group means.
Direction ClassifyDirection(std::span<const double> group_means);

struct ConditionReport {
  std::string condition;
  int count = 0;
  int positives = 0;
  double auprc = 0.0;
  double roc_auc = 0.0;
  std::vector<metrics::SubgroupResult> axes;  // sex, age, race
};

struct FairnessReport {
  std::vector<ConditionReport> conditions;
  double mean_auprc = 0.0;
  // Mean over conditions of each axis delta, indexed by Axis.
  std::array<double, 3> mean_delta = {0.0, 0.0, 0.0};
  double composite = 0.0;

  double MeanDelta(dataio::Axis axis) const {
    return mean_delta[static_cast<size_t>(axis)];
  }
};

// probabilities is n x C with column c scoring samples.conditions()[
// condition_index[c]]. Missing labels are excluded per condition.
FairnessReport BuildBiasReport(const Matrix& probabilities,
                               const dataio::SampleTable& samples,
                               const std::vector<int>& condition_index);

// Scores `embeddings` with the model (its PCA applied) and reports over the
// model's conditions, matched to sample columns by name.
FairnessReport BiasReport(const heads::MultiHeadModel& model,
                          const Matrix& embeddings,
                          const dataio::SampleTable& samples);

struct GroupThresholdRates {
  std::string group;
  int count = 0;
  int positives = 0;
  metrics::ConfusionRates rates;
};

// Clinical operating point: a threshold chosen on validation scores to reach
// the recall floor, then applied per group to test scores.
struct ThresholdAnalysis {
  double recall_floor = 0.0;
  double threshold = 0.0;
  metrics::ConfusionRates overall;
  std::vector<GroupThresholdRates> groups;  // groups with both classes
  double delta_fnr = 0.0;
  double delta_tpr = 0.0;
  double delta_fpr = 0.0;
  double eo_gap = 0.0;
};

inline constexpr double kDefaultRecallFloor = 0.95;

// Throws kNoPositives (validation), kSingleClass (test), kTooFewGroups.
ThresholdAnalysis AnalyzeThreshold(std::span<const double> val_scores,
                                   std::span<const int> val_labels,
                                   std::span<const double> test_scores,
                                   std::span<const int> test_labels,
                                   std::span<const int> test_groups,
                                   const std::vector<std::string>& group_names,
                                   double recall_floor = kDefaultRecallFloor);

// First two principal coordinates of `x` under a PCA fitted on `fit_rows`.
Matrix Projection2d(const Matrix& fit_rows, const Matrix& x);

}  // namespace fairhead::detect

#endif  // FAIRHEAD_DETECT_DETECT_H_
