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

#ifndef FAIRHEAD_METRICS_METRICS_H_
#define FAIRHEAD_METRICS_METRICS_H_

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace fairhead::metrics {

// Precision-recall curve over distinct score thresholds, highest first. The
// first point is the (0, first precision) anchor with threshold +infinity;
// point i > 0 corresponds to predicting positive iff score >= thresholds[i].
struct PrCurve {
  std::vector<double> recall;
  std::vector<double> precision;
  std::vector<double> thresholds;
};

// Throws Error(kSingleClass) unless both classes are present.
PrCurve PrecisionRecallCurve(std::span<const double> scores,
                             std::span<const int> labels);

// Average precision: sum over threshold steps of (R_i - R_{i-1}) * P_i, with
// tied scores forming one step. Throws Error(kSingleClass).
double Auprc(std::span<const double> scores, std::span<const int> labels);

// Probability that a random positive outranks a random negative, ties
// counted one half. Throws Error(kSingleClass).
double RocAuc(std::span<const double> scores, std::span<const int> labels);

struct GroupAuprc {
  int group = 0;
  std::string name;
  double auprc = 0.0;
  int count = 0;
  int positives = 0;
};

// Per-group AUPRC on one demographic axis. `delta` is max - min over the
// groups that contain both classes; the others are listed in `dropped`.
struct SubgroupResult {
  std::string axis;
  std::vector<GroupAuprc> groups;
  std::vector<int> dropped;
  double delta = 0.0;
};

// groups[i] in [0, group_names.size()) or negative to leave the sample out.
// Groups lacking a class are dropped with a logged warning. Throws
// Error(kTooFewGroups) when fewer than two groups remain.
SubgroupResult SubgroupAuprc(std::span<const double> scores,
                             std::span<const int> labels,
                             std::span<const int> groups,
                             const std::vector<std::string>& group_names,
                             const std::string& axis);

// auprc - (delta_sex + delta_age + delta_race).
double CompositeScore(double auprc_mean, double delta_sex, double delta_age,
                      double delta_race);

// Largest distinct score t such that predicting score >= t reaches recall
// >= min_recall. Throws kNoPositives, kInvalidSpec (min_recall outside (0, 1]).
double SelectThresholdMinRecall(std::span<const double> scores,
                                std::span<const int> labels, double min_recall);

struct ConfusionRates {
  double tpr = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;  // exactly 1 - tpr
  double tnr = 0.0;  // exactly 1 - fpr
};

// Rates at score >= threshold. Throws Error(kSingleClass) unless both
// classes are present.
ConfusionRates ComputeConfusionRates(std::span<const double> scores,
                                     std::span<const int> labels, double threshold);

// max - min. Throws Error(kTooFewGroups) for fewer than two values.
double MaxGap(std::span<const double> values);

// max(MaxGap(tpr), MaxGap(fpr)).
double EqualizedOddsGap(std::span<const double> tpr, std::span<const double> fpr);

// Fraction of raters disagreeing with the case majority; an even split
// counts 0.5. Throws Error(kInvalidSpec) for a case without votes.
double CaseDisagreement(std::span<const int> votes);

// Mean case disagreement per group (groups in [0, num_groups)). Throws
// Error(kEmptyGroup) if a group has no cases.
std::vector<double> DisagreementRate(const std::vector<std::vector<int>>& votes,
                                     std::span<const int> groups, int num_groups);

struct RunAggregate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n_runs = 0;
};

inline constexpr int kDefaultRepeats = 5;
inline constexpr double kConfidenceLevel = 0.95;

// Mean, sample std and a two-sided 95% Student t interval with n - 1 degrees
// of freedom. Throws Error(kTooFewRuns) for fewer than two values.
RunAggregate AggregateRuns(std::span<const double> values);

// Renders a [0, 1] quantity in percentage points with one decimal: 0.016 ->
// "1.6".
std::string FormatPercentagePoints(double value);

}  // namespace fairhead::metrics

#endif  // FAIRHEAD_METRICS_METRICS_H_
