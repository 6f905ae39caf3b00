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

#include "fairhead/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fairhead/common/error.h"

namespace fairhead::metrics {
namespace {

void CheckSizes(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kDimMismatch,
                fmt::format("{} scores for {} labels", scores.size(), labels.size()));
  }
}

struct ClassCounts {
  int positives = 0;
  int negatives = 0;
};

ClassCounts CountClasses(std::span<const int> labels) {
  ClassCounts c;
  for (int y : labels) (y == 1 ? c.positives : c.negatives) += 1;
  return c;
}

void RequireBothClasses(const ClassCounts& c) {
  if (c.positives == 0 || c.negatives == 0) {
    throw Error(ErrorCode::kSingleClass,
                fmt::format("{} positives and {} negatives", c.positives, c.negatives));
  }
}

// Sample indices by descending score; ties by index for stability.
std::vector<int> DescendingOrder(std::span<const double> scores) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  });
  return order;
}

// Cumulative (true, false) positive counts at each distinct threshold.
struct Step {
  double threshold;
  int tp;
  int fp;
};

std::vector<Step> ThresholdSteps(std::span<const double> scores,
                                 std::span<const int> labels) {
  const std::vector<int> order = DescendingOrder(scores);
  std::vector<Step> steps;
  int tp = 0;
  int fp = 0;
  for (size_t i = 0; i < order.size(); ++i) {
    (labels[order[i]] == 1 ? tp : fp) += 1;
    if (i + 1 == order.size() || scores[order[i + 1]] != scores[order[i]]) {
      steps.push_back({scores[order[i]], tp, fp});
    }
  }
  return steps;
}

}  // namespace

PrCurve PrecisionRecallCurve(std::span<const double> scores,
                             std::span<const int> labels) {
  CheckSizes(scores, labels);
  const ClassCounts counts = CountClasses(labels);
  RequireBothClasses(counts);
  const std::vector<Step> steps = ThresholdSteps(scores, labels);
  PrCurve curve;
  curve.recall.push_back(0.0);
  curve.precision.push_back(static_cast<double>(steps[0].tp) /
                            (steps[0].tp + steps[0].fp));
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());
  for (const Step& s : steps) {
    curve.recall.push_back(static_cast<double>(s.tp) / counts.positives);
    curve.precision.push_back(static_cast<double>(s.tp) / (s.tp + s.fp));
    curve.thresholds.push_back(s.threshold);
  }
  return curve;
}

double Auprc(std::span<const double> scores, std::span<const int> labels) {
  const PrCurve curve = PrecisionRecallCurve(scores, labels);
  double ap = 0.0;
  for (size_t i = 1; i < curve.recall.size(); ++i) {
    ap += (curve.recall[i] - curve.recall[i - 1]) * curve.precision[i];
  }
  return ap;
}

double RocAuc(std::span<const double> scores, std::span<const int> labels) {
  CheckSizes(scores, labels);
  const ClassCounts counts = CountClasses(labels);
  RequireBothClasses(counts);
  const std::vector<Step> steps = ThresholdSteps(scores, labels);
  // For each tie group: positives in it beat every negative below, and tie
  // with the negatives inside the group.
  double correct = 0.0;
  int prev_tp = 0;
  int prev_fp = 0;
  for (const Step& s : steps) {
    const double pos = s.tp - prev_tp;
    const double neg = s.fp - prev_fp;
    correct += pos * (counts.negatives - s.fp) + 0.5 * pos * neg;
    prev_tp = s.tp;
    prev_fp = s.fp;
  }
  return correct / (static_cast<double>(counts.positives) * counts.negatives);
}

SubgroupResult SubgroupAuprc(std::span<const double> scores,
                             std::span<const int> labels,
                             std::span<const int> groups,
                             const std::vector<std::string>& group_names,
                             const std::string& axis) {
  CheckSizes(scores, labels);
  if (groups.size() != labels.size()) {
    throw Error(ErrorCode::kDimMismatch, "group ids and labels differ in length");
  }
  const int num_groups = static_cast<int>(group_names.size());
  std::vector<std::vector<double>> group_scores(num_groups);
  std::vector<std::vector<int>> group_labels(num_groups);
  for (size_t i = 0; i < groups.size(); ++i) {
    const int g = groups[i];
    if (g < 0) continue;
    if (g >= num_groups) {
      throw Error(ErrorCode::kDimMismatch,
                  fmt::format("group id {} on axis {} has no name", g, axis));
    }
    group_scores[g].push_back(scores[i]);
    group_labels[g].push_back(labels[i]);
  }
  SubgroupResult result;
  result.axis = axis;
  for (int g = 0; g < num_groups; ++g) {
    const ClassCounts c = CountClasses(group_labels[g]);
    if (c.positives == 0 || c.negatives == 0) {
      spdlog::warn("axis {}: group '{}' has {} positives and {} negatives; "
                   "left out of the delta",
                   axis, group_names[g], c.positives, c.negatives);
      result.dropped.push_back(g);
      continue;
    }
    result.groups.push_back({g, group_names[g], Auprc(group_scores[g], group_labels[g]),
                             c.positives + c.negatives, c.positives});
  }
  if (result.groups.size() < 2) {
    throw Error(ErrorCode::kTooFewGroups,
                fmt::format("axis {} has {} evaluable groups", axis, result.groups.size()));
  }
  double lo = result.groups[0].auprc;
  double hi = lo;
  for (const GroupAuprc& g : result.groups) {
    lo = std::min(lo, g.auprc);
    hi = std::max(hi, g.auprc);
  }
  result.delta = hi - lo;
  return result;
}

double CompositeScore(double auprc_mean, double delta_sex, double delta_age,
                      double delta_race) {
  return auprc_mean - (delta_sex + delta_age + delta_race);
}

double SelectThresholdMinRecall(std::span<const double> scores,
                                std::span<const int> labels, double min_recall) {
  CheckSizes(scores, labels);
  if (!(min_recall > 0.0 && min_recall <= 1.0)) {
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("recall floor {} outside (0, 1]", min_recall));
  }
  const ClassCounts counts = CountClasses(labels);
  if (counts.positives == 0) throw Error(ErrorCode::kNoPositives, "no positive labels");
  const std::vector<Step> steps = ThresholdSteps(scores, labels);
  for (const Step& s : steps) {
    if (static_cast<double>(s.tp) / counts.positives >= min_recall) return s.threshold;
  }
  return steps.back().threshold;  // unreachable: the last step has recall 1
}

ConfusionRates ComputeConfusionRates(std::span<const double> scores,
                                     std::span<const int> labels, double threshold) {
  CheckSizes(scores, labels);
  const ClassCounts counts = CountClasses(labels);
  RequireBothClasses(counts);
  int tp = 0;
  int fp = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= threshold) (labels[i] == 1 ? tp : fp) += 1;
  }
  ConfusionRates r;
  r.tpr = static_cast<double>(tp) / counts.positives;
  r.fpr = static_cast<double>(fp) / counts.negatives;
  r.fnr = 1.0 - r.tpr;
  r.tnr = 1.0 - r.fpr;
  return r;
}

double MaxGap(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::kTooFewGroups,
                fmt::format("need at least two groups, got {}", values.size()));
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

double EqualizedOddsGap(std::span<const double> tpr, std::span<const double> fpr) {
  return std::max(MaxGap(tpr), MaxGap(fpr));
}

double CaseDisagreement(std::span<const int> votes) {
  if (votes.empty()) throw Error(ErrorCode::kInvalidSpec, "case without rater votes");
  int positives = 0;
  for (int v : votes) positives += v == 1 ? 1 : 0;
  const int total = static_cast<int>(votes.size());
  const int negatives = total - positives;
  if (positives == negatives) return 0.5;
  return static_cast<double>(std::min(positives, negatives)) / total;
}

std::vector<double> DisagreementRate(const std::vector<std::vector<int>>& votes,
                                     std::span<const int> groups, int num_groups) {
  if (votes.size() != groups.size()) {
    throw Error(ErrorCode::kDimMismatch, "vote and group lists differ in length");
  }
  std::vector<double> total(num_groups, 0.0);
  std::vector<int> count(num_groups, 0);
  for (size_t i = 0; i < votes.size(); ++i) {
    const int g = groups[i];
    if (g < 0 || g >= num_groups) {
      throw Error(ErrorCode::kDimMismatch, fmt::format("group id {} out of range", g));
    }
    total[g] += CaseDisagreement(votes[i]);
    count[g] += 1;
  }
  std::vector<double> rate(num_groups);
  for (int g = 0; g < num_groups; ++g) {
    if (count[g] == 0) throw Error(ErrorCode::kEmptyGroup, fmt::format("group {} has no cases", g));
    rate[g] = total[g] / count[g];
  }
  return rate;
}

RunAggregate AggregateRuns(std::span<const double> values) {
  const int n = static_cast<int>(values.size());
  if (n < 2) throw Error(ErrorCode::kTooFewRuns, fmt::format("{} runs; need at least 2", n));
  RunAggregate a;
  a.n_runs = n;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / n;
  if (std::all_of(values.begin(), values.end(),
                  [&](double v) { return v == values[0]; })) {
    a.mean = values[0];  // avoid rounding noise for constant runs
  }
  double ss = 0.0;
  for (double v : values) ss += (v - a.mean) * (v - a.mean);
  a.std = std::sqrt(ss / (n - 1));
  const boost::math::students_t dist(n - 1);
  const double t = boost::math::quantile(
      boost::math::complement(dist, (1.0 - kConfidenceLevel) / 2.0));
  const double half = t * a.std / std::sqrt(static_cast<double>(n));
  a.ci_low = a.mean - half;
  a.ci_high = a.mean + half;
  return a;
}

std::string FormatPercentagePoints(double value) {
  std::string s = fmt::format("{:.1f}", value * 100.0);
  if (s == "-0.0") s = "0.0";
  return s;
}

}  // namespace fairhead::metrics
