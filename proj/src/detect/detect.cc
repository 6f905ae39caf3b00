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

#include "fairhead/detect/detect.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fairhead/common/error.h"
#include "fairhead/gbt/tree_shap.h"
#include "fairhead/heads/logistic.h"
#include "fairhead/linalg/pca.h"

namespace fairhead::detect {

using dataio::Axis;

PrevalenceTable ComputePrevalence(const dataio::SampleTable& samples) {
  PrevalenceTable table;
  const auto& conditions = samples.conditions();
  for (Axis axis : dataio::kAllAxes) {
    const std::vector<int> groups = samples.MetricGroups(axis);
    const auto& names = dataio::AxisGroupNames(axis);
    for (size_t g = 0; g < names.size(); ++g) {
      for (size_t c = 0; c < conditions.size(); ++c) {
        int labeled = 0;
        int negatives = 0;
        int positives = 0;
        for (size_t i = 0; i < samples.size(); ++i) {
          const int y = samples[i].labels[c];
          if (y == dataio::kMissingLabel || groups[i] < 0) continue;
          ++labeled;
          if (groups[i] != static_cast<int>(g)) continue;
          (y == 1 ? positives : negatives) += 1;
        }
        PrevalenceCell cell{axis, names[g], conditions[c], negatives, positives};
        if (labeled > 0) {
          cell.negative_share = static_cast<double>(negatives) / labeled;
          cell.positive_share = static_cast<double>(positives) / labeled;
        }
        if (positives + negatives > 0) {
          cell.positive_rate = static_cast<double>(positives) / (positives + negatives);
        }
        table.cells.push_back(std::move(cell));
      }
    }
  }
  return table;
}

double ProbeAuc(const Matrix& train_x, std::span<const int> train_groups,
                const Matrix& test_x, std::span<const int> test_groups,
                const heads::LogisticParams& params) {
  if (static_cast<Eigen::Index>(train_groups.size()) != train_x.rows() ||
      static_cast<Eigen::Index>(test_groups.size()) != test_x.rows()) {
    throw Error(ErrorCode::kDimMismatch, "probe group ids and rows differ");
  }
  int num_groups = 0;
  for (int g : train_groups) num_groups = std::max(num_groups, g + 1);
  for (int g : test_groups) num_groups = std::max(num_groups, g + 1);
  std::vector<int> train_rows;
  std::vector<int> test_rows;
  for (size_t i = 0; i < train_groups.size(); ++i) {
    if (train_groups[i] >= 0) train_rows.push_back(static_cast<int>(i));
  }
  for (size_t i = 0; i < test_groups.size(); ++i) {
    if (test_groups[i] >= 0) test_rows.push_back(static_cast<int>(i));
  }
  std::vector<int> usable;
  for (int g = 0; g < num_groups; ++g) {
    const auto in = [g](std::span<const int> ids, const std::vector<int>& rows) {
      int count = 0;
      for (int r : rows) count += ids[r] == g ? 1 : 0;
      return count > 0 && count < static_cast<int>(rows.size());
    };
    if (in(train_groups, train_rows) && in(test_groups, test_rows)) usable.push_back(g);
  }
  if (usable.size() < 2) {
    throw Error(ErrorCode::kSingleGroup,
                fmt::format("{} groups present in both folds; need 2", usable.size()));
  }
  Matrix xtr(static_cast<Eigen::Index>(train_rows.size()), train_x.cols());
  for (size_t j = 0; j < train_rows.size(); ++j) xtr.row(j) = train_x.row(train_rows[j]);
  Matrix xte(static_cast<Eigen::Index>(test_rows.size()), test_x.cols());
  for (size_t j = 0; j < test_rows.size(); ++j) xte.row(j) = test_x.row(test_rows[j]);
  const std::vector<double> ones(train_rows.size(), 1.0);

  const auto one_vs_rest = [&](int g) {
    std::vector<int> ytr(train_rows.size());
    std::vector<int> yte(test_rows.size());
    for (size_t j = 0; j < train_rows.size(); ++j) ytr[j] = train_groups[train_rows[j]] == g;
    for (size_t j = 0; j < test_rows.size(); ++j) yte[j] = test_groups[test_rows[j]] == g;
    const auto probe = heads::LogisticRegression::Fit(xtr, ytr, ones, params);
    return metrics::RocAuc(probe.PredictProba(xte), yte);
  };
  if (num_groups == 2 && usable.size() == 2) return one_vs_rest(1);
  double total = 0.0;
  for (int g : usable) total += one_vs_rest(g);
  return total / static_cast<double>(usable.size());
}

double LeakageResult::ForAxis(Axis axis) const {
  switch (axis) {
    case Axis::kSex:
      return sex_auc;
    case Axis::kAge:
      return age_auc;
    case Axis::kRace:
      return race_auc;
  }
  return 0.0;
}

LeakageResult LeakageProbe(const Matrix& embeddings,
                           const dataio::SampleTable& samples,
                           const heads::LogisticParams& params) {
  if (static_cast<size_t>(embeddings.rows()) != samples.size()) {
    throw Error(ErrorCode::kIdMismatch, "embeddings and samples differ in length");
  }
  const std::vector<int> train = samples.SplitIndices(dataio::Split::kTrain);
  const std::vector<int> test = samples.SplitIndices(dataio::Split::kTest);
  Matrix xtr(static_cast<Eigen::Index>(train.size()), embeddings.cols());
  for (size_t j = 0; j < train.size(); ++j) xtr.row(j) = embeddings.row(train[j]);
  Matrix xte(static_cast<Eigen::Index>(test.size()), embeddings.cols());
  for (size_t j = 0; j < test.size(); ++j) xte.row(j) = embeddings.row(test[j]);

  LeakageResult result;
  for (Axis axis : dataio::kAllAxes) {
    const std::vector<int> groups = samples.MetricGroups(axis);
    std::vector<int> gtr(train.size());
    std::vector<int> gte(test.size());
    for (size_t j = 0; j < train.size(); ++j) gtr[j] = groups[train[j]];
    for (size_t j = 0; j < test.size(); ++j) gte[j] = groups[test[j]];
    double auc = 0.0;
    try {
      auc = ProbeAuc(xtr, gtr, xte, gte, params);
    } catch (const Error& e) {
      RethrowWithContext(e, fmt::format("leakage probe for {}", dataio::AxisName(axis)));
    }
    if (axis == Axis::kSex) result.sex_auc = auc;
    if (axis == Axis::kAge) result.age_auc = auc;
    if (axis == Axis::kRace) result.race_auc = auc;
  }
  return result;
}

std::string_view DirectionName(Direction d) {
  switch (d) {
    case Direction::kSame:
      return "same";
    case Direction::kOpposite:
      return "opposite";
    case Direction::kIndeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

Direction ClassifyDirection(std::span<const double> group_means) {
  bool positive = false;
  bool negative = false;
  for (double m : group_means) {
    if (std::isnan(m)) continue;
    if (std::abs(m) < kIndeterminateMean) return Direction::kIndeterminate;
    (m > 0.0 ? positive : negative) = true;
  }
  if (!positive && !negative) return Direction::kIndeterminate;
  return positive && negative ? Direction::kOpposite : Direction::kSame;
}

DirectionTable DirectionConsistency(const gbt::GbtModel& model, const Matrix& x,
                                    const std::vector<AxisGroups>& axes, int top_k,
                                    int threads) {
  if (top_k < 1) throw Error(ErrorCode::kInvalidSpec, "top_k must be >= 1");
  for (const AxisGroups& a : axes) {
    if (static_cast<Eigen::Index>(a.groups.size()) != x.rows()) {
      throw Error(ErrorCode::kDimMismatch,
                  fmt::format("axis {} has {} group ids for {} rows", a.name,
                              a.groups.size(), x.rows()));
    }
  }
  const Matrix phi = gbt::TreeShapleyMatrix(model, x, threads);
  const int k = static_cast<int>(phi.cols());
  std::vector<double> mean_abs(k, 0.0);
  for (int f = 0; f < k; ++f) {
    mean_abs[f] = x.rows() > 0 ? phi.col(f).cwiseAbs().mean() : 0.0;
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return mean_abs[a] > mean_abs[b]; });
  DirectionTable table;
  for (const AxisGroups& a : axes) table.axes.push_back(a.name);
  for (int r = 0; r < std::min(top_k, k); ++r) {
    DirectionRow row;
    row.feature = order[r];
    row.mean_abs_phi = mean_abs[order[r]];
    for (const AxisGroups& a : axes) {
      const size_t groups = a.group_names.size();
      std::vector<double> sum(groups, 0.0);
      std::vector<int> count(groups, 0);
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const int g = a.groups[i];
        if (g < 0 || g >= static_cast<int>(groups)) continue;
        sum[g] += phi(i, row.feature);
        count[g] += 1;
      }
      std::vector<double> means(groups);
      for (size_t g = 0; g < groups; ++g) {
        means[g] = count[g] > 0 ? sum[g] / count[g]
                                : std::numeric_limits<double>::quiet_NaN();
      }
      row.verdicts.push_back(ClassifyDirection(means));
      row.group_means.push_back(std::move(means));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

FairnessReport BuildBiasReport(const Matrix& probabilities,
                               const dataio::SampleTable& samples,
                               const std::vector<int>& condition_index) {
  if (static_cast<size_t>(probabilities.rows()) != samples.size() ||
      static_cast<size_t>(probabilities.cols()) != condition_index.size()) {
    throw Error(ErrorCode::kDimMismatch,
                fmt::format("{}x{} probabilities for {} samples and {} conditions",
                            probabilities.rows(), probabilities.cols(), samples.size(),
                            condition_index.size()));
  }
  if (condition_index.empty()) throw Error(ErrorCode::kInvalidSpec, "no conditions");
  std::array<std::vector<int>, 3> axis_groups;
  for (Axis axis : dataio::kAllAxes) {
    axis_groups[static_cast<size_t>(axis)] = samples.MetricGroups(axis);
  }
  FairnessReport report;
  for (size_t c = 0; c < condition_index.size(); ++c) {
    const int ci = condition_index[c];
    ConditionReport cr;
    cr.condition = samples.conditions().at(ci);
    std::vector<double> scores;
    std::vector<int> labels;
    std::array<std::vector<int>, 3> groups;
    for (size_t i = 0; i < samples.size(); ++i) {
      const int y = samples[i].labels[ci];
      if (y == dataio::kMissingLabel) continue;
      scores.push_back(probabilities(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)));
      labels.push_back(y);
      for (size_t a = 0; a < 3; ++a) groups[a].push_back(axis_groups[a][i]);
    }
    try {
      cr.count = static_cast<int>(labels.size());
      cr.positives = static_cast<int>(std::count(labels.begin(), labels.end(), 1));
      cr.auprc = metrics::Auprc(scores, labels);
      cr.roc_auc = metrics::RocAuc(scores, labels);
      for (Axis axis : dataio::kAllAxes) {
        cr.axes.push_back(metrics::SubgroupAuprc(
            scores, labels, groups[static_cast<size_t>(axis)],
            dataio::AxisGroupNames(axis), std::string(dataio::AxisName(axis))));
      }
    } catch (const Error& e) {
      RethrowWithContext(e, fmt::format("condition '{}'", cr.condition));
    }
    report.mean_auprc += cr.auprc;
    for (size_t a = 0; a < 3; ++a) report.mean_delta[a] += cr.axes[a].delta;
    report.conditions.push_back(std::move(cr));
  }
  const double count = static_cast<double>(report.conditions.size());
  report.mean_auprc /= count;
  for (double& d : report.mean_delta) d /= count;
  report.composite = metrics::CompositeScore(report.mean_auprc, report.mean_delta[0],
                                             report.mean_delta[1], report.mean_delta[2]);
  return report;
}

FairnessReport BiasReport(const heads::MultiHeadModel& model,
                          const Matrix& embeddings,
                          const dataio::SampleTable& samples) {
  std::vector<int> index;
  for (const std::string& name : model.condition_names) {
    const int ci = samples.ConditionIndex(name);
    if (ci < 0) {
      throw Error(ErrorCode::kMissingColumn,
                  fmt::format("samples have no condition '{}'", name));
    }
    index.push_back(ci);
  }
  return BuildBiasReport(model.PredictProbaEmbeddings(embeddings), samples, index);
}

ThresholdAnalysis AnalyzeThreshold(std::span<const double> val_scores,
                                   std::span<const int> val_labels,
                                   std::span<const double> test_scores,
                                   std::span<const int> test_labels,
                                   std::span<const int> test_groups,
                                   const std::vector<std::string>& group_names,
                                   double recall_floor) {
  if (test_groups.size() != test_labels.size()) {
    throw Error(ErrorCode::kDimMismatch, "test group ids and labels differ in length");
  }
  ThresholdAnalysis a;
  a.recall_floor = recall_floor;
  a.threshold = metrics::SelectThresholdMinRecall(val_scores, val_labels, recall_floor);
  a.overall = metrics::ComputeConfusionRates(test_scores, test_labels, a.threshold);
  std::vector<double> tpr;
  std::vector<double> fpr;
  for (size_t g = 0; g < group_names.size(); ++g) {
    std::vector<double> s;
    std::vector<int> y;
    for (size_t i = 0; i < test_groups.size(); ++i) {
      if (test_groups[i] != static_cast<int>(g)) continue;
      s.push_back(test_scores[i]);
      y.push_back(test_labels[i]);
    }
    const int positives = static_cast<int>(std::count(y.begin(), y.end(), 1));
    if (positives == 0 || positives == static_cast<int>(y.size())) {
      spdlog::warn("group '{}' lacks a class at the operating point; skipped",
                   group_names[g]);
      continue;
    }
    GroupThresholdRates r{group_names[g], static_cast<int>(y.size()), positives,
                          metrics::ComputeConfusionRates(s, y, a.threshold)};
    tpr.push_back(r.rates.tpr);
    fpr.push_back(r.rates.fpr);
    a.groups.push_back(std::move(r));
  }
  std::vector<double> fnr;
  for (const auto& g : a.groups) fnr.push_back(g.rates.fnr);
  a.delta_fnr = metrics::MaxGap(fnr);
  a.delta_tpr = metrics::MaxGap(tpr);
  a.delta_fpr = metrics::MaxGap(fpr);
  a.eo_gap = std::max(a.delta_tpr, a.delta_fpr);
  return a;
}

Matrix Projection2d(const Matrix& fit_rows, const Matrix& x) {
  const int k = std::min<int>(2, static_cast<int>(fit_rows.cols()));
  return linalg::FitPcaComponents(fit_rows, k).Transform(x);
}

}  // namespace fairhead::detect
