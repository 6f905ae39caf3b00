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

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "fairhead/common/error.h"
#include "fairhead/dataio/embeddings.h"
#include "fairhead/dataio/synthetic.h"
#include "fairhead/detect/detect.h"
#include "fairhead/gbt/gbt.h"
#include "fairhead/heads/multihead.h"
#include "fairhead/linalg/pca.h"
#include "fairhead/metrics/metrics.h"
#include "oracles.h"

namespace fairhead::detect {
namespace {

using dataio::Axis;
using dataio::Sample;
using dataio::SampleTable;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kUsage;
}

Sample MakeSample(int i, dataio::Sex sex, int label) {
  Sample s;
  s.id = "s" + std::to_string(i);
  s.sex = sex;
  s.age_years = 50;
  s.race = dataio::Race::kWhite;
  s.split = dataio::Split::kTest;
  s.labels = {static_cast<int8_t>(label)};
  return s;
}

const PrevalenceCell& Cell(const PrevalenceTable& t, Axis axis, const std::string& group) {
  for (const auto& c : t.cells) {
    if (c.axis == axis && c.group == group) return c;
  }
  throw std::runtime_error("missing cell");
}

TEST(PrevalenceTest, SharesOverLabeledSamples) {
  // 1000 labeled samples; female/edema holds 5.8% negatives and 1.3% positives.
  std::vector<Sample> rows;
  int id = 0;
  for (int i = 0; i < 58; ++i) rows.push_back(MakeSample(id++, dataio::Sex::kFemale, 0));
  for (int i = 0; i < 13; ++i) rows.push_back(MakeSample(id++, dataio::Sex::kFemale, 1));
  for (int i = 0; i < 529; ++i) rows.push_back(MakeSample(id++, dataio::Sex::kMale, 0));
  for (int i = 0; i < 400; ++i) rows.push_back(MakeSample(id++, dataio::Sex::kMale, 1));
  for (int i = 0; i < 50; ++i) {
    rows.push_back(MakeSample(id++, dataio::Sex::kFemale, dataio::kMissingLabel));
  }
  const PrevalenceTable t = ComputePrevalence(SampleTable({"edema"}, rows));
  const PrevalenceCell& f = Cell(t, Axis::kSex, "female");
  EXPECT_EQ(f.negatives, 58);
  EXPECT_EQ(f.positives, 13);
  EXPECT_DOUBLE_EQ(f.negative_share, 0.058);
  EXPECT_DOUBLE_EQ(f.positive_share, 0.013);
  EXPECT_DOUBLE_EQ(f.positive_rate, 13.0 / 71.0);
  EXPECT_EQ(metrics::FormatPercentagePoints(f.positive_rate), "18.3");
  const PrevalenceCell& m = Cell(t, Axis::kSex, "male");
  EXPECT_DOUBLE_EQ(m.positive_rate, 400.0 / 929.0);
}

TEST(PrevalenceTest, ZeroPositivesGiveZeroRate) {
  std::vector<Sample> rows;
  for (int i = 0; i < 5; ++i) rows.push_back(MakeSample(i, dataio::Sex::kFemale, 0));
  for (int i = 5; i < 10; ++i) rows.push_back(MakeSample(i, dataio::Sex::kMale, 1));
  const PrevalenceTable t = ComputePrevalence(SampleTable({"edema"}, rows));
  EXPECT_EQ(Cell(t, Axis::kSex, "female").positive_rate, 0.0);
  EXPECT_EQ(Cell(t, Axis::kSex, "male").positive_rate, 1.0);
}

TEST(PrevalenceTest, CellOrderAndOtherRaceExcluded) {
  const auto data = dataio::GenerateSynthetic(dataio::OracleSpec::Default(), 500, 1);
  const PrevalenceTable t = ComputePrevalence(data.samples);
  // 2 sex + 2 age + 3 race groups, 4 conditions each.
  ASSERT_EQ(t.cells.size(), 7u * 4u);
  EXPECT_EQ(t.cells.front().axis, Axis::kSex);
  EXPECT_EQ(t.cells.back().axis, Axis::kRace);
  for (const auto& c : t.cells) EXPECT_NE(c.group, "other");
}

TEST(PrevalenceTest, SymmetricOracleGivesHalfRate) {
  dataio::OracleSpec spec = dataio::OracleSpec::Default();
  for (auto& c : spec.conditions) c.bias = 0.0;
  const int n = 8000;
  const auto data = dataio::GenerateSynthetic(spec, n, 2);
  for (const auto& c : ComputePrevalence(data.samples).cells) {
    const int labeled = c.negatives + c.positives;
    const double se = std::sqrt(0.25 / labeled);
    EXPECT_NEAR(c.positive_rate, 0.5, 4 * se) << c.group << " " << c.condition;
  }
}

TEST(LeakageTest, StrongSignalIsDetected) {
  dataio::OracleSpec spec = dataio::OracleSpec::Default();
  spec.signals[static_cast<size_t>(Axis::kSex)] = dataio::DemographicSignal{0, 4.0};
  const auto data = dataio::GenerateSynthetic(spec, 3000, 3);
  const LeakageResult r = LeakageProbe(data.embeddings.data, data.samples);
  EXPECT_GT(r.sex_auc, 0.9);
  EXPECT_EQ(r.ForAxis(Axis::kSex), r.sex_auc);
  EXPECT_EQ(r.ForAxis(Axis::kRace), r.race_auc);
}

TEST(LeakageTest, NoSignalGivesChanceAuc) {
  const auto data = dataio::GenerateSynthetic(dataio::OracleSpec::Default(), 10000, 4);
  const LeakageResult r = LeakageProbe(data.embeddings.data, data.samples);
  for (double auc : {r.sex_auc, r.age_auc, r.race_auc}) {
    EXPECT_GE(auc, 0.45);
    EXPECT_LE(auc, 0.55);
  }
}

TEST(LeakageTest, PermutedGroupsGiveChanceAuc) {
  const int n = 5000;
  const Matrix x = testing::GaussianMatrix(2 * n, 8, 5);
  std::vector<int> groups(2 * n);
  for (int i = 0; i < 2 * n; ++i) groups[i] = x(i, 0) > 0;
  std::mt19937_64 gen(6);
  std::shuffle(groups.begin(), groups.end(), gen);
  const std::vector<int> a(groups.begin(), groups.begin() + n), b(groups.begin() + n, groups.end());
  const double auc = ProbeAuc(x.topRows(n), a, x.bottomRows(n), b);
  EXPECT_GE(auc, 0.45);
  EXPECT_LE(auc, 0.55);
}

TEST(LeakageTest, ProbeErrorsAndIgnoredGroups) {
  const Matrix x = testing::GaussianMatrix(40, 2, 7);
  const std::vector<int> one(20, 0);
  EXPECT_EQ(CodeOf([&] { ProbeAuc(x.topRows(20), one, x.bottomRows(20), one); }),
            ErrorCode::kSingleGroup);
  // Negative ids are left out.
  std::vector<int> g(40);
  for (int i = 0; i < 40; ++i) g[i] = x(i, 0) > 0;
  g[0] = -1;
  const std::vector<int> ga(g.begin(), g.begin() + 20), gb(g.begin() + 20, g.end());
  Matrix kept = x.block(1, 0, 19, 2);
  const std::vector<int> gk(g.begin() + 1, g.begin() + 20);
  EXPECT_EQ(ProbeAuc(x.topRows(20), ga, x.bottomRows(20), gb),
            ProbeAuc(kept, gk, x.bottomRows(20), gb));
}

TEST(DirectionTest, Verdicts) {
  EXPECT_EQ(ClassifyDirection(std::vector<double>{0.2, 0.1}), Direction::kSame);
  EXPECT_EQ(ClassifyDirection(std::vector<double>{0.2, -0.1}), Direction::kOpposite);
  EXPECT_EQ(ClassifyDirection(std::vector<double>{-0.2, -0.1, -0.3}), Direction::kSame);
  EXPECT_EQ(ClassifyDirection(std::vector<double>{0.2, 5e-7}), Direction::kIndeterminate);
  EXPECT_EQ(ClassifyDirection(std::vector<double>{0.2, -0.1, 1e-9}),
            Direction::kIndeterminate);
  EXPECT_EQ(DirectionName(Direction::kSame), "same");
  EXPECT_EQ(DirectionName(Direction::kOpposite), "opposite");
  EXPECT_EQ(DirectionName(Direction::kIndeterminate), "indeterminate");
}

struct DirectionFixture {
  gbt::GbtModel model;
  Matrix x;
  std::vector<AxisGroups> axes;
};

DirectionFixture MakeDirectionFixture() {
  const auto data = dataio::GenerateSynthetic(dataio::OracleSpec::Default(16), 600, 8);
  DirectionFixture f;
  f.x = data.embeddings.data;
  const std::vector<int> y = data.samples.Labels(0, [&] {
    std::vector<int> all(600);
    for (int i = 0; i < 600; ++i) all[i] = i;
    return all;
  }());
  std::vector<int> rows;
  std::vector<int> labels;
  for (int i = 0; i < 600; ++i) {
    if (y[i] >= 0) {
      rows.push_back(i);
      labels.push_back(y[i]);
    }
  }
  Matrix fit(rows.size(), f.x.cols());
  for (size_t i = 0; i < rows.size(); ++i) fit.row(i) = f.x.row(rows[i]);
  gbt::GbtParams p;
  p.n_estimators = 20;
  p.max_depth = 3;
  f.model = gbt::FitGbt(fit, labels, std::vector<double>(labels.size(), 1.0), p);
  for (Axis axis : dataio::kAllAxes) {
    f.axes.push_back({std::string(dataio::AxisName(axis)), data.samples.MetricGroups(axis),
                      dataio::AxisGroupNames(axis)});
  }
  return f;
}

TEST(DirectionTest, ShapeAndRanking) {
  const DirectionFixture f = MakeDirectionFixture();
  const DirectionTable t = DirectionConsistency(f.model, f.x, f.axes);
  ASSERT_EQ(t.rows.size(), 5u);
  EXPECT_EQ(t.axes, (std::vector<std::string>{"sex", "age", "race"}));
  for (size_t r = 0; r < t.rows.size(); ++r) {
    EXPECT_EQ(t.rows[r].verdicts.size(), 3u);
    EXPECT_EQ(t.rows[r].group_means.size(), 3u);
    EXPECT_EQ(t.rows[r].group_means[2].size(), 3u);
    if (r > 0) EXPECT_GE(t.rows[r - 1].mean_abs_phi, t.rows[r].mean_abs_phi);
    for (size_t a = 0; a < 3; ++a) {
      EXPECT_EQ(t.rows[r].verdicts[a], ClassifyDirection(t.rows[r].group_means[a]));
    }
  }
  EXPECT_EQ(DirectionConsistency(f.model, f.x, f.axes, 2).rows.size(), 2u);
  EXPECT_EQ(CodeOf([&] { DirectionConsistency(f.model, f.x, f.axes, 0); }),
            ErrorCode::kInvalidSpec);
  EXPECT_EQ(CodeOf([&] { DirectionConsistency(f.model, f.x.leftCols(3), f.axes); }),
            ErrorCode::kDimMismatch);
}

TEST(DirectionTest, InvariantToGroupRelabeling) {
  DirectionFixture f = MakeDirectionFixture();
  const DirectionTable before = DirectionConsistency(f.model, f.x, f.axes);
  for (int& g : f.axes[0].groups) {
    if (g >= 0) g = 1 - g;
  }
  std::swap(f.axes[0].group_names[0], f.axes[0].group_names[1]);
  const DirectionTable after = DirectionConsistency(f.model, f.x, f.axes);
  ASSERT_EQ(before.rows.size(), after.rows.size());
  for (size_t r = 0; r < before.rows.size(); ++r) {
    EXPECT_EQ(before.rows[r].feature, after.rows[r].feature);
    EXPECT_EQ(before.rows[r].verdicts, after.rows[r].verdicts);
    EXPECT_EQ(before.rows[r].group_means[0][0], after.rows[r].group_means[0][1]);
    EXPECT_EQ(before.rows[r].group_means[0][1], after.rows[r].group_means[0][0]);
  }
}

TEST(DirectionTest, ThreadCountDoesNotChangeTable) {
  const DirectionFixture f = MakeDirectionFixture();
  const DirectionTable a = DirectionConsistency(f.model, f.x, f.axes, 5, 1);
  const DirectionTable b = DirectionConsistency(f.model, f.x, f.axes, 5, 3);
  for (size_t r = 0; r < a.rows.size(); ++r) {
    EXPECT_EQ(a.rows[r].feature, b.rows[r].feature);
    EXPECT_EQ(a.rows[r].mean_abs_phi, b.rows[r].mean_abs_phi);
    EXPECT_EQ(a.rows[r].group_means, b.rows[r].group_means);
  }
}

TEST(BiasReportTest, IdenticalGroupsGiveZeroDeltas) {
  // Every group sees the same score/label multiset.
  std::vector<Sample> rows;
  const double scores[] = {0.9, 0.7, 0.4, 0.2};
  const int labels[] = {1, 0, 1, 0};
  Matrix p(0, 1);
  std::vector<double> flat;
  int id = 0;
  for (int sex = 0; sex < 2; ++sex) {
    for (int age : {40, 80}) {
      for (auto race : {dataio::Race::kWhite, dataio::Race::kAsian, dataio::Race::kBlack}) {
        for (int k = 0; k < 4; ++k) {
          Sample s = MakeSample(id++, static_cast<dataio::Sex>(sex), labels[k]);
          s.age_years = age;
          s.race = race;
          rows.push_back(s);
          flat.push_back(scores[k]);
        }
      }
    }
  }
  p.resize(flat.size(), 1);
  for (size_t i = 0; i < flat.size(); ++i) p(i, 0) = flat[i];
  const FairnessReport r = BuildBiasReport(p, SampleTable({"edema"}, rows), {0});
  ASSERT_EQ(r.conditions.size(), 1u);
  for (Axis axis : dataio::kAllAxes) EXPECT_EQ(r.MeanDelta(axis), 0.0);
  EXPECT_EQ(r.composite, r.mean_auprc);
}

TEST(BiasReportTest, DeltasReproducibleFromGroupTable) {
  dataio::OracleSpec spec = dataio::OracleSpec::Default();
  spec.label_noise_rate = 0.2;
  const auto data = dataio::GenerateSynthetic(spec, 4000, 9);
  std::vector<std::vector<int>> labels;
  std::vector<int> train = data.samples.SplitIndices(dataio::Split::kTrain);
  Matrix xt(train.size(), data.embeddings.dim());
  for (size_t i = 0; i < train.size(); ++i) xt.row(i) = data.embeddings.data.row(train[i]);
  for (int c = 0; c < 4; ++c) labels.push_back(data.samples.Labels(c, train));
  heads::MultiHeadModel model = heads::TrainMultihead(
      heads::HeadKind::kLogisticRegression, xt, labels, data.samples.conditions(),
      std::vector<double>(train.size(), 1.0), heads::HeadParams{}, 1);
  model.pca = std::make_shared<linalg::PcaModel>(linalg::FitPcaComponents(
      data.embeddings.data, data.embeddings.dim()));
  const std::vector<int> test = data.samples.SplitIndices(dataio::Split::kTest);
  const SampleTable test_samples = data.samples.Select(test);
  const FairnessReport r =
      BiasReport(model, dataio::SelectRows(data.embeddings, test).data, test_samples);
  ASSERT_EQ(r.conditions.size(), 4u);
  std::array<double, 3> sums = {0, 0, 0};
  double auprc = 0;
  for (const auto& c : r.conditions) {
    auprc += c.auprc;
    ASSERT_EQ(c.axes.size(), 3u);
    for (size_t a = 0; a < 3; ++a) {
      double lo = 1e300, hi = -1e300;
      for (const auto& g : c.axes[a].groups) {
        lo = std::min(lo, g.auprc);
        hi = std::max(hi, g.auprc);
      }
      EXPECT_EQ(c.axes[a].delta, hi - lo);
      sums[a] += c.axes[a].delta;
    }
  }
  for (size_t a = 0; a < 3; ++a) EXPECT_NEAR(r.mean_delta[a], sums[a] / 4, 1e-15);
  EXPECT_NEAR(r.mean_auprc, auprc / 4, 1e-15);
  EXPECT_NEAR(r.composite,
              metrics::CompositeScore(r.mean_auprc, r.mean_delta[0], r.mean_delta[1],
                                      r.mean_delta[2]),
              1e-15);
  EXPECT_EQ(r.conditions[0].count,
            static_cast<int>(std::count_if(test_samples.rows().begin(),
                                           test_samples.rows().end(),
                                           [](const Sample& s) { return s.labels[0] >= 0; })));
}

TEST(ThresholdTest, MatchesDirectComputation) {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 600;
  std::vector<double> vs(n), ts(n);
  std::vector<int> vy(n), ty(n), tg(n);
  for (int i = 0; i < n; ++i) {
    vy[i] = u(gen) < 0.3;
    ty[i] = u(gen) < 0.3;
    tg[i] = i % 3;
    vs[i] = 0.5 * u(gen) + 0.4 * vy[i];
    ts[i] = 0.5 * u(gen) + (0.2 + 0.1 * tg[i]) * ty[i];
  }
  const std::vector<std::string> names = {"white", "asian", "black"};
  const ThresholdAnalysis a = AnalyzeThreshold(vs, vy, ts, ty, tg, names);
  EXPECT_EQ(a.recall_floor, kDefaultRecallFloor);
  EXPECT_EQ(a.threshold, testing::BruteThreshold(vs, vy, 0.95));
  ASSERT_EQ(a.groups.size(), 3u);
  std::vector<double> fnr, tpr, fpr;
  for (int g = 0; g < 3; ++g) {
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      if (tg[i] == g) {
        s.push_back(ts[i]);
        y.push_back(ty[i]);
      }
    }
    const auto rates = metrics::ComputeConfusionRates(s, y, a.threshold);
    EXPECT_EQ(a.groups[g].group, names[g]);
    EXPECT_EQ(a.groups[g].rates.fnr, rates.fnr);
    EXPECT_EQ(a.groups[g].rates.fpr, rates.fpr);
    fnr.push_back(rates.fnr);
    tpr.push_back(rates.tpr);
    fpr.push_back(rates.fpr);
  }
  auto gap = [](const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end());
  };
  EXPECT_EQ(a.delta_fnr, gap(fnr));
  EXPECT_EQ(a.delta_tpr, gap(tpr));
  EXPECT_EQ(a.delta_fpr, gap(fpr));
  EXPECT_EQ(a.eo_gap, std::max(a.delta_tpr, a.delta_fpr));
  EXPECT_EQ(a.overall.tpr, metrics::ComputeConfusionRates(ts, ty, a.threshold).tpr);
}

TEST(ThresholdTest, Errors) {
  const std::vector<double> s = {0.1, 0.9, 0.4, 0.6};
  const std::vector<int> y = {0, 1, 0, 1};
  const std::vector<int> zeros = {0, 0, 0, 0};
  const std::vector<int> g = {0, 1, 0, 1};
  const std::vector<std::string> names = {"a", "b"};
  EXPECT_EQ(CodeOf([&] { AnalyzeThreshold(s, zeros, s, y, g, names); }),
            ErrorCode::kNoPositives);
  EXPECT_EQ(CodeOf([&] { AnalyzeThreshold(s, y, s, zeros, g, names); }),
            ErrorCode::kSingleClass);
  const std::vector<int> one_group = {0, 0, 0, 0};
  EXPECT_EQ(CodeOf([&] { AnalyzeThreshold(s, y, s, y, one_group, names); }),
            ErrorCode::kTooFewGroups);
}

TEST(ProjectionTest, LeadingAxesOfFitRows) {
  Matrix fit = testing::GaussianMatrix(400, 4, 11);
  fit.col(0) *= 5.0;
  fit.col(2) *= 2.0;
  const Matrix x = testing::GaussianMatrix(50, 4, 12);
  const Matrix p = Projection2d(fit, x);
  ASSERT_EQ(p.rows(), 50);
  ASSERT_EQ(p.cols(), 2);
  const Matrix q = Projection2d(fit, fit);
  const Eigen::RowVectorXd mean = q.colwise().mean();
  EXPECT_NEAR(mean(0), 0.0, 1e-10);
  const double v0 = (q.col(0).array() - mean(0)).square().sum();
  const double v1 = (q.col(1).array() - mean(1)).square().sum();
  EXPECT_GT(v0, v1);
}

}  // namespace
}  // namespace fairhead::detect
