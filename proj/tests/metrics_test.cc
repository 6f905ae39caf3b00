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

#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "fairhead/common/error.h"
#include "fairhead/metrics/metrics.h"
#include "oracles.h"

namespace fairhead::metrics {
namespace {

using testing::BruteAuprc;
using testing::BruteRecall;
using testing::BruteRocAuc;
using testing::BruteThreshold;
using testing::RandomInstance;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kUsage;
}

TEST(AuprcTest, Examples) {
  EXPECT_DOUBLE_EQ(Auprc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}),
                   1.0);
  EXPECT_NEAR(Auprc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{1, 1, 0, 0}),
              5.0 / 12.0, 1e-15);
  std::vector<double> flat(10, 0.4);
  std::vector<int> y = {1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_NEAR(Auprc(flat, y), 0.3, 1e-15);
}

TEST(AuprcTest, CurveAnchorsAtInfinity) {
  const PrCurve c =
      PrecisionRecallCurve(std::vector<double>{0.9, 0.5, 0.5}, std::vector<int>{1, 0, 1});
  ASSERT_EQ(c.thresholds.size(), 3u);
  EXPECT_TRUE(std::isinf(c.thresholds[0]));
  EXPECT_EQ(c.recall[0], 0.0);
  EXPECT_DOUBLE_EQ(c.recall.back(), 1.0);
  EXPECT_DOUBLE_EQ(c.precision.back(), 2.0 / 3.0);
}

TEST(RocAucTest, Examples) {
  EXPECT_DOUBLE_EQ(RocAuc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}),
                   1.0);
  EXPECT_DOUBLE_EQ(
      RocAuc(std::vector<double>{0.1, 0.2, 0.3, 0.4}, std::vector<int>{0, 1, 0, 1}), 0.75);
  EXPECT_DOUBLE_EQ(
      RocAuc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, std::vector<int>{0, 1, 0, 1}), 0.5);
}

TEST(MetricOracleTest, RandomInstancesMatchBruteForce) {
  std::mt19937_64 gen(2024);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 500; ++trial) {
    RandomInstance(gen, 50, s, y);
    EXPECT_NEAR(Auprc(s, y), BruteAuprc(s, y), 1e-12) << "trial " << trial;
    EXPECT_NEAR(RocAuc(s, y), BruteRocAuc(s, y), 1e-12) << "trial " << trial;
  }
}

TEST(MetricPropertyTest, InvariantToMonotoneTransformAndPermutation) {
  std::mt19937_64 gen(7);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 100; ++trial) {
    RandomInstance(gen, 40, s, y);
    std::vector<double> t(s.size());
    for (size_t i = 0; i < s.size(); ++i) t[i] = std::exp(3.0 * s[i]) - 7.0;
    EXPECT_NEAR(Auprc(t, y), Auprc(s, y), 1e-12);
    EXPECT_NEAR(RocAuc(t, y), RocAuc(s, y), 1e-12);
    std::vector<size_t> order(s.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), gen);
    std::vector<double> ps;
    std::vector<int> py;
    for (size_t i : order) {
      ps.push_back(s[i]);
      py.push_back(y[i]);
    }
    EXPECT_NEAR(Auprc(ps, py), Auprc(s, y), 1e-12);
    EXPECT_NEAR(RocAuc(ps, py), RocAuc(s, y), 1e-12);
  }
}

TEST(MetricPropertyTest, RandomScoresGivePrevalence) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> s(10000);
  std::vector<int> y(10000);
  for (size_t i = 0; i < s.size(); ++i) {
    s[i] = u(gen);
    y[i] = u(gen) < 0.3;
  }
  EXPECT_NEAR(Auprc(s, y), 0.3, 0.02);
}

TEST(MetricTest, SingleClassErrors) {
  EXPECT_EQ(CodeOf([] { Auprc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}); }),
            ErrorCode::kSingleClass);
  EXPECT_EQ(CodeOf([] { RocAuc(std::vector<double>{0.1, 0.2}, std::vector<int>{0, 0}); }),
            ErrorCode::kSingleClass);
}

TEST(SubgroupTest, DeltaIsMaxPairwiseGap) {
  // Group 0: perfect (1.0); group 1: 5/12; group 2: single-class, dropped.
  const std::vector<double> s = {0.9, 0.8, 0.2, 0.1, 0.1, 0.2, 0.8, 0.9, 0.5, 0.6};
  const std::vector<int> y = {1, 1, 0, 0, 1, 1, 0, 0, 1, 1};
  const std::vector<int> g = {0, 0, 0, 0, 1, 1, 1, 1, 2, 2};
  const auto r = SubgroupAuprc(s, y, g, {"a", "b", "c"}, "race");
  ASSERT_EQ(r.groups.size(), 2u);
  EXPECT_EQ(r.dropped, std::vector<int>{2});
  EXPECT_NEAR(r.delta, 1.0 - 5.0 / 12.0, 1e-15);
  EXPECT_EQ(r.axis, "race");
}

TEST(SubgroupTest, IdenticalGroupsHaveZeroDelta) {
  const std::vector<double> s = {0.9, 0.3, 0.6, 0.9, 0.3, 0.6};
  const std::vector<int> y = {1, 0, 1, 1, 0, 1};
  const std::vector<int> g = {0, 0, 0, 1, 1, 1};
  EXPECT_EQ(SubgroupAuprc(s, y, g, {"f", "m"}, "sex").delta, 0.0);
}

TEST(SubgroupTest, TooFewGroups) {
  const std::vector<double> s = {0.9, 0.3, 0.6};
  const std::vector<int> y = {1, 0, 1};
  const std::vector<int> g = {0, 0, -1};
  EXPECT_EQ(CodeOf([&] { SubgroupAuprc(s, y, g, {"f", "m"}, "sex"); }),
            ErrorCode::kTooFewGroups);
}

TEST(MaxGapTest, Examples) {
  EXPECT_NEAR(MaxGap(std::vector<double>{0.80, 0.75}), 0.05, 1e-15);
  EXPECT_NEAR(MaxGap(std::vector<double>{0.9, 0.8, 0.7}), 0.2, 1e-15);
  EXPECT_EQ(CodeOf([] { MaxGap(std::vector<double>{0.5}); }), ErrorCode::kTooFewGroups);
}

TEST(CompositeTest, Examples) {
  EXPECT_NEAR(CompositeScore(0.8, 0.016, 0.041, 0.087), 0.656, 1e-12);
  EXPECT_EQ(CompositeScore(0.7, 0, 0, 0), 0.7);
  EXPECT_NEAR(CompositeScore(0.5, 0.2, 0.2, 0.2), -0.1, 1e-12);
  EXPECT_LT(CompositeScore(0.8, 0.02, 0.04, 0.08), CompositeScore(0.8, 0.01, 0.04, 0.08));
}

TEST(ThresholdTest, Examples) {
  const std::vector<double> s = {0.9, 0.7, 0.4, 0.2};
  EXPECT_EQ(SelectThresholdMinRecall(s, std::vector<int>{1, 1, 1, 0}, 0.95), 0.4);
  EXPECT_EQ(SelectThresholdMinRecall(s, std::vector<int>{0, 1, 0, 1}, 1.0), 0.2);
  EXPECT_EQ(SelectThresholdMinRecall(s, std::vector<int>{1, 1, 1, 1}, 1.0), 0.2);
  EXPECT_EQ(CodeOf([&] { SelectThresholdMinRecall(s, std::vector<int>{0, 0, 0, 0}, 0.9); }),
            ErrorCode::kNoPositives);
  EXPECT_EQ(CodeOf([&] { SelectThresholdMinRecall(s, std::vector<int>{1, 0, 0, 0}, 0.0); }),
            ErrorCode::kInvalidSpec);
  EXPECT_EQ(CodeOf([&] { SelectThresholdMinRecall(s, std::vector<int>{1, 0, 0, 0}, 1.5); }),
            ErrorCode::kInvalidSpec);
}

TEST(ThresholdTest, MatchesEnumerationAndIsMonotoneInFloor) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 200; ++trial) {
    RandomInstance(gen, 50, s, y);
    const double floor = u(gen);
    const double t = SelectThresholdMinRecall(s, y, floor);
    EXPECT_GE(BruteRecall(s, y, t), floor);
    EXPECT_EQ(t, BruteThreshold(s, y, floor));
    EXPECT_LE(SelectThresholdMinRecall(s, y, std::min(1.0, floor + 0.1)), t);
  }
}

TEST(ConfusionTest, Examples) {
  const std::vector<double> s = {0.9, 0.8, 0.2, 0.1};
  const std::vector<int> y = {1, 1, 0, 0};
  const auto perfect = ComputeConfusionRates(s, y, 0.5);
  EXPECT_EQ(perfect.tpr, 1.0);
  EXPECT_EQ(perfect.fpr, 0.0);
  const auto none = ComputeConfusionRates(s, y, 0.95);
  EXPECT_EQ(none.tpr, 0.0);
  EXPECT_EQ(none.fnr, 1.0);
  EXPECT_EQ(none.tnr, 1.0);
}

TEST(EqualizedOddsTest, ReferenceThresholdTable) {
  const std::vector<double> fnr_before = {0.159, 0.136, 0.154};
  EXPECT_NEAR(MaxGap(fnr_before), 0.023, 1e-12);
  EXPECT_NEAR(EqualizedOddsGap(std::vector<double>{0.84, 0.85}, std::vector<double>{0.3, 0.307}),
              0.010, 1e-12);
  EXPECT_EQ(EqualizedOddsGap(std::vector<double>{0.9, 0.9}, std::vector<double>{0.2, 0.2}), 0.0);
}

TEST(DisagreementTest, Examples) {
  EXPECT_DOUBLE_EQ(CaseDisagreement(std::vector<int>{1, 1, 1, 1, 1, 1, 0, 0}), 0.25);
  EXPECT_DOUBLE_EQ(CaseDisagreement(std::vector<int>{1, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(CaseDisagreement(std::vector<int>{1, 1, 0, 0}), 0.5);
  const auto rates =
      DisagreementRate({{1, 1, 1, 0}, {0, 0, 0, 0}, {1, 0, 1, 0}}, std::vector<int>{0, 0, 1}, 2);
  EXPECT_DOUBLE_EQ(rates[0], 0.125);
  EXPECT_DOUBLE_EQ(rates[1], 0.5);
  EXPECT_EQ(CodeOf([] { DisagreementRate({{1}}, std::vector<int>{0}, 2); }),
            ErrorCode::kEmptyGroup);
}

TEST(AggregateTest, StudentInterval) {
  const auto a = AggregateRuns(std::vector<double>{1, 2, 3, 4, 5});
  // t(0.975, 4) = 2.7764451051977987 from standard tables.
  const double half = 2.7764451051977987 * std::sqrt(2.5) / std::sqrt(5.0);
  EXPECT_DOUBLE_EQ(a.mean, 3.0);
  EXPECT_NEAR(a.std, 1.5811388300841898, 1e-12);
  EXPECT_NEAR(a.ci_low, 3.0 - half, 1e-9);
  EXPECT_NEAR(a.ci_high, 3.0 + half, 1e-9);
  EXPECT_NEAR(a.ci_low, 1.037, 5e-4);
  EXPECT_NEAR(a.ci_high, 4.963, 5e-4);
  EXPECT_EQ(a.n_runs, 5);
  EXPECT_EQ(kDefaultRepeats, 5);
}

TEST(AggregateTest, ConstantRuns) {
  const auto a = AggregateRuns(std::vector<double>(5, 0.7));
  EXPECT_EQ(a.mean, 0.7);
  EXPECT_EQ(a.std, 0.0);
  EXPECT_EQ(a.ci_low, 0.7);
  EXPECT_EQ(a.ci_high, 0.7);
  EXPECT_EQ(CodeOf([] { AggregateRuns(std::vector<double>{1.0}); }), ErrorCode::kTooFewRuns);
}

TEST(FormatTest, PercentagePoints) {
  EXPECT_EQ(FormatPercentagePoints(0.016), "1.6");
  EXPECT_EQ(FormatPercentagePoints(0.041), "4.1");
  EXPECT_EQ(FormatPercentagePoints(0.087), "8.7");
  EXPECT_EQ(FormatPercentagePoints(0.183), "18.3");
  EXPECT_EQ(FormatPercentagePoints(-0.0001), "0.0");
}

}  // namespace
}  // namespace fairhead::metrics
