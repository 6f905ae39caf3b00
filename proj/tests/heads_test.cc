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
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fairhead/common/error.h"
#include "fairhead/detect/detect.h"
#include "fairhead/heads/cart.h"
#include "fairhead/heads/head.h"
#include "fairhead/heads/knn.h"
#include "fairhead/heads/logistic.h"
#include "fairhead/heads/mlp.h"
#include "fairhead/heads/multihead.h"
#include "oracles.h"

namespace fairhead::heads {
namespace {

using testing::GaussianMatrix;
using testing::LinearLabels;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kUsage;
}

std::string Serialize(const HeadModel& h) {
  std::ostringstream out;
  WriteHead(h, out);
  return out.str();
}

HeadParams SmallParams() {
  HeadParams p;
  p.gbt.n_estimators = 10;
  p.gbt.max_depth = 3;
  p.forest.n_trees = 10;
  p.mlp.epochs = 30;
  p.mlp.hidden_width = 8;
  p.adversarial.epochs = 30;
  p.adversarial.hidden_width = 8;
  p.knn.k_neighbors = 5;
  return p;
}

constexpr HeadKind kAllKinds[] = {
    HeadKind::kGbt, HeadKind::kLogisticRegression, HeadKind::kDecisionTree,
    HeadKind::kRandomForest, HeadKind::kBalancedRandomForest, HeadKind::kMlp,
    HeadKind::kKnn, HeadKind::kAdversarialMlp};

TEST(HeadKindTest, NamesAndAliases) {
  for (HeadKind k : kAllKinds) EXPECT_EQ(ParseHeadKind(HeadKindName(k)), k);
  EXPECT_EQ(ParseHeadKind("lr"), HeadKind::kLogisticRegression);
  EXPECT_EQ(ParseHeadKind("dt"), HeadKind::kDecisionTree);
  EXPECT_EQ(ParseHeadKind("rf"), HeadKind::kRandomForest);
  EXPECT_EQ(ParseHeadKind("brf"), HeadKind::kBalancedRandomForest);
  EXPECT_EQ(ParseHeadKind("nn"), HeadKind::kMlp);
  EXPECT_EQ(CodeOf([] { ParseHeadKind("svm"); }), ErrorCode::kUnsupportedParams);
}

TEST(HeadParamsTest, ConfigRoundTripAndDefaults) {
  const HeadParams d;
  EXPECT_EQ(d.gbt.learning_rate, 0.05);
  EXPECT_EQ(d.gbt.n_estimators, 150);
  EXPECT_EQ(d.gbt.max_depth, 10);
  EXPECT_EQ(d.knn.k_neighbors, 10);
  EXPECT_EQ(d.mlp.hidden_width, 64);
  EXPECT_EQ(d.mlp.epochs, 200);
  EXPECT_EQ(d.mlp.step_size, 0.05);
  HeadParams p = SmallParams();
  p.logistic.l2 = 0.25;
  const HeadParams back = HeadParams::FromConfig(p.ToConfig());
  EXPECT_EQ(back.ToConfig().ToString(), p.ToConfig().ToString());
}

TEST(AllHeadsTest, ProbabilitiesDeterminismAndSerialization) {
  const Matrix x = GaussianMatrix(200, 4, 1);
  const std::vector<int> y = LinearLabels(x, 2);
  const std::vector<double> w(y.size(), 1.0);
  AttributeLabels attrs(1, std::vector<int>(y.size()));
  for (size_t i = 0; i < y.size(); ++i) attrs[0][i] = x(i, 3) > 0;
  const Matrix probe = GaussianMatrix(50, 4, 3);
  for (HeadKind k : kAllKinds) {
    SCOPED_TRACE(std::string(HeadKindName(k)));
    const auto a = TrainHead(k, x, y, w, SmallParams(), 7, &attrs);
    const auto b = TrainHead(k, x, y, w, SmallParams(), 7, &attrs);
    EXPECT_EQ(a->kind(), k);
    EXPECT_EQ(a->input_dim(), 4);
    EXPECT_EQ(Serialize(*a), Serialize(*b));
    const auto p = a->PredictProba(probe);
    for (double v : p) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    std::istringstream in(Serialize(*a));
    const auto back = ReadHead(in);
    EXPECT_EQ(back->PredictProba(probe), p);
    EXPECT_EQ(CodeOf([&] { a->PredictProba(Matrix::Zero(1, 5)); }), ErrorCode::kDimMismatch);
  }
}

TEST(AllHeadsTest, InputChecks) {
  const Matrix x = GaussianMatrix(20, 2, 1);
  const std::vector<int> ones(20, 1);
  const std::vector<double> w(20, 1.0);
  for (HeadKind k : kAllKinds) {
    AttributeLabels attrs(1, std::vector<int>(20, 0));
    attrs[0][0] = 1;
    EXPECT_EQ(CodeOf([&] { TrainHead(k, x, ones, w, SmallParams(), 1, &attrs); }),
              ErrorCode::kSingleClass)
        << HeadKindName(k);
  }
  std::vector<int> y(20, 0);
  y[0] = 1;
  EXPECT_EQ(CodeOf([&] { TrainHead(HeadKind::kAdversarialMlp, x, y, w, SmallParams(), 1); }),
            ErrorCode::kUnsupportedParams);
}

TEST(LogisticTest, SymmetricSeparationGivesHalfAtOrigin) {
  Matrix x(20, 1);
  std::vector<int> y(20);
  for (int i = 0; i < 20; ++i) {
    x(i, 0) = i < 10 ? -1.0 : 1.0;
    y[i] = i < 10 ? 0 : 1;
  }
  const auto m = LogisticRegression::Fit(x, y, std::vector<double>(20, 1.0), {});
  Matrix origin = Matrix::Zero(1, 1);
  EXPECT_NEAR(m.PredictProba(origin)[0], 0.5, 1e-6);
  EXPECT_GT(m.coef()[0], 0.0);
}

TEST(LogisticTest, StationaryPointOfPenalizedObjective) {
  const Matrix x = GaussianMatrix(300, 3, 4);
  const std::vector<int> y = LinearLabels(x, 5);
  std::vector<double> w(y.size());
  for (size_t i = 0; i < w.size(); ++i) w[i] = 0.5 + (i % 3);
  LogisticParams p;
  p.l2 = 2.0;
  const auto m = LogisticRegression::Fit(x, y, w, p);
  const auto prob = m.PredictProba(x);
  Eigen::VectorXd grad = p.l2 * m.coef();
  double g0 = 0;
  for (int i = 0; i < x.rows(); ++i) {
    const double r = w[i] * (prob[i] - y[i]);
    grad += r * x.row(i).transpose();
    g0 += r;
  }
  EXPECT_LT(grad.norm(), 1e-6);
  EXPECT_LT(std::abs(g0), 1e-6);
}

TEST(LogisticTest, DuplicatingRowEqualsDoublingWeight) {
  const Matrix x = GaussianMatrix(60, 2, 6);
  const std::vector<int> y = LinearLabels(x, 7);
  std::vector<double> w(y.size(), 1.0);
  w[3] = 2.0;
  Matrix xd(61, 2);
  xd << x, x.row(3);
  std::vector<int> yd = y;
  yd.push_back(y[3]);
  const auto a = LogisticRegression::Fit(x, y, w, {});
  const auto b = LogisticRegression::Fit(xd, yd, std::vector<double>(61, 1.0), {});
  EXPECT_NEAR((a.coef() - b.coef()).norm(), 0.0, 1e-9);
  EXPECT_NEAR(a.intercept(), b.intercept(), 1e-9);
}

TEST(KnnTest, VoteFraction) {
  Matrix x(3, 2);
  x << 1, 0, 0, 1, -1, 0;
  const auto knn = KnnHead::Fit(x, std::vector<int>{1, 1, 0}, std::vector<double>(3, 1.0),
                                KnnParams{3}, 1);
  EXPECT_NEAR(knn->PredictProba(Matrix::Zero(1, 2))[0], 2.0 / 3.0, 1e-15);
}

TEST(KnnTest, EqualDistancesGoToLowerIndex) {
  Matrix x(3, 1);
  x << 1, -1, 1;
  const auto knn = KnnHead::Fit(x, std::vector<int>{1, 0, 0}, std::vector<double>(3, 1.0),
                                KnnParams{1}, 1);
  EXPECT_EQ(knn->PredictProba(Matrix::Zero(1, 1))[0], 1.0);
}

TEST(CartTest, SeparatesStep) {
  Matrix x(8, 1);
  x << 0, 1, 2, 3, 4, 5, 6, 7;
  const std::vector<int> y = {0, 0, 0, 0, 1, 1, 1, 1};
  const auto dt = DecisionTreeHead::Fit(x, y, std::vector<double>(8, 1.0), TreeParams{}, 1);
  EXPECT_EQ(dt->tree().nodes()[0].threshold, 3.5);
  EXPECT_EQ(dt->PredictProba(x), (std::vector<double>{0, 0, 0, 0, 1, 1, 1, 1}));
  EXPECT_EQ(dt->tree().Depth(), 1);
}

TEST(CartTest, ZeroWeightRowsIgnored) {
  Matrix x(6, 1);
  x << 0, 1, 2, 3, 4, 5;
  const std::vector<int> y = {0, 0, 1, 0, 1, 1};
  const std::vector<double> w = {1, 1, 0, 0, 1, 1};
  const auto dt = DecisionTreeHead::Fit(x, y, w, TreeParams{}, 1);
  EXPECT_EQ(dt->tree().nodes().size(), 3u);
  EXPECT_EQ(dt->tree().nodes()[0].threshold, 2.5);
}

// 95:5 overlapping blobs.
void ImbalancedBlobs(int n, uint64_t seed, Matrix& x, std::vector<int>& y) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  x.resize(n, 2);
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    y[i] = u(gen) < 0.05;
    x(i, 0) = z(gen) + (y[i] ? 1.5 : 0.0);
    x(i, 1) = z(gen) + (y[i] ? 1.5 : 0.0);
  }
}

double MinorityRecall(const HeadModel& m, const Matrix& x, const std::vector<int>& y) {
  const auto p = m.PredictProba(x);
  int tp = 0, pos = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    if (!y[i]) continue;
    ++pos;
    tp += p[i] >= 0.5;
  }
  return static_cast<double>(tp) / pos;
}

TEST(ForestTest, BalancedBootstrapRaisesMinorityRecall) {
  Matrix x, xt;
  std::vector<int> y, yt;
  ImbalancedBlobs(2000, 1, x, y);
  ImbalancedBlobs(4000, 2, xt, yt);
  const std::vector<double> w(y.size(), 1.0);
  HeadParams p;
  p.forest.n_trees = 50;
  const auto rf = TrainHead(HeadKind::kRandomForest, x, y, w, p, 3);
  const auto brf = TrainHead(HeadKind::kBalancedRandomForest, x, y, w, p, 3);
  EXPECT_GT(MinorityRecall(*brf, xt, yt), MinorityRecall(*rf, xt, yt));
}

TEST(ForestTest, ThreadCountDoesNotChangeForest) {
  const Matrix x = GaussianMatrix(300, 3, 8);
  const std::vector<int> y = LinearLabels(x, 9);
  const std::vector<double> w(y.size(), 1.0);
  const auto a = ForestHead::Fit(x, y, w, ForestParams{.n_trees = 12}, false, 5, 1);
  const auto b = ForestHead::Fit(x, y, w, ForestParams{.n_trees = 12}, false, 5, 4);
  EXPECT_EQ(Serialize(*a), Serialize(*b));
}

TEST(MlpTest, DuplicatingRowEqualsDoublingWeight) {
  const Matrix x = GaussianMatrix(40, 3, 10);
  const std::vector<int> y = LinearLabels(x, 11);
  std::vector<double> w(y.size(), 1.0);
  w[7] = 2.0;
  Matrix xd(41, 3);
  xd << x, x.row(7);
  std::vector<int> yd = y;
  yd.push_back(y[7]);
  const MlpParams p{8, 50, 0.1};
  const auto a = TrainMlp(x, y, w, p, 4);
  const auto b = TrainMlp(xd, yd, std::vector<double>(41, 1.0), p, 4);
  const auto pa = a->PredictProba(x);
  const auto pb = b->PredictProba(x);
  for (size_t i = 0; i < pa.size(); ++i) EXPECT_NEAR(pa[i], pb[i], 1e-9);
}

TEST(AdversarialTest, ZeroWeightMatchesPlainMlp) {
  const Matrix x = GaussianMatrix(100, 4, 12);
  const std::vector<int> y = LinearLabels(x, 13);
  const std::vector<double> w(y.size(), 1.0);
  AttributeLabels attrs(2, std::vector<int>(y.size()));
  for (size_t i = 0; i < y.size(); ++i) {
    attrs[0][i] = x(i, 0) > 0;
    attrs[1][i] = i % 3;
  }
  AdversarialParams ap;
  ap.hidden_width = 8;
  ap.epochs = 40;
  ap.adversary_weight = 0.0;
  const auto adv = TrainAdversarialMlp(x, y, w, attrs, ap, 21);
  const auto plain = TrainMlp(x, y, w, MlpParams{8, 40, ap.step_size}, 21);
  const auto pa = adv->PredictProba(x);
  const auto pb = plain->PredictProba(x);
  for (size_t i = 0; i < pa.size(); ++i) EXPECT_NEAR(pa[i], pb[i], 1e-9);
}

TEST(AdversarialTest, SharedLayerGradientMatchesFiniteDifferences) {
  const Matrix x = GaussianMatrix(5, 3, 14);
  const std::vector<int> y = {1, 0, 1, 1, 0};
  const std::vector<double> w = {1.0, 0.5, 2.0, 1.0, 1.5};
  const AttributeLabels attrs = {{0, 1, 1, 0, 1}, {2, 0, 1, 2, 0}};
  const MlpWeights task = InitMlpWeights(3, 4, 3);
  const auto advs = InitAdversaries(4, attrs, 3);
  const double lambda = 0.7;
  const auto g = ComputeAdversarialGradients(task, advs, x, y, w, attrs, lambda);
  const double h = 1e-6;
  auto check = [&](double analytic, const std::function<void(MlpWeights&, double)>& bump) {
    MlpWeights plus = task, minus = task;
    bump(plus, h);
    bump(minus, -h);
    const double numeric = (SharedObjective(plus, advs, x, y, w, attrs, lambda) -
                            SharedObjective(minus, advs, x, y, w, attrs, lambda)) /
                           (2 * h);
    EXPECT_LE(std::abs(analytic - numeric), 1e-4 * std::max(1e-3, std::abs(numeric)))
        << analytic << " vs " << numeric;
  };
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 3; ++c) {
      check(g.task.w1(r, c), [&](MlpWeights& m, double d) { m.w1(r, c) += d; });
    }
    check(g.task.b1(r), [&](MlpWeights& m, double d) { m.b1(r) += d; });
  }
}

TEST(AdversarialTest, ReducesAttributeLeakageInHiddenLayer) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> z(0.0, 1.0);
  const int n = 1200;
  Matrix x(n, 4);
  std::vector<int> y(n), a(n);
  for (int i = 0; i < n; ++i) {
    a[i] = i % 2;
    x(i, 0) = a[i] + 0.3 * z(gen);
    for (int j = 1; j < 4; ++j) x(i, j) = z(gen);
    y[i] = x(i, 1) + 0.5 * x(i, 2) + 0.3 * z(gen) > 0;
  }
  const std::vector<double> w(n, 1.0);
  const AttributeLabels attrs = {a};
  auto leakage = [&](double lambda) {
    AdversarialParams p;
    p.hidden_width = 16;
    p.epochs = 1500;
    p.step_size = 0.5;
    p.adversary_weight = lambda;
    const auto m = TrainAdversarialMlp(x, y, w, attrs, p, 5);
    const Matrix h = m->Hidden(x);
    const Matrix train = h.topRows(n / 2), test = h.bottomRows(n / 2);
    const std::vector<int> ga(a.begin(), a.begin() + n / 2), gb(a.begin() + n / 2, a.end());
    return detect::ProbeAuc(train, ga, test, gb, {});
  };
  const double plain = leakage(0.0);
  const double debiased = leakage(1.0);
  EXPECT_LT(debiased, plain);
}

TEST(AdversarialTest, SingleGroupAttributeRejected) {
  const Matrix x = GaussianMatrix(20, 2, 1);
  std::vector<int> y(20, 0);
  y[0] = 1;
  const AttributeLabels attrs = {std::vector<int>(20, 0)};
  EXPECT_EQ(CodeOf([&] {
              TrainAdversarialMlp(x, y, std::vector<double>(20, 1.0), attrs, {}, 1);
            }),
            ErrorCode::kSingleGroup);
}

TEST(MultiheadTest, OneHeadPerConditionAndK1MatchesTrainHead) {
  const Matrix x = GaussianMatrix(200, 3, 30);
  std::vector<std::vector<int>> labels;
  for (int c = 0; c < 4; ++c) labels.push_back(LinearLabels(x, 40 + c));
  const std::vector<std::string> names = {"cardiomegaly", "lung_opacity", "edema",
                                          "pleural_effusion"};
  const std::vector<double> w(200, 1.0);
  const auto m = TrainMultihead(HeadKind::kGbt, x, labels, names, w, SmallParams(), 9);
  EXPECT_EQ(m.num_conditions(), 4);
  EXPECT_EQ(m.condition_names, names);
  const Matrix p = m.PredictProba(x);
  EXPECT_EQ(p.rows(), 200);
  EXPECT_EQ(p.cols(), 4);

  const auto single = TrainMultihead(HeadKind::kLogisticRegression, x, {labels[2]},
                                     {"edema"}, w, SmallParams(), 9);
  const auto direct = TrainHead(HeadKind::kLogisticRegression, x, labels[2], w,
                                SmallParams(), 9);
  const auto pd = direct->PredictProba(x);
  const Matrix ps = single.PredictProba(x);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(ps(i, 0), pd[i]);
}

TEST(MultiheadTest, AllMissingConditionNamesCondition) {
  const Matrix x = GaussianMatrix(50, 2, 31);
  const std::vector<std::vector<int>> labels = {LinearLabels(x, 1), std::vector<int>(50, -1)};
  try {
    TrainMultihead(HeadKind::kGbt, x, labels, {"edema", "cardiomegaly"},
                   std::vector<double>(50, 1.0), SmallParams(), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingleClass);
    EXPECT_NE(std::string(e.what()).find("cardiomegaly"), std::string::npos);
  }
}

TEST(MultiheadTest, MissingLabelsLeftOut) {
  const Matrix x = GaussianMatrix(100, 2, 32);
  std::vector<int> y = LinearLabels(x, 2);
  std::vector<int> masked = y;
  for (int i = 0; i < 100; i += 3) masked[i] = -1;
  std::vector<int> keep;
  for (int i = 0; i < 100; ++i) {
    if (masked[i] >= 0) keep.push_back(i);
  }
  Matrix xk(keep.size(), 2);
  std::vector<int> yk;
  for (size_t i = 0; i < keep.size(); ++i) {
    xk.row(i) = x.row(keep[i]);
    yk.push_back(y[keep[i]]);
  }
  const auto m = TrainMultihead(HeadKind::kLogisticRegression, x, {masked}, {"edema"},
                                std::vector<double>(100, 1.0), SmallParams(), 1);
  const auto direct = LogisticRegression::Fit(xk, yk, std::vector<double>(yk.size(), 1.0), {});
  EXPECT_EQ(m.PredictProba(x)(0, 0), direct.PredictProba(x.topRows(1))[0]);
}

TEST(MultiheadTest, SaveLoadRoundTrip) {
  const Matrix x = GaussianMatrix(100, 3, 33);
  const auto m = TrainMultihead(HeadKind::kMlp, x, {LinearLabels(x, 3), LinearLabels(x, 4)},
                                {"a", "b"}, std::vector<double>(100, 1.0), SmallParams(), 2);
  std::stringstream ss;
  m.Write(ss);
  const auto back = MultiHeadModel::Read(ss);
  EXPECT_EQ(back.condition_names, m.condition_names);
  EXPECT_EQ(back.PredictProba(x), m.PredictProba(x));
}

TEST(ConditionFilterTest, Examples) {
  EXPECT_TRUE(KeepCondition(0.75, 0.12));
  EXPECT_FALSE(KeepCondition(0.70, 0.30));
  EXPECT_FALSE(KeepCondition(0.90, 0.099));
  EXPECT_EQ(FilterConditions(std::vector<double>{0.75, 0.70, 0.9},
                             std::vector<double>{0.12, 0.3, 0.1}),
            (std::vector<int>{0, 2}));
}

}  // namespace
}  // namespace fairhead::heads
