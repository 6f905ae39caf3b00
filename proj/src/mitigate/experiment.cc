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

#include "fairhead/mitigate/experiment.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fairhead/common/error.h"
#include "fairhead/common/parallel.h"
#include "fairhead/common/random.h"
#include "fairhead/linalg/pca.h"
#include "fairhead/mitigate/strategies.h"

namespace fairhead::mitigate {
namespace {

using dataio::Axis;

constexpr std::array<std::string_view, 4> kStrategyNames = {
    "reweight", "augment", "active_learning", "adversarial"};

constexpr uint64_t kInitialPoolStream = 11;
constexpr uint64_t kAugmentStream = 100;

std::string GroupName(Axis axis, int group) {
  const auto& names = dataio::AxisGroupNames(axis);
  if (group >= 0 && group < static_cast<int>(names.size())) return names[group];
  if (axis == Axis::kRace && group == static_cast<int>(dataio::Race::kOther)) {
    return "other";
  }
  return fmt::format("{}", group);
}

Matrix SelectMatrixRows(const Matrix& x, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  return out;
}

template <typename T>
std::vector<T> Gather(const std::vector<T>& values, const std::vector<int>& rows) {
  std::vector<T> out(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) out[i] = values[rows[i]];
  return out;
}

// Trains the multi-head model on the given sample rows with the configured
// reweighting, augmentation and trainer.
heads::MultiHeadModel TrainOnRows(const Matrix& reduced, const dataio::SampleTable& samples,
                                  const std::vector<int>& rows,
                                  const ExperimentConfig& cfg, uint64_t seed) {
  const Matrix x = SelectMatrixRows(reduced, rows);
  const size_t n = rows.size();
  std::vector<double> weights(n, 1.0);
  if (cfg.Has(Strategy::kReweight)) {
    weights = BalanceWeights(Gather(samples.AllGroups(cfg.reweight_axis), rows));
  }
  heads::HeadKind kind = cfg.head;
  heads::HeadParams params = cfg.params;
  params.threads = cfg.threads;
  std::optional<heads::AttributeLabels> attributes;
  if (cfg.Has(Strategy::kAdversarial)) {
    kind = heads::HeadKind::kAdversarialMlp;
    params.adversarial.hidden_width = params.mlp.hidden_width;
    params.adversarial.epochs = params.mlp.epochs;
    params.adversarial.step_size = params.mlp.step_size;
    attributes.emplace();
    for (Axis axis : dataio::kAllAxes) {
      attributes->push_back(Gather(samples.AllGroups(axis), rows));
    }
  }
  const auto& conditions = samples.conditions();
  std::vector<std::vector<int>> labels(conditions.size());
  for (size_t c = 0; c < conditions.size(); ++c) {
    labels[c] = samples.Labels(static_cast<int>(c), rows);
  }
  if (!cfg.Has(Strategy::kAugment)) {
    return heads::TrainMultihead(kind, x, labels, conditions, weights, params, seed,
                                 attributes ? &*attributes : nullptr);
  }

  const std::vector<int> augment_groups = Gather(samples.AllGroups(cfg.augment_axis), rows);
  heads::MultiHeadModel model;
  model.condition_names = conditions;
  for (size_t c = 0; c < conditions.size(); ++c) {
    try {
      std::vector<int> keep;
      for (size_t i = 0; i < n; ++i) {
        if (labels[c][i] != dataio::kMissingLabel) keep.push_back(static_cast<int>(i));
      }
      const Matrix xc = SelectMatrixRows(x, keep);
      const std::vector<int> yc = Gather(labels[c], keep);
      const std::vector<int> gc = Gather(augment_groups, keep);
      const int target_count = static_cast<int>(
          std::count(gc.begin(), gc.end(), cfg.augment_group));
      const int n_new = static_cast<int>(std::lround(cfg.augment_ratio * target_count));
      const AugmentedData aug = AugmentSubgroup(
          xc, yc, gc, cfg.augment_group, n_new, Rng::Derive(seed, kAugmentStream + c));
      std::vector<double> wc(aug.source.size());
      for (size_t i = 0; i < wc.size(); ++i) wc[i] = weights[keep[aug.source[i]]];
      heads::AttributeLabels ac;
      if (attributes) {
        for (const auto& column : *attributes) {
          std::vector<int> a(aug.source.size());
          for (size_t i = 0; i < a.size(); ++i) a[i] = column[keep[aug.source[i]]];
          ac.push_back(std::move(a));
        }
      }
      model.heads.push_back(heads::TrainHead(kind, aug.x, aug.y, wc, params, seed + c,
                                             attributes ? &ac : nullptr));
    } catch (const Error& e) {
      RethrowWithContext(e, fmt::format("condition '{}'", conditions[c]));
    }
  }
  return model;
}

detect::FairnessReport ReportOn(const heads::MultiHeadModel& model, const Matrix& reduced,
                                const dataio::SampleTable& samples,
                                const std::vector<int>& rows) {
  const Matrix probs = model.PredictProba(SelectMatrixRows(reduced, rows));
  std::vector<int> index(samples.conditions().size());
  for (size_t c = 0; c < index.size(); ++c) index[c] = static_cast<int>(c);
  return detect::BuildBiasReport(probs, samples.Select(rows), index);
}

class MultiHeadLearner : public ActiveLearner {
 public:
  MultiHeadLearner(const Matrix& reduced, const dataio::SampleTable& samples,
                   const std::vector<int>& pool_rows, const std::vector<int>& val_rows,
                   const ExperimentConfig& cfg, uint64_t seed)
      : reduced_(reduced), samples_(samples), pool_rows_(pool_rows),
        val_rows_(val_rows), cfg_(cfg), seed_(seed) {}

  void Fit(const std::vector<int>& labeled) override {
    model_ = TrainOnRows(reduced_, samples_, Gather(pool_rows_, labeled), cfg_, seed_);
  }

  double Score() override {
    if (val_rows_.empty()) return std::numeric_limits<double>::quiet_NaN();
    try {
      return ReportOn(model_, reduced_, samples_, val_rows_).composite;
    } catch (const Error& e) {
      spdlog::warn("validation score unavailable: {}", e.what());
      return std::numeric_limits<double>::quiet_NaN();
    }
  }

  std::vector<double> Uncertainty(const std::vector<int>& candidates) override {
    const Matrix x = SelectMatrixRows(reduced_, Gather(pool_rows_, candidates));
    return UncertaintyScores(model_.PredictProba(x));
  }

  heads::MultiHeadModel& model() { return model_; }

 private:
  const Matrix& reduced_;
  const dataio::SampleTable& samples_;
  const std::vector<int>& pool_rows_;
  const std::vector<int>& val_rows_;
  const ExperimentConfig& cfg_;
  uint64_t seed_;
  heads::MultiHeadModel model_;
};

}  // namespace

std::string_view StrategyName(Strategy s) { return kStrategyNames[static_cast<size_t>(s)]; }

std::vector<Strategy> ParseStrategies(std::string_view text) {
  std::vector<Strategy> out;
  for (const std::string& raw : SplitString(text, ',')) {
    const std::string_view token = Trim(raw);
    if (token.empty() || token == "none") continue;
    bool found = false;
    for (size_t i = 0; i < kStrategyNames.size(); ++i) {
      if (token == kStrategyNames[i]) {
        out.push_back(static_cast<Strategy>(i));
        found = true;
      }
    }
    if (!found) {
      throw Error(ErrorCode::kInvalidSpec,
                  fmt::format("unknown strategy '{}' (expected reweight, augment, "
                              "active_learning, adversarial)",
                              token));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string FormatStrategies(const std::vector<Strategy>& strategies) {
  if (strategies.empty()) return "none";
  std::string out;
  for (Strategy s : strategies) {
    if (!out.empty()) out += ",";
    out += StrategyName(s);
  }
  return out;
}

bool ExperimentConfig::Has(Strategy s) const {
  return std::find(strategies.begin(), strategies.end(), s) != strategies.end();
}

void ExperimentConfig::Validate() const {
  if (n_repeats < 1) throw Error(ErrorCode::kInvalidSpec, "repeats must be >= 1");
  if (!(variance_target > 0.0 && variance_target <= 1.0)) {
    throw Error(ErrorCode::kInvalidSpec, "variance target outside (0, 1]");
  }
  if (Has(Strategy::kAdversarial) && head != heads::HeadKind::kMlp) {
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("adversarial mitigation needs the mlp head, not {}",
                            heads::HeadKindName(head)));
  }
  if (!(augment_ratio >= 0.0)) throw Error(ErrorCode::kInvalidSpec, "augment ratio < 0");
}

KvConfig ExperimentConfig::ToConfig() const {
  KvConfig c = params.ToConfig();
  c.Set("head", std::string(heads::HeadKindName(head)));
  c.Set("strategies", FormatStrategies(strategies));
  c.Set("repeats", std::to_string(n_repeats));
  c.Set("seed", std::to_string(seed));
  c.Set("vary_seed", vary_seed ? "true" : "false");
  c.Set("variance_target", FormatDouble(variance_target));
  c.Set("reweight_axis", std::string(dataio::AxisName(reweight_axis)));
  c.Set("augment_target", fmt::format("{}:{}", dataio::AxisName(augment_axis),
                                      GroupName(augment_axis, augment_group)));
  c.Set("augment_ratio", FormatDouble(augment_ratio));
  c.Set("al.initial_pool", std::to_string(active_learning.initial_pool));
  c.Set("al.batch_size", std::to_string(active_learning.batch_size));
  c.Set("al.rounds", std::to_string(active_learning.rounds));
  c.Set("al.strategy", std::string(AcquisitionName(active_learning.strategy)));
  return c;
}

ExperimentConfig ExperimentConfig::FromConfig(const KvConfig& c) {
  ExperimentConfig cfg;
  cfg.params = heads::HeadParams::FromConfig(c);
  cfg.head = heads::ParseHeadKind(c.GetString("head", heads::HeadKindName(cfg.head)));
  cfg.strategies = ParseStrategies(c.GetString("strategies", "none"));
  cfg.n_repeats = static_cast<int>(c.GetInt("repeats", cfg.n_repeats));
  cfg.seed = static_cast<uint64_t>(c.GetInt("seed", static_cast<int64_t>(cfg.seed)));
  cfg.vary_seed = c.GetBool("vary_seed", cfg.vary_seed);
  cfg.variance_target = c.GetDouble("variance_target", cfg.variance_target);
  cfg.reweight_axis = dataio::ParseAxis(c.GetString("reweight_axis", "race"));
  if (const auto target = c.Get("augment_target")) {
    const std::vector<std::string> parts = SplitString(*target, ':');
    if (parts.size() != 2) {
      throw Error(ErrorCode::kInvalidSpec,
                  fmt::format("augment_target '{}' is not axis:group", *target));
    }
    cfg.augment_axis = dataio::ParseAxis(Trim(parts[0]));
    cfg.augment_group = dataio::AxisGroupIndex(cfg.augment_axis, Trim(parts[1]));
    if (cfg.augment_group < 0) {
      throw Error(ErrorCode::kInvalidSpec,
                  fmt::format("unknown group '{}' on axis {}", parts[1], parts[0]));
    }
  }
  cfg.augment_ratio = c.GetDouble("augment_ratio", cfg.augment_ratio);
  auto& al = cfg.active_learning;
  al.initial_pool = static_cast<int>(c.GetInt("al.initial_pool", al.initial_pool));
  al.batch_size = static_cast<int>(c.GetInt("al.batch_size", al.batch_size));
  al.rounds = static_cast<int>(c.GetInt("al.rounds", al.rounds));
  al.strategy = ParseAcquisition(c.GetString("al.strategy", AcquisitionName(al.strategy)));
  cfg.Validate();
  return cfg;
}

const metrics::RunAggregate* RunResult::Aggregate(std::string_view name) const {
  for (const auto& [key, value] : aggregates) {
    if (key == name) return &value;
  }
  return nullptr;
}

const std::vector<double>* RunResult::Values(std::string_view name) const {
  for (const auto& [key, value] : values) {
    if (key == name) return &value;
  }
  return nullptr;
}

std::vector<std::pair<std::string, double>> ReportMetrics(
    const detect::FairnessReport& report) {
  std::vector<std::pair<std::string, double>> out;
  out.emplace_back("auprc.mean", report.mean_auprc);
  for (Axis axis : dataio::kAllAxes) {
    out.emplace_back(fmt::format("delta.{}", dataio::AxisName(axis)),
                     report.MeanDelta(axis));
  }
  out.emplace_back("composite", report.composite);
  for (const auto& c : report.conditions) {
    out.emplace_back(fmt::format("auprc.{}", c.condition), c.auprc);
  }
  for (const auto& c : report.conditions) {
    for (size_t a = 0; a < c.axes.size(); ++a) {
      out.emplace_back(fmt::format("delta.{}.{}", c.axes[a].axis, c.condition),
                       c.axes[a].delta);
    }
  }
  return out;
}

RepeatResult RunRepeat(const Matrix& embeddings, const dataio::SampleTable& samples,
                       const ExperimentConfig& cfg, uint64_t seed,
                       heads::MultiHeadModel* model_out) {
  cfg.Validate();
  if (static_cast<size_t>(embeddings.rows()) != samples.size()) {
    throw Error(ErrorCode::kIdMismatch, "embeddings and samples differ in length");
  }
  const std::vector<int> train = samples.SplitIndices(dataio::Split::kTrain);
  const std::vector<int> val = samples.SplitIndices(dataio::Split::kVal);
  const std::vector<int> test = samples.SplitIndices(dataio::Split::kTest);
  if (test.empty()) throw Error(ErrorCode::kInvalidSpec, "test split is empty");

  RepeatResult result;
  result.seed = seed;
  const bool active = cfg.Has(Strategy::kActiveLearning);
  std::vector<int> pca_rows = train;
  if (active) {
    cfg.active_learning.Validate(static_cast<int>(train.size()));
    pca_rows = Gather(train, InitialPool(static_cast<int>(train.size()),
                                         cfg.active_learning.initial_pool,
                                         Rng::Derive(seed, kInitialPoolStream)));
  }
  auto pca = std::make_shared<linalg::PcaModel>(
      linalg::FitPca(SelectMatrixRows(embeddings, pca_rows), cfg.variance_target));
  result.pca_components = pca->k();
  const Matrix reduced = pca->Transform(embeddings);

  heads::MultiHeadModel model;
  if (active) {
    MultiHeadLearner learner(reduced, samples, train, val, cfg, seed);
    Matrix pool_features;
    if (cfg.active_learning.strategy == AcquisitionStrategy::kDiversity) {
      pool_features = SelectMatrixRows(reduced, train);
    }
    ActiveLearningResult al =
        RunActiveLearning(static_cast<int>(train.size()), cfg.active_learning, learner,
                          Rng::Derive(seed, kInitialPoolStream), &pool_features);
    result.history = std::move(al.history);
    result.train_size = static_cast<int>(al.labeled.size());
    model = std::move(learner.model());
  } else {
    model = TrainOnRows(reduced, samples, train, cfg, seed);
    result.train_size = static_cast<int>(train.size());
  }
  model.pca = pca;
  if (!val.empty()) {
    try {
      result.val_report = ReportOn(model, reduced, samples, val);
    } catch (const Error& e) {
      spdlog::warn("validation report unavailable: {}", e.what());
    }
  }
  result.test_report = ReportOn(model, reduced, samples, test);
  if (model_out) *model_out = std::move(model);
  return result;
}

RunResult RunExperiment(const Matrix& embeddings, const dataio::SampleTable& samples,
                        const ExperimentConfig& cfg) {
  cfg.Validate();
  RunResult result;
  result.repeats.resize(cfg.n_repeats);
  ParallelFor(static_cast<size_t>(cfg.n_repeats), cfg.threads, [&](size_t i) {
    const uint64_t seed = cfg.vary_seed ? cfg.seed + i : cfg.seed;
    try {
      result.repeats[i] = RunRepeat(embeddings, samples, cfg, seed);
    } catch (const Error& e) {
      RethrowWithContext(e, fmt::format("repeat {}", i));
    }
  });
  for (size_t i = 0; i < result.repeats.size(); ++i) {
    const auto metrics = ReportMetrics(result.repeats[i].test_report);
    if (i == 0) {
      for (const auto& [name, value] : metrics) result.values.emplace_back(name, std::vector<double>{});
    }
    for (size_t m = 0; m < metrics.size(); ++m) result.values[m].second.push_back(metrics[m].second);
  }
  if (cfg.n_repeats >= 2) {
    for (const auto& [name, values] : result.values) {
      result.aggregates.emplace_back(name, metrics::AggregateRuns(values));
    }
  }
  return result;
}

TuneResult TuneHyperparams(int num_candidates, const std::function<double(int)>& score) {
  if (num_candidates < 1) throw Error(ErrorCode::kInvalidSpec, "empty tuning grid");
  TuneResult result;
  result.scores.assign(num_candidates, std::numeric_limits<double>::quiet_NaN());
  std::optional<Error> last_error;
  for (int i = 0; i < num_candidates; ++i) {
    try {
      result.scores[i] = score(i);
    } catch (const Error& e) {
      spdlog::warn("tuning candidate {} failed: {}", i, e.what());
      last_error = e;
      continue;
    }
    if (std::isnan(result.scores[i])) continue;
    if (result.best_index < 0 || result.scores[i] > result.scores[result.best_index]) {
      result.best_index = i;
    }
  }
  if (result.best_index < 0) {
    if (last_error) RethrowWithContext(*last_error, "every tuning candidate failed");
    throw Error(ErrorCode::kInvalidSpec, "no tuning candidate produced a score");
  }
  return result;
}

TuneResult TuneHeadParams(const Matrix& embeddings, const dataio::SampleTable& samples,
                          const ExperimentConfig& base,
                          const std::vector<KvConfig>& grid) {
  return TuneHyperparams(static_cast<int>(grid.size()), [&](int i) {
    ExperimentConfig cfg = base;
    KvConfig merged = base.params.ToConfig();
    merged.Merge(grid[i]);
    cfg.params = heads::HeadParams::FromConfig(merged);
    const RepeatResult r = RunRepeat(embeddings, samples, cfg, base.seed);
    if (r.val_report.conditions.empty()) {
      throw Error(ErrorCode::kInvalidSpec, "validation split gave no report");
    }
    return r.val_report.composite;
  });
}

}  // namespace fairhead::mitigate
