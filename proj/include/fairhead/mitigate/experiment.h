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

#ifndef FAIRHEAD_MITIGATE_EXPERIMENT_H_
#define FAIRHEAD_MITIGATE_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairhead/common/kv_config.h"
#include "fairhead/common/types.h"
#include "fairhead/dataio/samples.h"
#include "fairhead/detect/detect.h"
#include "fairhead/heads/head.h"
#include "fairhead/heads/multihead.h"
#include "fairhead/metrics/metrics.h"
#include "fairhead/mitigate/active_learning.h"

namespace fairhead::mitigate {

// Applied in this order: reweight, augment, active learning, then training.
// Adversarial replaces the trainer and needs an mlp head.
enum class Strategy : uint8_t { kReweight, kAugment, kActiveLearning, kAdversarial };

std::string_view StrategyName(Strategy s);
// Comma-separated list; "" and "none" mean no mitigation. Throws
// Error(kInvalidSpec).
std::vector<Strategy> ParseStrategies(std::string_view text);
std::string FormatStrategies(const std::vector<Strategy>& strategies);

struct ExperimentConfig {
  heads::HeadKind head = heads::HeadKind::kGbt;
  heads::HeadParams params;
  std::vector<Strategy> strategies;  // sorted, unique
  int n_repeats = metrics::kDefaultRepeats;
  uint64_t seed = 42;
  // Repeat i uses seed + i; when false every repeat uses `seed`.
  bool vary_seed = true;
  double variance_target = 0.95;
  dataio::Axis reweight_axis = dataio::Axis::kRace;
  dataio::Axis augment_axis = dataio::Axis::kRace;
  int augment_group = static_cast<int>(dataio::Race::kBlack);
  // New rows per condition as a multiple of the target group's labeled rows.
  double augment_ratio = 1.0;
  ActiveLearningConfig active_learning;
  int threads = 0;  // never affects results

  bool Has(Strategy s) const;
  // Throws Error(kInvalidSpec).
  void Validate() const;
  // Every result-relevant setting (threads excluded).
  KvConfig ToConfig() const;
  static ExperimentConfig FromConfig(const KvConfig& config);
};

struct RepeatResult {
  uint64_t seed = 0;
  int pca_components = 0;
  int train_size = 0;  // labeled training rows before augmentation
  detect::FairnessReport val_report;
  detect::FairnessReport test_report;
  std::vector<ActiveLearningRound> history;
};

struct RunResult {
  std::vector<RepeatResult> repeats;
  // Metric name -> per-repeat values, in a fixed order.
  std::vector<std::pair<std::string, std::vector<double>>> values;
  // Present when n_repeats >= 2.
  std::vector<std::pair<std::string, metrics::RunAggregate>> aggregates;

  const metrics::RunAggregate* Aggregate(std::string_view name) const;
  const std::vector<double>* Values(std::string_view name) const;
};

// Metrics recorded per repeat: auprc.mean, delta.<axis>, composite,
// auprc.<condition>, delta.<axis>.<condition>.
std::vector<std::pair<std::string, double>> ReportMetrics(
    const detect::FairnessReport& report);

// One pipeline run. PCA is fitted on the training split (on the initial
// labeled pool under active learning) and frozen. If `model_out` is given it
// receives the final model.
RepeatResult RunRepeat(const Matrix& embeddings, const dataio::SampleTable& samples,
                       const ExperimentConfig& cfg, uint64_t seed,
                       heads::MultiHeadModel* model_out = nullptr);

// n_repeats runs (in parallel), errors tagged with the repeat index.
RunResult RunExperiment(const Matrix& embeddings, const dataio::SampleTable& samples,
                        const ExperimentConfig& cfg);

struct TuneResult {
  int best_index = -1;
  std::vector<double> scores;  // NaN for failed candidates
};

// Argmax of score(i) over candidates, earliest on ties. Candidates whose
// evaluation throws are skipped with a warning; throws only if all fail.
TuneResult TuneHyperparams(int num_candidates, const std::function<double(int)>& score);

// Each grid entry overrides head parameters (keys as in HeadParams) of
// `base`; candidates are scored by the validation composite of one run with
// the base seed.
TuneResult TuneHeadParams(const Matrix& embeddings, const dataio::SampleTable& samples,
                          const ExperimentConfig& base,
                          const std::vector<KvConfig>& grid);

}  // namespace fairhead::mitigate

#endif  // FAIRHEAD_MITIGATE_EXPERIMENT_H_
