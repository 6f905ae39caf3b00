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

#ifndef FAIRHEAD_MITIGATE_ACTIVE_LEARNING_H_
#define FAIRHEAD_MITIGATE_ACTIVE_LEARNING_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "fairhead/common/types.h"

namespace fairhead::mitigate {

enum class AcquisitionStrategy : uint8_t { kUncertainty, kDiversity };

std::string_view AcquisitionName(AcquisitionStrategy s);
AcquisitionStrategy ParseAcquisition(std::string_view text);

struct ActiveLearningConfig {
  int initial_pool = 15000;
  int batch_size = 2000;
  int rounds = 10;
  AcquisitionStrategy strategy = AcquisitionStrategy::kUncertainty;

  int FinalSize() const { return initial_pool + rounds * batch_size; }
  // Throws Error(kInfeasibleSchedule).
  void Validate(int pool_size) const;
};

// Model side of the loop. Fit trains on the labeled pool positions; Score
// returns a validation score for the fitted model (NaN if unavailable);
// Uncertainty scores candidate positions in [0, 1], higher is more uncertain.
class ActiveLearner {
 public:
  virtual ~ActiveLearner() = default;
  virtual void Fit(const std::vector<int>& labeled) = 0;
  virtual double Score() = 0;
  virtual std::vector<double> Uncertainty(const std::vector<int>& candidates) = 0;
};

struct ActiveLearningRound {
  int labeled_size = 0;
  double score = 0.0;
  std::vector<int> selected;  // positions added after this round's fit
};

struct ActiveLearningResult {
  std::vector<int> labeled;  // final labeled positions, ascending
  std::vector<ActiveLearningRound> history;  // rounds + 1 entries
};

// Seeded uniform draw of `count` positions out of [0, pool_size), ascending.
std::vector<int> InitialPool(int pool_size, int count, uint64_t seed);

// Runs rounds + 1 fits. After every fit but the last, batch_size positions
// are moved from the unlabeled remainder into the labeled set: the most
// uncertain (ties to the lowest position), or for the diversity strategy the
// greedy farthest-point choice by Euclidean distance in `features` (rows =
// pool positions). The learner is left fitted on the final labeled set.
ActiveLearningResult RunActiveLearning(int pool_size, const ActiveLearningConfig& cfg,
                                       ActiveLearner& learner, uint64_t seed,
                                       const Matrix* features = nullptr);

// Greedy max-min selection of `count` candidates given the labeled rows.
std::vector<int> SelectDiverse(const Matrix& features, const std::vector<int>& labeled,
                               const std::vector<int>& candidates, int count);

// Top `count` candidates by score, ties to the lower position.
std::vector<int> SelectMostUncertain(const std::vector<int>& candidates,
                                     const std::vector<double>& scores, int count);

}  // namespace fairhead::mitigate

#endif  // FAIRHEAD_MITIGATE_ACTIVE_LEARNING_H_
