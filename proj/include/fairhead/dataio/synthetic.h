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

#ifndef FAIRHEAD_DATAIO_SYNTHETIC_H_
#define FAIRHEAD_DATAIO_SYNTHETIC_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairhead/common/kv_config.h"
#include "fairhead/dataio/embeddings.h"
#include "fairhead/dataio/samples.h"

namespace fairhead::dataio {

// Logistic label oracle for one condition: P(y=1|x) = sigmoid(w.x + b).
struct ConditionOracle {
  std::string name;
  std::vector<double> weights;  // dim entries
  double bias = 0.0;
};

// Demographic information written into one embedding dimension. Each group
// gets strength * code added, with codes female +1/2, male -1/2; young -1/2,
// old +1/2; white -1/2, asian 0, black +1/2, other 0. `strength` is therefore
// the mean separation between the two extreme groups.
struct DemographicSignal {
  int dim = 0;
  double strength = 0.0;
};

// Generative parameters of the synthetic benchmark, including the injected
// subgroup degradation. Serves as the ground truth for bias detection tests.
struct OracleSpec {
  int dim = 32;
  std::vector<ConditionOracle> conditions;
  std::array<std::optional<DemographicSignal>, 3> signals;  // by Axis
  Axis degraded_axis = Axis::kRace;
  int degraded_group = static_cast<int>(Race::kBlack);
  double label_noise_rate = 0.0;
  double missing_rate = 0.0;
  std::array<double, 2> sex_proportions = {0.42, 0.58};      // female, male
  std::array<double, 2> age_proportions = {0.629, 0.371};    // young, old
  std::array<double, 4> race_proportions = {0.782, 0.147, 0.071, 0.0};
  std::array<double, 3> split_proportions = {0.6, 0.1, 0.3};  // train/val/test

  // Four default conditions, each driven by three informative dimensions,
  // with no demographic signal and no degradation. Requires dim >= 10.
  static OracleSpec Default(int dim = 32);

  // Throws Error(kInvalidSpec).
  void Validate() const;

  KvConfig ToConfig() const;
  static OracleSpec FromConfig(const KvConfig& config);
};

struct SyntheticDataset {
  EmbeddingMatrix embeddings;
  SampleTable samples;
  OracleSpec spec;
};

// Draws n samples. Features are standard normal; labels come from the
// logistic oracle on the raw features; labels of the degraded group are then
// flipped with probability label_noise_rate (in every split); finally the
// demographic signals are added to their dimensions. Every random draw is
// made unconditionally, so two specs that differ only in label_noise_rate
// produce identical features and clean labels for the same seed.
SyntheticDataset GenerateSynthetic(const OracleSpec& spec, int n, uint64_t seed);

}  // namespace fairhead::dataio

#endif  // FAIRHEAD_DATAIO_SYNTHETIC_H_
