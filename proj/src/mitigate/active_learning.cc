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

#include "fairhead/mitigate/active_learning.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "fairhead/common/error.h"
#include "fairhead/common/random.h"

namespace fairhead::mitigate {

std::string_view AcquisitionName(AcquisitionStrategy s) {
  return s == AcquisitionStrategy::kDiversity ? "diversity" : "uncertainty";
}

AcquisitionStrategy ParseAcquisition(std::string_view text) {
  if (text == "uncertainty") return AcquisitionStrategy::kUncertainty;
  if (text == "diversity") return AcquisitionStrategy::kDiversity;
  throw Error(ErrorCode::kInvalidSpec,
              fmt::format("unknown acquisition strategy '{}'", text));
}

void ActiveLearningConfig::Validate(int pool_size) const {
  if (initial_pool < 1 || batch_size < 0 || rounds < 0 ||
      (rounds > 0 && batch_size < 1)) {
    throw Error(ErrorCode::kInfeasibleSchedule,
                fmt::format("initial_pool {}, batch_size {}, rounds {}", initial_pool,
                            batch_size, rounds));
  }
  if (static_cast<int64_t>(initial_pool) +
          static_cast<int64_t>(rounds) * batch_size >
      pool_size) {
    throw Error(ErrorCode::kInfeasibleSchedule,
                fmt::format("schedule needs {} samples but the pool has {}",
                            static_cast<int64_t>(initial_pool) +
                                static_cast<int64_t>(rounds) * batch_size,
                            pool_size));
  }
}

std::vector<int> InitialPool(int pool_size, int count, uint64_t seed) {
  std::vector<int> positions(pool_size);
  std::iota(positions.begin(), positions.end(), 0);
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(rng.UniformInt(pool_size - i));
    std::swap(positions[i], positions[j]);
  }
  positions.resize(count);
  std::sort(positions.begin(), positions.end());
  return positions;
}

std::vector<int> SelectMostUncertain(const std::vector<int>& candidates,
                                     const std::vector<double>& scores, int count) {
  if (scores.size() != candidates.size()) {
    throw Error(ErrorCode::kDimMismatch, "one uncertainty score per candidate expected");
  }
  std::vector<int> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  const size_t take = std::min<size_t>(count, order.size());
  std::partial_sort(order.begin(), order.begin() + take, order.end(), [&](int a, int b) {
    return scores[a] > scores[b] ||
           (scores[a] == scores[b] && candidates[a] < candidates[b]);
  });
  std::vector<int> picked;
  for (size_t i = 0; i < take; ++i) picked.push_back(candidates[order[i]]);
  return picked;
}

std::vector<int> SelectDiverse(const Matrix& features, const std::vector<int>& labeled,
                               const std::vector<int>& candidates, int count) {
  const size_t m = candidates.size();
  std::vector<double> min_dist(m, std::numeric_limits<double>::infinity());
  const auto update = [&](int row) {
    const auto ref = features.row(row);
    for (size_t c = 0; c < m; ++c) {
      const double d = (features.row(candidates[c]) - ref).squaredNorm();
      if (d < min_dist[c]) min_dist[c] = d;
    }
  };
  for (int row : labeled) update(row);
  std::vector<char> taken(m, 0);
  std::vector<int> picked;
  for (int k = 0; k < count && static_cast<size_t>(k) < m; ++k) {
    size_t best = m;
    for (size_t c = 0; c < m; ++c) {
      if (taken[c]) continue;
      if (best == m || min_dist[c] > min_dist[best]) best = c;
    }
    taken[best] = 1;
    picked.push_back(candidates[best]);
    update(candidates[best]);
  }
  return picked;
}

ActiveLearningResult RunActiveLearning(int pool_size, const ActiveLearningConfig& cfg,
                                       ActiveLearner& learner, uint64_t seed,
                                       const Matrix* features) {
  cfg.Validate(pool_size);
  if (cfg.strategy == AcquisitionStrategy::kDiversity &&
      (features == nullptr || features->rows() != pool_size)) {
    throw Error(ErrorCode::kInvalidSpec,
                "diversity sampling needs one feature row per pool sample");
  }
  ActiveLearningResult result;
  result.labeled = InitialPool(pool_size, cfg.initial_pool, seed);
  std::vector<char> is_labeled(pool_size, 0);
  for (int p : result.labeled) is_labeled[p] = 1;

  for (int round = 0; round <= cfg.rounds; ++round) {
    learner.Fit(result.labeled);
    ActiveLearningRound entry;
    entry.labeled_size = static_cast<int>(result.labeled.size());
    entry.score = learner.Score();
    if (round < cfg.rounds) {
      std::vector<int> candidates;
      candidates.reserve(pool_size - result.labeled.size());
      for (int p = 0; p < pool_size; ++p) {
        if (!is_labeled[p]) candidates.push_back(p);
      }
      if (cfg.strategy == AcquisitionStrategy::kUncertainty) {
        entry.selected = SelectMostUncertain(candidates, learner.Uncertainty(candidates),
                                             cfg.batch_size);
      } else {
        entry.selected = SelectDiverse(*features, result.labeled, candidates,
                                       cfg.batch_size);
      }
      for (int p : entry.selected) is_labeled[p] = 1;
      result.labeled.insert(result.labeled.end(), entry.selected.begin(),
                            entry.selected.end());
      std::sort(result.labeled.begin(), result.labeled.end());
    }
    result.history.push_back(std::move(entry));
  }
  return result;
}

}  // namespace fairhead::mitigate
