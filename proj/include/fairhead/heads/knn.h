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

#ifndef FAIRHEAD_HEADS_KNN_H_
#define FAIRHEAD_HEADS_KNN_H_

#include <span>
#include <vector>

#include "fairhead/heads/head.h"

namespace fairhead::heads {

// Stores the training rows and predicts the fraction of positive labels among
// the k nearest (Euclidean) neighbours. Equal distances go to the lower
// training index. Sample weights are not used.
class KnnHead : public HeadModel {
 public:
  KnnHead(Matrix x, std::vector<int> y, int k_neighbors, int threads = 0)
      : x_(std::move(x)), y_(std::move(y)), k_(k_neighbors), threads_(threads) {}

  static std::unique_ptr<KnnHead> Fit(const Matrix& x, std::span<const int> y,
                                      std::span<const double> weights,
                                      const KnnParams& params, int threads);

  HeadKind kind() const override { return HeadKind::kKnn; }
  int input_dim() const override { return static_cast<int>(x_.cols()); }
  std::vector<double> PredictProba(const Matrix& x) const override;
  void WritePayload(std::ostream& out) const override;
  static std::unique_ptr<KnnHead> ReadPayload(std::istream& in);

 private:
  Matrix x_;
  std::vector<int> y_;
  int k_;
  int threads_;
};

}  // namespace fairhead::heads

#endif  // FAIRHEAD_HEADS_KNN_H_
