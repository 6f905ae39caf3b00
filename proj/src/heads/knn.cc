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

#include "fairhead/heads/knn.h"

#include <algorithm>

#include <fmt/format.h>

#include "fairhead/common/binary_io.h"
#include "fairhead/common/error.h"
#include "fairhead/common/parallel.h"

namespace fairhead::heads {

std::unique_ptr<KnnHead> KnnHead::Fit(const Matrix& x, std::span<const int> y,
                                      std::span<const double> weights,
                                      const KnnParams& params, int threads) {
  internal::CheckTrainingInputs(x, y, weights);
  if (params.k_neighbors < 1 || params.k_neighbors > x.rows()) {
    throw Error(ErrorCode::kUnsupportedParams,
                fmt::format("k_neighbors {} outside [1, {}]", params.k_neighbors,
                            x.rows()));
  }
  return std::make_unique<KnnHead>(x, std::vector<int>(y.begin(), y.end()),
                                   params.k_neighbors, threads);
}

std::vector<double> KnnHead::PredictProba(const Matrix& x) const {
  internal::CheckInputDim(x, input_dim());
  std::vector<double> p(static_cast<size_t>(x.rows()));
  ParallelFor(static_cast<size_t>(x.rows()), threads_, [&](size_t q) {
    std::vector<std::pair<double, int>> dist(static_cast<size_t>(x_.rows()));
    const auto query = x.row(static_cast<Eigen::Index>(q));
    for (Eigen::Index r = 0; r < x_.rows(); ++r) {
      dist[r] = {(x_.row(r) - query).squaredNorm(), static_cast<int>(r)};
    }
    std::partial_sort(dist.begin(), dist.begin() + k_, dist.end());
    int positives = 0;
    for (int i = 0; i < k_; ++i) positives += y_[dist[i].second];
    p[q] = static_cast<double>(positives) / k_;
  });
  return p;
}

void KnnHead::WritePayload(std::ostream& out) const {
  BinaryWriter w(out);
  w.WriteU32(static_cast<uint32_t>(k_));
  w.WriteU32(static_cast<uint32_t>(x_.rows()));
  w.WriteU32(static_cast<uint32_t>(x_.cols()));
  for (Eigen::Index r = 0; r < x_.rows(); ++r) {
    for (Eigen::Index c = 0; c < x_.cols(); ++c) w.WriteF64(x_(r, c));
    w.WriteI32(y_[r]);
  }
}

std::unique_ptr<KnnHead> KnnHead::ReadPayload(std::istream& in) {
  BinaryReader r(in);
  const int k = static_cast<int>(r.ReadU32());
  const uint32_t n = r.ReadU32();
  const uint32_t d = r.ReadU32();
  Matrix x(n, d);
  std::vector<int> y(n);
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t c = 0; c < d; ++c) x(i, c) = r.ReadF64();
    y[i] = r.ReadI32();
  }
  return std::make_unique<KnnHead>(std::move(x), std::move(y), k);
}

}  // namespace fairhead::heads
