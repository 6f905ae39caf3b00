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

#include "fairhead/linalg/pca.h"

#include <cmath>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "fairhead/common/binary_io.h"
#include "fairhead/common/error.h"

namespace fairhead::linalg {
namespace {

// Cumulative sums can land a hair under 1.0 for target 1.
constexpr double kCumulativeSlack = 1e-12;

struct Decomposition {
  Vector mean;
  Matrix directions;  // rank x dim
  std::vector<double> ratios;
};

Decomposition Decompose(const Matrix& x) {
  if (x.rows() < 2) {
    throw Error(ErrorCode::kDegenerateData,
                fmt::format("PCA needs at least 2 rows, got {}", x.rows()));
  }
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (!std::isfinite(x(r, c))) {
        throw Error(ErrorCode::kNonFiniteValue,
                    fmt::format("row {}, col {}", r, c));
      }
    }
  }
  Decomposition d;
  d.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - d.mean.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double total = s.squaredNorm();
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kDegenerateData, "zero total variance");
  }
  const Eigen::Index rank = s.size();
  d.directions.resize(rank, x.cols());
  d.ratios.resize(rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    Vector v = svd.matrixV().col(i);
    Eigen::Index argmax = 0;
    for (Eigen::Index j = 1; j < v.size(); ++j) {
      if (std::abs(v(j)) > std::abs(v(argmax))) argmax = j;
    }
    if (v(argmax) < 0.0) v = -v;
    d.directions.row(i) = v.transpose();
    d.ratios[i] = s(i) * s(i) / total;
  }
  return d;
}

PcaModel Truncate(Decomposition d, int k) {
  PcaModel model;
  model.mean = std::move(d.mean);
  model.components = d.directions.topRows(k);
  model.explained_variance_ratio.assign(d.ratios.begin(), d.ratios.begin() + k);
  model.full_variance_ratio = std::move(d.ratios);
  return model;
}

}  // namespace

int ComponentsForVariance(std::span<const double> ratios, double target) {
  double cumulative = 0.0;
  for (size_t i = 0; i < ratios.size(); ++i) {
    cumulative += ratios[i];
    if (cumulative >= target - kCumulativeSlack) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(ratios.size());
}

PcaModel FitPca(const Matrix& x, double variance_target) {
  if (!(variance_target > 0.0 && variance_target <= 1.0)) {
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("variance target {} outside (0, 1]", variance_target));
  }
  Decomposition d = Decompose(x);
  const int k = ComponentsForVariance(d.ratios, variance_target);
  return Truncate(std::move(d), k);
}

PcaModel FitPcaComponents(const Matrix& x, int k) {
  Decomposition d = Decompose(x);
  if (k < 1 || k > static_cast<int>(d.ratios.size())) {
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("cannot keep {} of {} components", k, d.ratios.size()));
  }
  return Truncate(std::move(d), k);
}

Matrix PcaModel::Transform(const Matrix& x) const {
  if (x.cols() != mean.size()) {
    throw Error(ErrorCode::kDimMismatch,
                fmt::format("input has {} columns, PCA expects {}", x.cols(),
                            mean.size()));
  }
  return (x.rowwise() - mean.transpose()) * components.transpose();
}

Matrix PcaModel::Reconstruct(const Matrix& reduced) const {
  if (reduced.cols() != components.rows()) {
    throw Error(ErrorCode::kDimMismatch,
                fmt::format("reduced input has {} columns, PCA has {} components",
                            reduced.cols(), components.rows()));
  }
  return (reduced * components).rowwise() + mean.transpose();
}

void PcaModel::Write(std::ostream& out) const {
  BinaryWriter w(out);
  w.WriteMagic(kPcaMagic);
  w.WriteU32(static_cast<uint32_t>(dim()));
  w.WriteU32(static_cast<uint32_t>(k()));
  for (int j = 0; j < dim(); ++j) w.WriteF64(mean(j));
  for (int i = 0; i < k(); ++i) {
    for (int j = 0; j < dim(); ++j) w.WriteF64(components(i, j));
  }
  w.WriteF64Array(explained_variance_ratio);
  w.WriteF64Array(full_variance_ratio);
}

PcaModel PcaModel::Read(std::istream& in) {
  BinaryReader r(in);
  r.ExpectMagic(kPcaMagic);
  const uint32_t dim = r.ReadU32();
  const uint32_t k = r.ReadU32();
  PcaModel model;
  model.mean.resize(dim);
  for (uint32_t j = 0; j < dim; ++j) model.mean(j) = r.ReadF64();
  model.components.resize(k, dim);
  for (uint32_t i = 0; i < k; ++i) {
    for (uint32_t j = 0; j < dim; ++j) model.components(i, j) = r.ReadF64();
  }
  model.explained_variance_ratio = r.ReadF64Array();
  model.full_variance_ratio = r.ReadF64Array();
  if (model.explained_variance_ratio.size() != k) {
    throw Error(ErrorCode::kInvalidSpec, "PCA ratio count mismatch");
  }
  return model;
}

}  // namespace fairhead::linalg
