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

#include "fairhead/heads/multihead.h"

#include <fstream>

#include <fmt/format.h>

#include "fairhead/common/binary_io.h"
#include "fairhead/common/error.h"
#include "fairhead/dataio/samples.h"

namespace fairhead::heads {

Matrix MultiHeadModel::PredictProba(const Matrix& reduced) const {
  Matrix out(reduced.rows(), num_conditions());
  for (int c = 0; c < num_conditions(); ++c) {
    const std::vector<double> p = heads[c]->PredictProba(reduced);
    for (Eigen::Index r = 0; r < reduced.rows(); ++r) out(r, c) = p[r];
  }
  return out;
}

Matrix MultiHeadModel::PredictProbaEmbeddings(const Matrix& embeddings) const {
  return PredictProba(pca ? pca->Transform(embeddings) : embeddings);
}

void MultiHeadModel::Write(std::ostream& out) const {
  BinaryWriter w(out);
  w.WriteMagic(kMultiHeadMagic);
  w.WriteU32(static_cast<uint32_t>(heads.size()));
  for (const std::string& name : condition_names) w.WriteString(name);
  w.WriteU32(pca ? 1 : 0);
  if (pca) pca->Write(out);
  for (const auto& head : heads) WriteHead(*head, out);
}

MultiHeadModel MultiHeadModel::Read(std::istream& in) {
  BinaryReader r(in);
  r.ExpectMagic(kMultiHeadMagic);
  MultiHeadModel model;
  const uint32_t count = r.ReadU32();
  for (uint32_t c = 0; c < count; ++c) model.condition_names.push_back(r.ReadString());
  if (r.ReadU32() != 0) {
    model.pca = std::make_shared<linalg::PcaModel>(linalg::PcaModel::Read(in));
  }
  for (uint32_t c = 0; c < count; ++c) model.heads.push_back(ReadHead(in));
  return model;
}

void MultiHeadModel::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, fmt::format("cannot write {}", path.string()));
  Write(out);
  if (!out) throw Error(ErrorCode::kIoError, fmt::format("write failed: {}", path.string()));
}

MultiHeadModel MultiHeadModel::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, fmt::format("cannot open {}", path.string()));
  return Read(in);
}

MultiHeadModel TrainMultihead(HeadKind kind, const Matrix& x,
                              const std::vector<std::vector<int>>& labels,
                              const std::vector<std::string>& condition_names,
                              std::span<const double> weights,
                              const HeadParams& params, uint64_t seed,
                              const AttributeLabels* attributes) {
  if (labels.empty() || labels.size() != condition_names.size()) {
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("{} label columns for {} condition names", labels.size(),
                            condition_names.size()));
  }
  const size_t n = static_cast<size_t>(x.rows());
  if (weights.size() != n) {
    throw Error(ErrorCode::kDimMismatch,
                fmt::format("{} weights for {} rows", weights.size(), n));
  }
  MultiHeadModel model;
  model.condition_names = condition_names;
  for (size_t c = 0; c < labels.size(); ++c) {
    const std::vector<int>& column = labels[c];
    try {
      if (column.size() != n) {
        throw Error(ErrorCode::kDimMismatch,
                    fmt::format("{} labels for {} rows", column.size(), n));
      }
      std::vector<int> rows;
      for (size_t i = 0; i < n; ++i) {
        if (column[i] != dataio::kMissingLabel) rows.push_back(static_cast<int>(i));
      }
      Matrix xs(static_cast<Eigen::Index>(rows.size()), x.cols());
      std::vector<int> ys(rows.size());
      std::vector<double> ws(rows.size());
      AttributeLabels as;
      if (attributes) as.assign(attributes->size(), std::vector<int>(rows.size()));
      for (size_t j = 0; j < rows.size(); ++j) {
        xs.row(static_cast<Eigen::Index>(j)) = x.row(rows[j]);
        ys[j] = column[rows[j]];
        ws[j] = weights[rows[j]];
        for (size_t a = 0; a < as.size(); ++a) as[a][j] = (*attributes)[a][rows[j]];
      }
      model.heads.push_back(TrainHead(kind, xs, ys, ws, params, seed + c,
                                      attributes ? &as : nullptr));
    } catch (const Error& e) {
      RethrowWithContext(e, fmt::format("condition '{}'", condition_names[c]));
    }
  }
  return model;
}

bool KeepCondition(double roc_auc, double positive_rate) {
  return roc_auc > kMinConditionAuc && positive_rate >= kMinPositiveRate;
}

std::vector<int> FilterConditions(std::span<const double> roc_auc,
                                  std::span<const double> positive_rate) {
  if (roc_auc.size() != positive_rate.size()) {
    throw Error(ErrorCode::kDimMismatch, "auc and positive-rate lengths differ");
  }
  std::vector<int> kept;
  for (size_t c = 0; c < roc_auc.size(); ++c) {
    if (KeepCondition(roc_auc[c], positive_rate[c])) kept.push_back(static_cast<int>(c));
  }
  return kept;
}

}  // namespace fairhead::heads
