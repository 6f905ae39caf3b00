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

#include "fairhead/dataio/embeddings.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

#include <fmt/format.h>

#include "fairhead/common/binary_io.h"
#include "fairhead/common/error.h"

namespace fairhead::dataio {

void EmbeddingMatrix::Validate() const {
  if (ids.size() != size()) {
    throw Error(ErrorCode::kIdMismatch,
                fmt::format("{} ids for {} embedding rows", ids.size(), size()));
  }
  std::unordered_set<std::string> seen;
  seen.reserve(ids.size());
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kDuplicateId, fmt::format("id \"{}\"", id));
    }
  }
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      if (!std::isfinite(data(r, c))) {
        throw Error(ErrorCode::kNonFiniteValue,
                    fmt::format("row {}, col {}", r, c));
      }
    }
  }
}

std::filesystem::path SidecarPath(const std::filesystem::path& embeddings_path) {
  std::filesystem::path sidecar = embeddings_path;
  sidecar.replace_extension(".ids");
  return sidecar;
}

Matrix ReadEmbeddingPayload(std::istream& in) {
  BinaryReader reader(in);
  reader.ExpectMagic(kEmbeddingsMagic);
  const uint32_t n = reader.ReadU32();
  const uint32_t dim = reader.ReadU32();
  if (dim == 0) throw Error(ErrorCode::kInvalidSpec, "embedding dim is 0");
  Matrix data(n, dim);
  for (uint32_t r = 0; r < n; ++r) {
    for (uint32_t c = 0; c < dim; ++c) {
      float v;
      try {
        v = reader.ReadF32();
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kTruncatedFile) throw;
        throw Error(ErrorCode::kTruncatedFile,
                    fmt::format("payload ends at value {} of {} ({}x{})",
                                static_cast<uint64_t>(r) * dim + c,
                                static_cast<uint64_t>(n) * dim, n, dim));
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteValue,
                    fmt::format("row {}, col {}", r, c));
      }
      data(r, c) = static_cast<double>(v);
    }
  }
  return data;
}

void WriteEmbeddingPayload(const Matrix& data, std::ostream& out) {
  BinaryWriter writer(out);
  writer.WriteMagic(kEmbeddingsMagic);
  writer.WriteU32(static_cast<uint32_t>(data.rows()));
  writer.WriteU32(static_cast<uint32_t>(data.cols()));
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      writer.WriteF32(static_cast<float>(data(r, c)));
    }
  }
}

EmbeddingMatrix ReadEmbeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot open embeddings {}", path.string()));
  }
  EmbeddingMatrix embeddings;
  embeddings.data = ReadEmbeddingPayload(in);

  const auto sidecar = SidecarPath(path);
  std::ifstream ids_in(sidecar);
  if (!ids_in) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot open id list {}", sidecar.string()));
  }
  std::string line;
  while (std::getline(ids_in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    embeddings.ids.push_back(line);
  }
  embeddings.Validate();
  return embeddings;
}

void WriteEmbeddings(const EmbeddingMatrix& embeddings,
                     const std::filesystem::path& path) {
  embeddings.Validate();
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw Error(ErrorCode::kIoError,
                  fmt::format("cannot write embeddings {}", path.string()));
    }
    WriteEmbeddingPayload(embeddings.data, out);
  }
  std::ofstream ids_out(SidecarPath(path), std::ios::binary);
  if (!ids_out) {
    throw Error(ErrorCode::kIoError, "cannot write embeddings id list");
  }
  for (const auto& id : embeddings.ids) ids_out << id << '\n';
}

EmbeddingMatrix SelectRows(const EmbeddingMatrix& embeddings,
                           const std::vector<int>& rows) {
  EmbeddingMatrix out;
  out.data.resize(static_cast<Eigen::Index>(rows.size()), embeddings.data.cols());
  out.ids.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.data.row(static_cast<Eigen::Index>(i)) = embeddings.data.row(rows[i]);
    out.ids.push_back(embeddings.ids[rows[i]]);
  }
  return out;
}

}  // namespace fairhead::dataio
