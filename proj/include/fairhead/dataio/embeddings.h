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

#ifndef FAIRHEAD_DATAIO_EMBEDDINGS_H_
#define FAIRHEAD_DATAIO_EMBEDDINGS_H_

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "fairhead/common/types.h"

namespace fairhead::dataio {

inline constexpr char kEmbeddingsMagic[] = "FAIREMB1";

// Frozen encoder output: one row per sample. Values are stored on disk as
// float32 and widened to double in memory, so a read/write cycle is lossless.
struct EmbeddingMatrix {
  std::vector<std::string> ids;
  Matrix data;

  int dim() const { return static_cast<int>(data.cols()); }
  size_t size() const { return static_cast<size_t>(data.rows()); }

  // Checks id uniqueness, id/row count agreement and finiteness.
  void Validate() const;
};

// Sidecar id list for an embeddings file: the same path with the extension
// replaced by ".ids" (bench/embeddings.bin -> bench/embeddings.ids).
std::filesystem::path SidecarPath(const std::filesystem::path& embeddings_path);

// Binary layout: "FAIREMB1" | u32 n | u32 dim | n*dim f32, row-major, LE.
Matrix ReadEmbeddingPayload(std::istream& in);
void WriteEmbeddingPayload(const Matrix& data, std::ostream& out);

EmbeddingMatrix ReadEmbeddings(const std::filesystem::path& path);
void WriteEmbeddings(const EmbeddingMatrix& embeddings,
                     const std::filesystem::path& path);

// Rows selected by index, in the given order.
EmbeddingMatrix SelectRows(const EmbeddingMatrix& embeddings,
                           const std::vector<int>& rows);

}  // namespace fairhead::dataio

#endif  // FAIRHEAD_DATAIO_EMBEDDINGS_H_
