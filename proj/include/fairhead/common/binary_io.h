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

#ifndef FAIRHEAD_COMMON_BINARY_IO_H_
#define FAIRHEAD_COMMON_BINARY_IO_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace fairhead {

// All on-disk binary formats are little-endian and open with an 8-byte ASCII
// magic ("FAIREMB1", "FAIRPCA1", "FAIRGBT1", ...). The trailing digit is the
// format version.
inline constexpr size_t kMagicSize = 8;

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void WriteMagic(std::string_view magic);
  void WriteU32(uint32_t v);
  void WriteU64(uint64_t v);
  void WriteI32(int32_t v);
  void WriteF32(float v);
  void WriteF64(double v);
  void WriteString(std::string_view s);  // u32 length + bytes
  void WriteF64Array(const std::vector<double>& values);  // u32 count + data

 private:
  void WriteBytes(const void* data, size_t size);
  std::ostream& out_;
};

// Throws Error(kTruncatedFile) on short reads and Error(kBadMagic) on a magic
// mismatch.
class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  void ExpectMagic(std::string_view magic);
  std::string ReadMagic();
  uint32_t ReadU32();
  uint64_t ReadU64();
  int32_t ReadI32();
  float ReadF32();
  double ReadF64();
  std::string ReadString();
  std::vector<double> ReadF64Array();

 private:
  void ReadBytes(void* data, size_t size);
  std::istream& in_;
};

}  // namespace fairhead

#endif  // FAIRHEAD_COMMON_BINARY_IO_H_
