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

#include "fairhead/common/binary_io.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>

#include <fmt/format.h>

#include "fairhead/common/error.h"

namespace fairhead {
namespace {

template <typename T>
std::array<unsigned char, sizeof(T)> ToLittleEndian(T v) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  return bytes;
}

template <typename T>
T FromLittleEndian(std::array<unsigned char, sizeof(T)> bytes) {
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

}  // namespace

void BinaryWriter::WriteBytes(const void* data, size_t size) {
  out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out_) throw Error(ErrorCode::kIoError, "write failed");
}

void BinaryWriter::WriteMagic(std::string_view magic) {
  if (magic.size() != kMagicSize) {
    throw Error(ErrorCode::kInvalidSpec, "magic must be 8 bytes");
  }
  WriteBytes(magic.data(), magic.size());
}

void BinaryWriter::WriteU32(uint32_t v) {
  const auto b = ToLittleEndian(v);
  WriteBytes(b.data(), b.size());
}
void BinaryWriter::WriteU64(uint64_t v) {
  const auto b = ToLittleEndian(v);
  WriteBytes(b.data(), b.size());
}
void BinaryWriter::WriteI32(int32_t v) {
  const auto b = ToLittleEndian(v);
  WriteBytes(b.data(), b.size());
}
void BinaryWriter::WriteF32(float v) {
  const auto b = ToLittleEndian(v);
  WriteBytes(b.data(), b.size());
}
void BinaryWriter::WriteF64(double v) {
  const auto b = ToLittleEndian(v);
  WriteBytes(b.data(), b.size());
}

void BinaryWriter::WriteString(std::string_view s) {
  WriteU32(static_cast<uint32_t>(s.size()));
  WriteBytes(s.data(), s.size());
}

void BinaryWriter::WriteF64Array(const std::vector<double>& values) {
  WriteU32(static_cast<uint32_t>(values.size()));
  for (double v : values) WriteF64(v);
}

void BinaryReader::ReadBytes(void* data, size_t size) {
  in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
  if (static_cast<size_t>(in_.gcount()) != size) {
    throw Error(ErrorCode::kTruncatedFile,
                fmt::format("expected {} more bytes, got {}", size,
                            in_.gcount()));
  }
}

std::string BinaryReader::ReadMagic() {
  std::string magic(kMagicSize, '\0');
  in_.read(magic.data(), kMagicSize);
  if (static_cast<size_t>(in_.gcount()) != kMagicSize) {
    throw Error(ErrorCode::kBadMagic, "file shorter than the 8-byte magic");
  }
  return magic;
}

void BinaryReader::ExpectMagic(std::string_view magic) {
  const std::string got = ReadMagic();
  if (got != magic) {
    throw Error(ErrorCode::kBadMagic,
                fmt::format("expected \"{}\", found \"{}\"", magic, got));
  }
}

uint32_t BinaryReader::ReadU32() {
  std::array<unsigned char, 4> b;
  ReadBytes(b.data(), b.size());
  return FromLittleEndian<uint32_t>(b);
}
uint64_t BinaryReader::ReadU64() {
  std::array<unsigned char, 8> b;
  ReadBytes(b.data(), b.size());
  return FromLittleEndian<uint64_t>(b);
}
int32_t BinaryReader::ReadI32() {
  std::array<unsigned char, 4> b;
  ReadBytes(b.data(), b.size());
  return FromLittleEndian<int32_t>(b);
}
float BinaryReader::ReadF32() {
  std::array<unsigned char, 4> b;
  ReadBytes(b.data(), b.size());
  return FromLittleEndian<float>(b);
}
double BinaryReader::ReadF64() {
  std::array<unsigned char, 8> b;
  ReadBytes(b.data(), b.size());
  return FromLittleEndian<double>(b);
}

std::string BinaryReader::ReadString() {
  const uint32_t size = ReadU32();
  std::string s(size, '\0');
  ReadBytes(s.data(), size);
  return s;
}

std::vector<double> BinaryReader::ReadF64Array() {
  const uint32_t count = ReadU32();
  std::vector<double> values;
  values.reserve(count);
  for (uint32_t i = 0; i < count; ++i) values.push_back(ReadF64());
  return values;
}

}  // namespace fairhead
