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

#ifndef FAIRHEAD_COMMON_KV_CONFIG_H_
#define FAIRHEAD_COMMON_KV_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fairhead {

// Flat "key=value" text configuration. Lines starting with '#' and blank lines
// are ignored; whitespace around keys and values is trimmed. Keys are kept
// sorted so serialization is canonical.
class KvConfig {
 public:
  static KvConfig Parse(std::istream& in);
  static KvConfig ParseString(std::string_view text);
  static KvConfig Load(const std::filesystem::path& path);

  void Save(const std::filesystem::path& path) const;
  std::string ToString() const;

  bool Has(std::string_view key) const;
  void Set(std::string key, std::string value);
  void Merge(const KvConfig& overrides);

  std::optional<std::string> Get(std::string_view key) const;
  std::string GetString(std::string_view key, std::string_view fallback) const;
  double GetDouble(std::string_view key, double fallback) const;
  int64_t GetInt(std::string_view key, int64_t fallback) const;
  bool GetBool(std::string_view key, bool fallback) const;

  // Keys starting with `prefix`, in sorted order.
  std::vector<std::string> KeysWithPrefix(std::string_view prefix) const;

  const std::map<std::string, std::string, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

// Strict numeric parsing helpers; throw Error(kInvalidSpec) naming `what`.
double ParseDouble(std::string_view text, std::string_view what);
int64_t ParseInt(std::string_view text, std::string_view what);
std::string_view Trim(std::string_view text);
std::vector<std::string> SplitString(std::string_view text, char sep);

// Shortest text that parses back to the same double.
std::string FormatDouble(double v);

}  // namespace fairhead

#endif  // FAIRHEAD_COMMON_KV_CONFIG_H_
