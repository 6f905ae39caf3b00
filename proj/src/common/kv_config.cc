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

#include "fairhead/common/kv_config.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "fairhead/common/error.h"

namespace fairhead {

std::string_view Trim(std::string_view text) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

std::vector<std::string> SplitString(std::string_view text, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(text.substr(start));
      break;
    }
    parts.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

double ParseDouble(std::string_view text, std::string_view what) {
  text = Trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("{}: expected a number, got \"{}\"", what, text));
  }
  return v;
}

int64_t ParseInt(std::string_view text, std::string_view what) {
  text = Trim(text);
  int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("{}: expected an integer, got \"{}\"", what, text));
  }
  return v;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

KvConfig KvConfig::Parse(std::istream& in) {
  KvConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = Trim(line);
    if (view.empty() || view.front() == '#') continue;
    const size_t eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidSpec,
                  fmt::format("line {}: expected key=value, got \"{}\"", line_no,
                              view));
    }
    const std::string_view key = Trim(view.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorCode::kInvalidSpec,
                  fmt::format("line {}: empty key", line_no));
    }
    config.Set(std::string(key), std::string(Trim(view.substr(eq + 1))));
  }
  return config;
}

KvConfig KvConfig::ParseString(std::string_view text) {
  std::istringstream in{std::string(text)};
  return Parse(in);
}

KvConfig KvConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot open config {}", path.string()));
  }
  return Parse(in);
}

void KvConfig::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot write config {}", path.string()));
  }
  out << ToString();
}

std::string KvConfig::ToString() const {
  std::string text;
  for (const auto& [key, value] : entries_) {
    text += key;
    text += '=';
    text += value;
    text += '\n';
  }
  return text;
}

bool KvConfig::Has(std::string_view key) const {
  return entries_.find(key) != entries_.end();
}

void KvConfig::Set(std::string key, std::string value) {
  entries_.insert_or_assign(std::move(key), std::move(value));
}

void KvConfig::Merge(const KvConfig& overrides) {
  for (const auto& [key, value] : overrides.entries_) Set(key, value);
}

std::optional<std::string> KvConfig::Get(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KvConfig::GetString(std::string_view key,
                                std::string_view fallback) const {
  const auto v = Get(key);
  return v ? *v : std::string(fallback);
}

double KvConfig::GetDouble(std::string_view key, double fallback) const {
  const auto v = Get(key);
  return v ? ParseDouble(*v, key) : fallback;
}

int64_t KvConfig::GetInt(std::string_view key, int64_t fallback) const {
  const auto v = Get(key);
  return v ? ParseInt(*v, key) : fallback;
}

bool KvConfig::GetBool(std::string_view key, bool fallback) const {
  const auto v = Get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1") return true;
  if (*v == "false" || *v == "0") return false;
  throw Error(ErrorCode::kInvalidSpec,
              fmt::format("{}: expected true/false, got \"{}\"", key, *v));
}

std::vector<std::string> KvConfig::KeysWithPrefix(std::string_view prefix) const {
  std::vector<std::string> keys;
  for (auto it = entries_.lower_bound(prefix); it != entries_.end(); ++it) {
    if (it->first.compare(0, prefix.size(), prefix) != 0) break;
    keys.push_back(it->first);
  }
  return keys;
}

}  // namespace fairhead
