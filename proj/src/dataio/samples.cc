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

#include "fairhead/dataio/samples.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>

#include "fairhead/common/error.h"
#include "fairhead/common/kv_config.h"

namespace fairhead::dataio {

AgeGroup DeriveAgeGroup(int age_years) {
  return age_years >= kAgeThresholdYears ? AgeGroup::kOld : AgeGroup::kYoung;
}

std::string_view SexName(Sex sex) {
  return sex == Sex::kFemale ? "female" : "male";
}

std::string_view AgeGroupName(AgeGroup group) {
  return group == AgeGroup::kYoung ? "young" : "old";
}

std::string_view RaceName(Race race) {
  switch (race) {
    case Race::kWhite: return "white";
    case Race::kAsian: return "asian";
    case Race::kBlack: return "black";
    case Race::kOther: return "other";
  }
  return "other";
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

std::string_view AxisName(Axis axis) {
  switch (axis) {
    case Axis::kSex: return "sex";
    case Axis::kAge: return "age";
    case Axis::kRace: return "race";
  }
  return "sex";
}

Axis ParseAxis(std::string_view text) {
  if (text == "sex") return Axis::kSex;
  if (text == "age" || text == "age_group") return Axis::kAge;
  if (text == "race") return Axis::kRace;
  throw Error(ErrorCode::kBadEnumValue,
              fmt::format("axis \"{}\" (expected sex, age or race)", text));
}

Split ParseSplit(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "val") return Split::kVal;
  if (text == "test") return Split::kTest;
  throw Error(ErrorCode::kBadEnumValue,
              fmt::format("split \"{}\" (expected train, val or test)", text));
}

const std::vector<std::string>& AxisGroupNames(Axis axis) {
  static const std::vector<std::string> kSexNames = {"female", "male"};
  static const std::vector<std::string> kAgeNames = {"young", "old"};
  static const std::vector<std::string> kRaceNames = {"white", "asian", "black"};
  switch (axis) {
    case Axis::kSex: return kSexNames;
    case Axis::kAge: return kAgeNames;
    case Axis::kRace: return kRaceNames;
  }
  return kSexNames;
}

int AxisGroupIndex(Axis axis, std::string_view name) {
  const auto& names = AxisGroupNames(axis);
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  if (axis == Axis::kRace && name == "other") {
    return static_cast<int>(Race::kOther);
  }
  return -1;
}

SampleTable::SampleTable(std::vector<std::string> conditions,
                         std::vector<Sample> rows)
    : conditions_(std::move(conditions)), rows_(std::move(rows)) {
  std::unordered_set<std::string> seen;
  seen.reserve(rows_.size());
  for (const auto& row : rows_) {
    if (row.labels.size() != conditions_.size()) {
      throw Error(ErrorCode::kInvalidSpec,
                  fmt::format("sample \"{}\" has {} labels, expected {}", row.id,
                              row.labels.size(), conditions_.size()));
    }
    if (!seen.insert(row.id).second) {
      throw Error(ErrorCode::kDuplicateId, fmt::format("id \"{}\"", row.id));
    }
  }
}

int SampleTable::ConditionIndex(std::string_view name) const {
  for (size_t i = 0; i < conditions_.size(); ++i) {
    if (conditions_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> SampleTable::MetricGroups(Axis axis) const {
  std::vector<int> groups = AllGroups(axis);
  if (axis == Axis::kRace) {
    for (int& g : groups) {
      if (g == static_cast<int>(Race::kOther)) g = -1;
    }
  }
  return groups;
}

std::vector<int> SampleTable::AllGroups(Axis axis) const {
  std::vector<int> groups;
  groups.reserve(rows_.size());
  for (const auto& row : rows_) {
    switch (axis) {
      case Axis::kSex: groups.push_back(static_cast<int>(row.sex)); break;
      case Axis::kAge: groups.push_back(static_cast<int>(row.age_group())); break;
      case Axis::kRace: groups.push_back(static_cast<int>(row.race)); break;
    }
  }
  return groups;
}

std::vector<int> SampleTable::SplitIndices(Split split) const {
  std::vector<int> indices;
  for (size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].split == split) indices.push_back(static_cast<int>(i));
  }
  return indices;
}

std::vector<int> SampleTable::Labels(int condition,
                                     const std::vector<int>& rows) const {
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (int r : rows) labels.push_back(rows_[r].labels[condition]);
  return labels;
}

SampleTable SampleTable::Select(const std::vector<int>& rows) const {
  std::vector<Sample> selected;
  selected.reserve(rows.size());
  for (int r : rows) selected.push_back(rows_[r]);
  return SampleTable(conditions_, std::move(selected));
}

namespace {

constexpr std::array<std::string_view, 5> kRequiredColumns = {
    "id", "sex", "age", "race", "split"};

[[noreturn]] void BadValue(size_t row, std::string_view column,
                           std::string_view token) {
  throw Error(ErrorCode::kBadEnumValue,
              fmt::format("row {}, column {}: \"{}\"", row, column, token));
}

}  // namespace

SampleTable ParseSamples(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kMissingColumn, "empty samples file (no header)");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = SplitString(line, ',');

  std::array<int, kRequiredColumns.size()> required_pos;
  required_pos.fill(-1);
  std::vector<int> condition_pos;
  std::vector<std::string> conditions;
  for (size_t c = 0; c < header.size(); ++c) {
    const std::string name(Trim(header[c]));
    bool is_required = false;
    for (size_t r = 0; r < kRequiredColumns.size(); ++r) {
      if (name == kRequiredColumns[r]) {
        required_pos[r] = static_cast<int>(c);
        is_required = true;
      }
    }
    if (!is_required) {
      conditions.push_back(name);
      condition_pos.push_back(static_cast<int>(c));
    }
  }
  for (size_t r = 0; r < kRequiredColumns.size(); ++r) {
    if (required_pos[r] < 0) {
      throw Error(ErrorCode::kMissingColumn,
                  fmt::format("column \"{}\"", kRequiredColumns[r]));
    }
  }
  if (conditions.empty()) {
    throw Error(ErrorCode::kMissingColumn, "no condition label columns");
  }

  std::vector<Sample> rows;
  size_t row_no = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    ++row_no;
    const std::vector<std::string> cells = SplitString(line, ',');
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kMissingColumn,
                  fmt::format("row {}: {} cells, header has {}", row_no,
                              cells.size(), header.size()));
    }
    const auto cell = [&](size_t required) -> std::string_view {
      return Trim(cells[required_pos[required]]);
    };
    Sample s;
    s.id = std::string(cell(0));
    if (s.id.empty()) BadValue(row_no, "id", s.id);

    const std::string_view sex = cell(1);
    if (sex == "female") {
      s.sex = Sex::kFemale;
    } else if (sex == "male") {
      s.sex = Sex::kMale;
    } else {
      BadValue(row_no, "sex", sex);
    }

    const std::string_view age = cell(2);
    int age_years = -1;
    const auto [ptr, ec] =
        std::from_chars(age.data(), age.data() + age.size(), age_years);
    if (ec != std::errc() || ptr != age.data() + age.size() || age_years < 0) {
      BadValue(row_no, "age", age);
    }
    s.age_years = age_years;

    const std::string_view race = cell(3);
    if (race == "white") {
      s.race = Race::kWhite;
    } else if (race == "asian") {
      s.race = Race::kAsian;
    } else if (race == "black") {
      s.race = Race::kBlack;
    } else {
      s.race = Race::kOther;
    }

    const std::string_view split = cell(4);
    if (split == "train") {
      s.split = Split::kTrain;
    } else if (split == "val") {
      s.split = Split::kVal;
    } else if (split == "test") {
      s.split = Split::kTest;
    } else {
      BadValue(row_no, "split", split);
    }

    s.labels.reserve(conditions.size());
    for (size_t k = 0; k < conditions.size(); ++k) {
      const std::string_view token = Trim(cells[condition_pos[k]]);
      if (token == "0") {
        s.labels.push_back(0);
      } else if (token == "1") {
        s.labels.push_back(1);
      } else if (token == "-1") {
        s.labels.push_back(kMissingLabel);
      } else {
        BadValue(row_no, conditions[k], token);
      }
    }
    rows.push_back(std::move(s));
  }
  return SampleTable(std::move(conditions), std::move(rows));
}

SampleTable ReadSamples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot open samples {}", path.string()));
  }
  return ParseSamples(in);
}

void WriteSamples(const SampleTable& table, std::ostream& out) {
  out << "id,sex,age,race,split";
  for (const auto& c : table.conditions()) out << ',' << c;
  out << '\n';
  for (const auto& s : table.rows()) {
    out << s.id << ',' << SexName(s.sex) << ',' << s.age_years << ','
        << RaceName(s.race) << ',' << SplitName(s.split);
    for (int8_t label : s.labels) out << ',' << static_cast<int>(label);
    out << '\n';
  }
}

void WriteSamples(const SampleTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot write samples {}", path.string()));
  }
  WriteSamples(table, out);
}

}  // namespace fairhead::dataio
