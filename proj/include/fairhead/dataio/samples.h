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

#ifndef FAIRHEAD_DATAIO_SAMPLES_H_
#define FAIRHEAD_DATAIO_SAMPLES_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace fairhead::dataio {

enum class Sex : uint8_t { kFemale = 0, kMale = 1 };
enum class AgeGroup : uint8_t { kYoung = 0, kOld = 1 };
enum class Race : uint8_t { kWhite = 0, kAsian = 1, kBlack = 2, kOther = 3 };
enum class Split : uint8_t { kTrain = 0, kVal = 1, kTest = 2 };

// Demographic axes along which fairness is measured.
enum class Axis : uint8_t { kSex = 0, kAge = 1, kRace = 2 };
inline constexpr std::array<Axis, 3> kAllAxes = {Axis::kSex, Axis::kAge,
                                                 Axis::kRace};

inline constexpr int kMissingLabel = -1;
inline constexpr int kAgeThresholdYears = 70;

inline constexpr std::array<std::string_view, 4> kDefaultConditions = {
    "cardiomegaly", "lung_opacity", "edema", "pleural_effusion"};

// Ages at or above 70 years are "old".
AgeGroup DeriveAgeGroup(int age_years);

std::string_view SexName(Sex sex);
std::string_view AgeGroupName(AgeGroup group);
std::string_view RaceName(Race race);
std::string_view SplitName(Split split);
std::string_view AxisName(Axis axis);
Axis ParseAxis(std::string_view text);
Split ParseSplit(std::string_view text);

// Group labels reported on an axis. Race reports white/asian/black only;
// "other" is too small for subgroup analysis and is left out of race metrics.
const std::vector<std::string>& AxisGroupNames(Axis axis);
// Group index of `name` on `axis` (including "other" for race), or -1.
int AxisGroupIndex(Axis axis, std::string_view name);

struct Sample {
  std::string id;
  Sex sex = Sex::kFemale;
  int age_years = 0;
  Race race = Race::kWhite;
  Split split = Split::kTrain;
  std::vector<int8_t> labels;  // one per condition: 0, 1 or kMissingLabel

  AgeGroup age_group() const { return DeriveAgeGroup(age_years); }
};

class SampleTable {
 public:
  SampleTable() = default;
  SampleTable(std::vector<std::string> conditions, std::vector<Sample> rows);

  const std::vector<std::string>& conditions() const { return conditions_; }
  const std::vector<Sample>& rows() const { return rows_; }
  size_t size() const { return rows_.size(); }
  const Sample& operator[](size_t i) const { return rows_[i]; }

  int ConditionIndex(std::string_view name) const;  // -1 if absent

  // Per-sample group index on `axis` for fairness metrics; -1 marks samples
  // outside the reported groups (race "other").
  std::vector<int> MetricGroups(Axis axis) const;
  // Per-sample group index on `axis` with every sample assigned; race
  // "other" is group 3. Used for reweighting and adversaries.
  std::vector<int> AllGroups(Axis axis) const;

  std::vector<int> SplitIndices(Split split) const;
  // Labels of one condition for the given rows.
  std::vector<int> Labels(int condition, const std::vector<int>& rows) const;

  SampleTable Select(const std::vector<int>& rows) const;

 private:
  std::vector<std::string> conditions_;
  std::vector<Sample> rows_;
};

// Comma-separated table. Required columns id,sex,age,race,split; every other
// column is a condition label in {0,1,-1} (-1 = missing), in file order. The
// standard header is
//   id,sex,age,race,split,cardiomegaly,lung_opacity,edema,pleural_effusion
SampleTable ParseSamples(std::istream& in);
SampleTable ReadSamples(const std::filesystem::path& path);
void WriteSamples(const SampleTable& table, std::ostream& out);
void WriteSamples(const SampleTable& table, const std::filesystem::path& path);

}  // namespace fairhead::dataio

#endif  // FAIRHEAD_DATAIO_SAMPLES_H_
