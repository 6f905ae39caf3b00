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

#ifndef FAIRHEAD_CLI_REPORT_H_
#define FAIRHEAD_CLI_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fairhead/common/kv_config.h"
#include "fairhead/detect/detect.h"
#include "fairhead/metrics/metrics.h"
#include "fairhead/mitigate/experiment.h"

namespace fairhead::cli {

using Json = nlohmann::ordered_json;

inline constexpr char kReportSchema[] = "fairhead-report/1";
inline constexpr char kToolVersion[] = "0.1.0";

// FNV-1a 64 of the canonical config text, as "fnv1a64:<16 hex digits>".
std::string ConfigHash(const KvConfig& config);

// Report skeleton: schema, metadata (tool version, command, seed, effective
// config and its hash) and an empty "sections" object. No timestamps, so
// identical runs give identical documents.
Json NewReport(std::string_view command, const KvConfig& effective, uint64_t seed);

Json PrevalenceJson(const detect::PrevalenceTable& table);
Json LeakageJson(const detect::LeakageResult& result);
Json DirectionJson(const std::string& condition, const detect::DirectionTable& table);
Json FairnessJson(const std::string& label, const detect::FairnessReport& report);
Json AggregateJson(const metrics::RunAggregate& aggregate);
Json RunResultJson(const std::string& label, const mitigate::ExperimentConfig& cfg,
                   const mitigate::RunResult& result);
Json ThresholdJson(const std::string& label, const std::string& condition,
                   const std::string& axis, const detect::ThresholdAnalysis& analysis);
Json HistoryJson(const std::string& label,
                 const std::vector<mitigate::ActiveLearningRound>& history);

// Appends `entry` to the array section `name`, creating it if needed.
void AppendSection(Json& doc, const std::string& name, Json entry);

// Writes report.json plus one CSV table per non-empty section and grouped
// bar charts (SVG) for fairness and mitigation sections. Metric cells are in
// percentage points with one decimal. Throws Error(kIoError).
void EmitReport(const Json& doc, const std::filesystem::path& out_dir);

// Reads a report written by EmitReport. Throws kIoError, kInvalidSpec.
Json LoadReport(const std::filesystem::path& path);

struct BarSeries {
  std::string name;
  std::vector<double> values;  // one per category
  std::vector<double> low;     // optional error bars, same length or empty
  std::vector<double> high;
};

// Static grouped-bar chart.
std::string GroupedBarSvg(const std::string& title, const std::string& y_label,
                          const std::vector<std::string>& categories,
                          const std::vector<BarSeries>& series);

}  // namespace fairhead::cli

#endif  // FAIRHEAD_CLI_REPORT_H_
