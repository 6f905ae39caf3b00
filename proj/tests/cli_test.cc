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

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fairhead/cli/cli.h"
#include "fairhead/cli/report.h"
#include "fairhead/common/error.h"
#include "fairhead/common/kv_config.h"
#include "fairhead/detect/detect.h"

namespace fairhead::cli {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::path(FAIRHEAD_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int Fairhead(std::vector<std::string> args) {
  return RunCli(args);
}

// Small synthetic benchmark shared by the end-to-end tests.
const fs::path& Bench() {
  static const fs::path dir = [] {
    const fs::path d = TempDir("bench");
    EXPECT_EQ(Fairhead({"synth", "--n", "1200", "--seed", "5", "--noise", "0.25", "--out",
                   d.string()}),
              kExitOk);
    return d;
  }();
  return dir;
}

std::vector<std::string> DataArgs() {
  return {"--embeddings", (Bench() / "embeddings.bin").string(), "--samples",
          (Bench() / "samples.csv").string()};
}

std::vector<std::string> With(std::vector<std::string> head,
                              const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

detect::FairnessReport OneConditionReport() {
  detect::FairnessReport r;
  detect::ConditionReport c;
  c.condition = "edema";
  c.count = 10;
  c.positives = 4;
  c.auprc = 0.8;
  c.roc_auc = 0.9;
  for (const char* axis : {"sex", "age", "race"}) {
    metrics::SubgroupResult s;
    s.axis = axis;
    s.groups = {{0, "a", 0.8, 5, 2}, {1, "b", 0.784, 5, 2}};
    s.delta = 0.016;
    c.axes.push_back(s);
  }
  r.conditions = {c};
  r.mean_auprc = 0.8;
  r.mean_delta = {0.016, 0.041, 0.087};
  r.composite = 0.8 - 0.016 - 0.041 - 0.087;
  return r;
}

TEST(ReportTest, DeltasRenderInPercentagePoints) {
  const fs::path dir = TempDir("pp");
  Json doc = NewReport("detect", KvConfig{}, 1);
  AppendSection(doc, "fairness", FairnessJson("test", OneConditionReport()));
  EmitReport(doc, dir);
  const std::string csv = ReadFile(dir / "fairness.csv");
  EXPECT_NE(csv.find("test,mean,,,80.0,,1.6,4.1,8.7,"), std::string::npos) << csv;
  EXPECT_NE(csv.find("test,edema,10,4,80.0,90.0,1.6,1.6,1.6"), std::string::npos) << csv;
  EXPECT_TRUE(fs::exists(dir / "subgroups.csv"));
  EXPECT_TRUE(fs::exists(dir / "fairness_test.svg"));
  const std::string svg = ReadFile(dir / "fairness_test.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
}

TEST(ReportTest, AbsentSectionsWriteNoTables) {
  const fs::path dir = TempDir("empty");
  Json doc = NewReport("mitigate", KvConfig{}, 1);
  doc["sections"]["mitigation"] = Json::array();
  EmitReport(doc, dir);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  EXPECT_FALSE(fs::exists(dir / "mitigation.csv"));
  EXPECT_FALSE(fs::exists(dir / "mitigation.svg"));
  EXPECT_FALSE(fs::exists(dir / "fairness.csv"));
}

TEST(ReportTest, MetadataCarriesConfigAndHash) {
  KvConfig cfg;
  cfg.Set("head", "gbt");
  cfg.Set("n_repeats", "5");
  const Json doc = NewReport("train", cfg, 9);
  EXPECT_EQ(doc["schema"], kReportSchema);
  EXPECT_EQ(doc["metadata"]["command"], "train");
  EXPECT_EQ(doc["metadata"]["seed"], 9);
  EXPECT_EQ(doc["metadata"]["config"]["head"], "gbt");
  EXPECT_EQ(doc["metadata"]["config_hash"], ConfigHash(cfg));
  const std::string hash = ConfigHash(cfg);
  EXPECT_EQ(hash.rfind("fnv1a64:", 0), 0u);
  EXPECT_EQ(hash.size(), 8u + 16u);
  cfg.Set("n_repeats", "4");
  EXPECT_NE(ConfigHash(cfg), hash);
  // FNV-1a 64 of the empty string.
  EXPECT_EQ(ConfigHash(KvConfig{}), "fnv1a64:cbf29ce484222325");
}

TEST(ReportTest, LoadRejectsForeignDocuments) {
  const fs::path dir = TempDir("load");
  std::ofstream(dir / "other.json") << R"({"schema": "something-else"})";
  try {
    LoadReport(dir / "other.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidSpec);
  }
  try {
    LoadReport(dir / "missing.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
}

TEST(ReportTest, BarChartHasOneRectPerBar) {
  const std::string svg =
      GroupedBarSvg("t", "y", {"a", "b", "c"}, {{"s1", {1, 2, 3}, {}, {}}, {"s2", {3, 2, 1}, {}, {}}});
  size_t count = 0;
  for (size_t p = svg.find("<rect"); p != std::string::npos; p = svg.find("<rect", p + 1)) ++count;
  // Six bars, plus background and legend swatches.
  EXPECT_GE(count, 6u);
  EXPECT_NE(svg.find("s2"), std::string::npos);
}

TEST(CliTest, ExitCodes) {
  EXPECT_EQ(Fairhead({}), kExitUsage);
  EXPECT_EQ(Fairhead({"frobnicate"}), kExitUsage);
  EXPECT_EQ(Fairhead({"detect"}), kExitUsage);
  EXPECT_EQ(Fairhead(With({"train", "--head", "svm", "--out", TempDir("bad").string()}, DataArgs())),
            kExitUsage);
  EXPECT_EQ(Fairhead({"detect", "--embeddings", "/nonexistent/e.bin", "--samples",
                 "/nonexistent/s.csv", "--out", TempDir("missing").string()}),
            kExitData);
  EXPECT_EQ(Fairhead({"report", "--from", "/nonexistent/report.json"}), kExitData);
  EXPECT_EQ(Fairhead({"--help"}), kExitOk);
}

TEST(CliTest, BinaryExitStatus) {
  const std::string bin = FAIRHEAD_BIN;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status(bin + " --help"), kExitOk);
  EXPECT_EQ(status(bin + " nosuchcommand"), kExitUsage);
  EXPECT_EQ(status(bin + " report --from /nonexistent/report.json"), kExitData);
}

TEST(CliTest, SynthWritesBenchmark) {
  for (const char* f : {"embeddings.bin", "embeddings.ids", "samples.csv", "oracle_spec.cfg"}) {
    EXPECT_TRUE(fs::exists(Bench() / f)) << f;
  }
  const fs::path again = TempDir("synth_again");
  ASSERT_EQ(Fairhead({"synth", "--n", "1200", "--seed", "5", "--noise", "0.25", "--out",
                 again.string()}),
            kExitOk);
  EXPECT_EQ(ReadFile(again / "embeddings.bin"), ReadFile(Bench() / "embeddings.bin"));
  EXPECT_EQ(ReadFile(again / "samples.csv"), ReadFile(Bench() / "samples.csv"));
}

std::vector<std::string> ListFiles(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

TEST(CliTest, ThreadCountDoesNotChangeOutputs) {
  const fs::path a = TempDir("threads1"), b = TempDir("threads3");
  const std::vector<std::string> common = {"--head", "lr", "--strategies", "reweight",
                                           "--repeats", "2"};
  ASSERT_EQ(Fairhead(With(With({"mitigate", "--out", a.string(), "--threads", "1"}, common),
                     DataArgs())),
            kExitOk);
  ASSERT_EQ(Fairhead(With(With({"mitigate", "--out", b.string(), "--threads", "3"}, common),
                     DataArgs())),
            kExitOk);
  const auto files = ListFiles(a);
  EXPECT_EQ(files, ListFiles(b));
  EXPECT_NE(std::find(files.begin(), files.end(), "mitigation.csv"), files.end());
  for (const auto& f : files) EXPECT_EQ(ReadFile(a / f), ReadFile(b / f)) << f;
}

TEST(CliTest, ReportReemitIsByteIdentical) {
  const fs::path run = TempDir("train_run"), re = TempDir("reemit");
  ASSERT_EQ(Fairhead(With({"train", "--head", "lr", "--out", run.string()}, DataArgs())), kExitOk);
  EXPECT_TRUE(fs::exists(run / "model.fmh"));
  ASSERT_EQ(Fairhead({"report", "--from", (run / "report.json").string(), "--out", re.string()}),
            kExitOk);
  for (const auto& f : ListFiles(re)) EXPECT_EQ(ReadFile(re / f), ReadFile(run / f)) << f;
  EXPECT_EQ(ReadFile(re / "report.json"), ReadFile(run / "report.json"));

  const Json doc = LoadReport(run / "report.json");
  EXPECT_EQ(doc["schema"], kReportSchema);
  EXPECT_EQ(doc["metadata"]["config"]["head"], "logistic_regression");
  KvConfig cfg;
  for (const auto& [k, v] : doc["metadata"]["config"].items()) cfg.Set(k, v.get<std::string>());
  EXPECT_EQ(doc["metadata"]["config_hash"], ConfigHash(cfg));
}

TEST(CliTest, EvaluateWritesThresholdTables) {
  const fs::path out = TempDir("evaluate");
  ASSERT_EQ(Fairhead(With({"evaluate", "--head", "lr", "--out", out.string(), "--recall-floor",
                      "0.9", "--condition", "edema"},
                     DataArgs())),
            kExitOk);
  EXPECT_TRUE(fs::exists(out / "threshold.csv"));
  EXPECT_TRUE(fs::exists(out / "threshold_gaps.csv"));
  const Json doc = LoadReport(out / "report.json");
  ASSERT_TRUE(doc["sections"].contains("threshold"));
  EXPECT_EQ(doc["sections"]["threshold"][0]["recall_floor"], 0.9);
}

}  // namespace
}  // namespace fairhead::cli
