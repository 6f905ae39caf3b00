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

#include "fairhead/cli/cli.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "fairhead/cli/report.h"
#include "fairhead/common/error.h"
#include "fairhead/common/kv_config.h"
#include "fairhead/common/parallel.h"
#include "fairhead/common/random.h"
#include "fairhead/dataio/embeddings.h"
#include "fairhead/dataio/samples.h"
#include "fairhead/dataio/synthetic.h"
#include "fairhead/detect/detect.h"
#include "fairhead/heads/gbt_head.h"
#include "fairhead/heads/multihead.h"
#include "fairhead/metrics/metrics.h"
#include "fairhead/mitigate/experiment.h"

namespace fairhead::cli {
namespace {

namespace fs = std::filesystem;
using dataio::Axis;

constexpr int kMaxShapSamples = 500;

struct CommonFlags {
  std::string embeddings;
  std::string samples;
  std::string out = "fairhead_out";
  uint64_t seed = 42;
  int threads = 0;
};

struct ExperimentFlags {
  std::string config;
  std::string head;
  std::string strategies;
  int repeats = 0;
  double variance_target = 0.0;
  int al_initial = 0;
  int al_batch = 0;
  int al_rounds = 0;
  std::string al_strategy;
  CLI::Option* head_opt = nullptr;
  CLI::Option* strategies_opt = nullptr;
  CLI::Option* repeats_opt = nullptr;
  CLI::Option* variance_opt = nullptr;
  CLI::Option* al_initial_opt = nullptr;
  CLI::Option* al_batch_opt = nullptr;
  CLI::Option* al_rounds_opt = nullptr;
  CLI::Option* al_strategy_opt = nullptr;
};

struct Dataset {
  dataio::EmbeddingMatrix embeddings;
  dataio::SampleTable samples;
};

Error Usage(const std::string& message) { return Error(ErrorCode::kUsage, message); }

void AddCommon(CLI::App* app, CommonFlags& f, bool needs_data) {
  auto* e = app->add_option("--embeddings", f.embeddings, "Embedding matrix file");
  auto* s = app->add_option("--samples", f.samples, "Sample table (CSV)");
  if (needs_data) {
    e->required();
    s->required();
  }
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  app->add_option("--threads", f.threads,
                  "Worker threads (0 = FAIRHEAD_THREADS or hardware)");
}

void AddExperiment(CLI::App* app, ExperimentFlags& f) {
  app->add_option("--config", f.config, "Experiment config file (key = value)");
  f.head_opt = app->add_option("--head", f.head,
                               "gbt|logistic_regression|decision_tree|random_forest|"
                               "balanced_random_forest|mlp|knn|adversarial_mlp");
  f.strategies_opt = app->add_option(
      "--strategies", f.strategies,
      "Comma list of reweight,augment,active_learning,adversarial");
  f.repeats_opt = app->add_option("--repeats", f.repeats, "Independent repeats");
  f.variance_opt =
      app->add_option("--variance-target", f.variance_target, "PCA retained variance");
  f.al_initial_opt = app->add_option("--al-initial", f.al_initial, "Initial labeled pool");
  f.al_batch_opt = app->add_option("--al-batch", f.al_batch, "Samples added per round");
  f.al_rounds_opt = app->add_option("--al-rounds", f.al_rounds, "Acquisition rounds");
  f.al_strategy_opt =
      app->add_option("--al-strategy", f.al_strategy, "uncertainty|diversity");
}

// Defaults, then the config file, then flags. Errors are usage errors.
mitigate::ExperimentConfig ParseExperiment(const KvConfig& c, int threads) {
  mitigate::ExperimentConfig cfg;
  try {
    cfg = mitigate::ExperimentConfig::FromConfig(c);
  } catch (const Error& e) {
    throw Usage(fmt::format("invalid experiment settings: {}", e.what()));
  }
  cfg.threads = threads;
  return cfg;
}

KvConfig EffectiveConfig(const ExperimentFlags& f, const CommonFlags& common,
                         const std::optional<std::string>& strategies_override = {}) {
  KvConfig c = mitigate::ExperimentConfig{}.ToConfig();
  if (!f.config.empty()) c.Merge(KvConfig::Load(f.config));
  if (f.head_opt && f.head_opt->count()) c.Set("head", f.head);
  if (strategies_override) {
    c.Set("strategies", *strategies_override);
  } else if (f.strategies_opt && f.strategies_opt->count()) {
    c.Set("strategies", f.strategies);
  }
  if (f.repeats_opt && f.repeats_opt->count()) c.Set("repeats", std::to_string(f.repeats));
  if (f.variance_opt && f.variance_opt->count()) {
    c.Set("variance_target", FormatDouble(f.variance_target));
  }
  if (f.al_initial_opt && f.al_initial_opt->count()) {
    c.Set("al.initial_pool", std::to_string(f.al_initial));
  }
  if (f.al_batch_opt && f.al_batch_opt->count()) {
    c.Set("al.batch_size", std::to_string(f.al_batch));
  }
  if (f.al_rounds_opt && f.al_rounds_opt->count()) {
    c.Set("al.rounds", std::to_string(f.al_rounds));
  }
  if (f.al_strategy_opt && f.al_strategy_opt->count()) c.Set("al.strategy", f.al_strategy);
  c.Set("seed", std::to_string(common.seed));
  // Canonical form, so aliases and defaults hash identically.
  return ParseExperiment(c, 0).ToConfig();
}

Dataset LoadData(const CommonFlags& f) {
  Dataset d;
  d.embeddings = dataio::ReadEmbeddings(f.embeddings);
  const dataio::SampleTable table = dataio::ReadSamples(f.samples);
  if (table.size() != d.embeddings.size()) {
    throw Error(ErrorCode::kIdMismatch,
                fmt::format("{} embeddings but {} samples", d.embeddings.size(),
                            table.size()));
  }
  std::unordered_map<std::string, int> row_of;
  for (size_t i = 0; i < table.size(); ++i) row_of[table[i].id] = static_cast<int>(i);
  std::vector<int> order;
  order.reserve(table.size());
  for (const auto& id : d.embeddings.ids) {
    const auto it = row_of.find(id);
    if (it == row_of.end()) {
      throw Error(ErrorCode::kIdMismatch, fmt::format("id '{}' has no sample row", id));
    }
    order.push_back(it->second);
  }
  d.samples = table.Select(order);
  return d;
}

Matrix Rows(const Matrix& x, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(i) = x.row(rows[i]);
  return out;
}

std::vector<int> Gather(const std::vector<int>& v, const std::vector<int>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (int r : rows) out.push_back(v[r]);
  return out;
}

Axis ParseAxisFlag(const std::string& text, const char* flag) {
  try {
    return dataio::ParseAxis(text);
  } catch (const Error&) {
    throw Usage(fmt::format("{} '{}': expected sex, age or race", flag, text));
  }
}

struct RowFilter {
  Axis axis;
  int group;
};

std::vector<RowFilter> ParseFilters(const std::vector<std::string>& specs) {
  std::vector<RowFilter> out;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw Usage(fmt::format("--filter '{}': expected axis=group, e.g. sex=female", spec));
    }
    const Axis axis = ParseAxisFlag(spec.substr(0, eq), "--filter");
    const int group = dataio::AxisGroupIndex(axis, spec.substr(eq + 1));
    if (group < 0) {
      throw Usage(fmt::format("--filter '{}': unknown group on axis {}", spec,
                              dataio::AxisName(axis)));
    }
    out.push_back({axis, group});
  }
  return out;
}

std::vector<int> ApplyFilters(const dataio::SampleTable& samples,
                              const std::vector<int>& rows,
                              const std::vector<RowFilter>& filters) {
  std::vector<std::vector<int>> groups;
  for (const auto& f : filters) groups.push_back(samples.AllGroups(f.axis));
  std::vector<int> out;
  for (int r : rows) {
    bool keep = true;
    for (size_t k = 0; k < filters.size(); ++k) {
      keep = keep && groups[k][r] == filters[k].group;
    }
    if (keep) out.push_back(r);
  }
  return out;
}

void Finish(Json& doc, const CommonFlags& common, const std::string& summary) {
  EmitReport(doc, common.out);
  std::cout << summary;
  std::cout << fmt::format("report written to {}\n", (fs::path(common.out) / "report.json").string());
}

Json InputsJson(const CommonFlags& f) {
  return Json{{"embeddings", fs::path(f.embeddings).filename().string()},
              {"samples", fs::path(f.samples).filename().string()}};
}

// Subcommands.

struct SynthFlags {
  int n = 20000;
  int dim = 32;
  double noise = 0.0;
  std::string degraded;
  std::vector<std::string> signals;
  double missing_rate = 0.0;
  std::string spec;
  CLI::Option* dim_opt = nullptr;
  CLI::Option* noise_opt = nullptr;
  CLI::Option* missing_opt = nullptr;
};

int RunSynth(const CommonFlags& common, const SynthFlags& f) {
  KvConfig c;
  if (!f.spec.empty()) c = KvConfig::Load(f.spec);
  if (f.dim_opt->count()) c.Set("dim", std::to_string(f.dim));
  if (f.noise_opt->count()) c.Set("label_noise_rate", FormatDouble(f.noise));
  if (f.missing_opt->count()) c.Set("missing_rate", FormatDouble(f.missing_rate));
  if (!f.degraded.empty()) c.Set("degraded_group", f.degraded);
  for (const auto& s : f.signals) {
    const auto first = s.find(':');
    if (first == std::string::npos) {
      throw Usage(fmt::format("--signal '{}': expected axis:dim:strength, e.g. sex:31:2.0", s));
    }
    const Axis axis = ParseAxisFlag(s.substr(0, first), "--signal");
    c.Set(fmt::format("signal.{}", dataio::AxisName(axis)), s.substr(first + 1));
  }
  dataio::OracleSpec spec;
  try {
    spec = dataio::OracleSpec::FromConfig(c);
    spec.Validate();
  } catch (const Error& e) {
    throw Usage(fmt::format("invalid synthetic spec: {}", e.what()));
  }
  if (f.n <= 0) throw Usage("--n must be positive");
  const auto data = dataio::GenerateSynthetic(spec, f.n, common.seed);
  std::error_code ec;
  fs::create_directories(common.out, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + common.out);
  const fs::path out(common.out);
  dataio::WriteEmbeddings(data.embeddings, out / "embeddings.bin");
  dataio::WriteSamples(data.samples, out / "samples.csv");
  KvConfig spec_cfg = data.spec.ToConfig();
  spec_cfg.Set("seed", std::to_string(common.seed));
  spec_cfg.Set("n", std::to_string(f.n));
  spec_cfg.Save(out / "oracle_spec.cfg");
  std::cout << fmt::format("wrote {} samples (dim {}) to {}\n", f.n, spec.dim,
                           out.string());
  return kExitOk;
}

// Fits the baseline pipeline once and returns the model and the reports.
mitigate::RepeatResult FitOnce(const Dataset& d, const mitigate::ExperimentConfig& cfg,
                               heads::MultiHeadModel* model) {
  return mitigate::RunRepeat(d.embeddings.data, d.samples, cfg, cfg.seed, model);
}

int RunDetect(const CommonFlags& common, const ExperimentFlags& ef) {
  const KvConfig effective = EffectiveConfig(ef, common, std::string("none"));
  const auto cfg = ParseExperiment(effective, common.threads);
  const Dataset d = LoadData(common);
  Json doc = NewReport("detect", effective, common.seed);
  doc["metadata"]["inputs"] = InputsJson(common);
  auto& sections = doc["sections"];

  sections["prevalence"] = PrevalenceJson(detect::ComputePrevalence(d.samples));
  const auto leakage = detect::LeakageProbe(d.embeddings.data, d.samples);
  sections["leakage"] = LeakageJson(leakage);

  heads::MultiHeadModel model;
  const auto run = FitOnce(d, cfg, &model);
  AppendSection(doc, "fairness", FairnessJson("test", run.test_report));

  const std::vector<int> test = d.samples.SplitIndices(dataio::Split::kTest);
  const Matrix test_x = model.pca->Transform(Rows(d.embeddings.data, test));
  if (cfg.head == heads::HeadKind::kGbt) {
    std::vector<int> pick(test.size());
    for (size_t i = 0; i < pick.size(); ++i) pick[i] = static_cast<int>(i);
    if (static_cast<int>(pick.size()) > kMaxShapSamples) {
      Rng rng(Rng::Derive(common.seed, 21));
      std::vector<int> sampled;
      for (size_t i = 0; i < pick.size(); ++i) {
        const size_t j = i + static_cast<size_t>(rng.UniformInt(pick.size() - i));
        std::swap(pick[i], pick[j]);
        sampled.push_back(pick[i]);
        if (static_cast<int>(sampled.size()) == kMaxShapSamples) break;
      }
      std::sort(sampled.begin(), sampled.end());
      pick = std::move(sampled);
    }
    const Matrix x = Rows(test_x, pick);
    std::vector<detect::AxisGroups> axes;
    for (Axis axis : dataio::kAllAxes) {
      axes.push_back({std::string(dataio::AxisName(axis)),
                      Gather(Gather(d.samples.MetricGroups(axis), test), pick),
                      dataio::AxisGroupNames(axis)});
    }
    sections["direction"] = Json::array();
    for (int c = 0; c < model.num_conditions(); ++c) {
      const auto* head = dynamic_cast<const heads::GbtHead*>(model.heads[c].get());
      if (!head) continue;
      const auto table =
          detect::DirectionConsistency(head->model(), x, axes, detect::kDefaultTopK,
                                       common.threads);
      sections["direction"].push_back(DirectionJson(model.condition_names[c], table));
    }
  }

  const std::vector<int> train = d.samples.SplitIndices(dataio::Split::kTrain);
  const Matrix proj = detect::Projection2d(Rows(d.embeddings.data, train),
                                           Rows(d.embeddings.data, test));
  Json points = Json::array();
  for (size_t i = 0; i < test.size(); ++i) {
    const auto& s = d.samples[test[i]];
    points.push_back(Json{{"id", s.id},
                          {"x", proj(i, 0)},
                          {"y", proj.cols() > 1 ? proj(i, 1) : 0.0},
                          {"sex", std::string(dataio::SexName(s.sex))},
                          {"age", std::string(dataio::AgeGroupName(s.age_group()))},
                          {"race", std::string(dataio::RaceName(s.race))}});
  }
  sections["projection"] = Json{{"points", std::move(points)}};

  const auto& r = run.test_report;
  Finish(doc, common,
         fmt::format("leakage auc sex {} age {} race {}\n"
                     "test auprc {} delta sex {} age {} race {}\n",
                     metrics::FormatPercentagePoints(leakage.sex_auc),
                     metrics::FormatPercentagePoints(leakage.age_auc),
                     metrics::FormatPercentagePoints(leakage.race_auc),
                     metrics::FormatPercentagePoints(r.mean_auprc),
                     metrics::FormatPercentagePoints(r.mean_delta[0]),
                     metrics::FormatPercentagePoints(r.mean_delta[1]),
                     metrics::FormatPercentagePoints(r.mean_delta[2])));
  return kExitOk;
}

int RunTrain(const CommonFlags& common, const ExperimentFlags& ef) {
  const KvConfig effective = EffectiveConfig(ef, common);
  const auto cfg = ParseExperiment(effective, common.threads);
  const Dataset d = LoadData(common);
  heads::MultiHeadModel model;
  const auto run = FitOnce(d, cfg, &model);
  Json doc = NewReport("train", effective, common.seed);
  doc["metadata"]["inputs"] = InputsJson(common);
  AppendSection(doc, "fairness", FairnessJson("val", run.val_report));
  AppendSection(doc, "fairness", FairnessJson("test", run.test_report));
  if (!run.history.empty()) {
    AppendSection(doc, "active_learning", HistoryJson("train", run.history));
  }
  EmitReport(doc, common.out);
  model.Save(fs::path(common.out) / "model.fmh");
  std::cout << fmt::format("model written to {} (pca components {})\n",
                           (fs::path(common.out) / "model.fmh").string(),
                           run.pca_components);
  std::cout << fmt::format("test auprc {} composite {}\n",
                           metrics::FormatPercentagePoints(run.test_report.mean_auprc),
                           metrics::FormatPercentagePoints(run.test_report.composite));
  return kExitOk;
}

struct EvaluateFlags {
  std::string model;
  double recall_floor = detect::kDefaultRecallFloor;
  std::string axis = "race";
  std::vector<std::string> filters;
  std::string condition;
};

// Threshold analysis of one model on the filtered val/test rows.
void EvaluateModel(const std::string& label, const heads::MultiHeadModel& model,
                   const Dataset& d, const EvaluateFlags& f,
                   const std::vector<RowFilter>& filters, Axis axis, Json& doc,
                   std::string& summary) {
  const auto val = ApplyFilters(d.samples, d.samples.SplitIndices(dataio::Split::kVal),
                                filters);
  const auto test = ApplyFilters(d.samples, d.samples.SplitIndices(dataio::Split::kTest),
                                 filters);
  if (val.empty() || test.empty()) {
    throw Error(ErrorCode::kEmptyGroup, "filters leave no validation or test rows");
  }
  const Matrix val_p = model.PredictProbaEmbeddings(Rows(d.embeddings.data, val));
  const Matrix test_p = model.PredictProbaEmbeddings(Rows(d.embeddings.data, test));

  std::vector<int> columns;
  std::vector<int> sample_index;
  for (int c = 0; c < model.num_conditions(); ++c) {
    sample_index.push_back(d.samples.ConditionIndex(model.condition_names[c]));
    if (sample_index.back() < 0) {
      throw Error(ErrorCode::kMissingColumn,
                  fmt::format("condition '{}' not in samples", model.condition_names[c]));
    }
  }
  if (filters.empty()) {
    const auto test_report =
        detect::BuildBiasReport(test_p, d.samples.Select(test), sample_index);
    AppendSection(doc, "fairness", FairnessJson(label, test_report));
  }

  const auto labeled = [&](const std::vector<int>& rows, const Matrix& p, int c,
                           std::vector<double>& scores, std::vector<int>& labels,
                           std::vector<int>* kept) {
    for (size_t i = 0; i < rows.size(); ++i) {
      const int y = d.samples[rows[i]].labels[sample_index[c]];
      if (y == dataio::kMissingLabel) continue;
      scores.push_back(p(i, c));
      labels.push_back(y);
      if (kept) kept->push_back(static_cast<int>(i));
    }
  };

  if (!f.condition.empty()) {
    for (int c = 0; c < model.num_conditions(); ++c) {
      if (model.condition_names[c] == f.condition) columns.push_back(c);
    }
    if (columns.empty()) {
      throw Usage(fmt::format("--condition '{}': not one of the model's conditions",
                              f.condition));
    }
  } else {
    std::vector<double> aucs;
    std::vector<double> rates;
    for (int c = 0; c < model.num_conditions(); ++c) {
      std::vector<double> vs;
      std::vector<int> vl;
      labeled(val, val_p, c, vs, vl, nullptr);
      const int pos = static_cast<int>(std::count(vl.begin(), vl.end(), 1));
      const bool both = pos > 0 && pos < static_cast<int>(vl.size());
      aucs.push_back(both ? metrics::RocAuc(vs, vl) : 0.0);
      rates.push_back(vl.empty() ? 0.0 : static_cast<double>(pos) / vl.size());
    }
    columns = heads::FilterConditions(aucs, rates);
  }

  const std::vector<int> test_groups = Gather(d.samples.MetricGroups(axis), test);
  for (int c : columns) {
    std::vector<double> vs, ts;
    std::vector<int> vl, tl, kept;
    labeled(val, val_p, c, vs, vl, nullptr);
    labeled(test, test_p, c, ts, tl, &kept);
    const std::vector<int> tg = Gather(test_groups, kept);
    const auto analysis = detect::AnalyzeThreshold(
        vs, vl, ts, tl, tg, dataio::AxisGroupNames(axis), f.recall_floor);
    AppendSection(doc, "threshold",
                  ThresholdJson(label, model.condition_names[c],
                                std::string(dataio::AxisName(axis)), analysis));
    summary += fmt::format("{} {}: threshold {:.6f} recall {} dFNR {} EO {}\n", label,
                           model.condition_names[c], analysis.threshold,
                           metrics::FormatPercentagePoints(analysis.overall.tpr),
                           metrics::FormatPercentagePoints(analysis.delta_fnr),
                           metrics::FormatPercentagePoints(analysis.eo_gap));
  }
}

int RunEvaluate(const CommonFlags& common, const ExperimentFlags& ef,
                const EvaluateFlags& f) {
  const Axis axis = ParseAxisFlag(f.axis, "--axis");
  const auto filters = ParseFilters(f.filters);
  if (!(f.recall_floor > 0.0 && f.recall_floor <= 1.0)) {
    throw Usage("--recall-floor: expected a value in (0, 1]");
  }
  const KvConfig effective_after = EffectiveConfig(ef, common);
  const auto cfg_after = ParseExperiment(effective_after, common.threads);
  KvConfig effective = effective_after;
  effective.Set("recall_floor", FormatDouble(f.recall_floor));
  effective.Set("axis", std::string(dataio::AxisName(axis)));
  std::string filter_text;
  for (const auto& s : f.filters) filter_text += (filter_text.empty() ? "" : ",") + s;
  effective.Set("filter", filter_text);
  effective.Set("condition", f.condition);
  if (!f.model.empty()) effective.Set("model", fs::path(f.model).filename().string());

  const Dataset d = LoadData(common);
  Json doc = NewReport("evaluate", effective, common.seed);
  doc["metadata"]["inputs"] = InputsJson(common);
  std::string summary;
  if (!f.model.empty()) {
    const auto model = heads::MultiHeadModel::Load(f.model);
    EvaluateModel("model", model, d, f, filters, axis, doc, summary);
  } else {
    auto cfg_before = cfg_after;
    cfg_before.strategies.clear();
    heads::MultiHeadModel before;
    FitOnce(d, cfg_before, &before);
    EvaluateModel("before", before, d, f, filters, axis, doc, summary);
    if (!cfg_after.strategies.empty()) {
      heads::MultiHeadModel after;
      FitOnce(d, cfg_after, &after);
      EvaluateModel("after", after, d, f, filters, axis, doc, summary);
    }
  }
  Finish(doc, common, summary);
  return kExitOk;
}

std::string AggregateLine(const std::string& label, const mitigate::RunResult& r) {
  std::string line = label;
  for (const char* name : {"auprc.mean", "delta.sex", "delta.age", "delta.race"}) {
    if (const auto* a = r.Aggregate(name)) {
      line += fmt::format(" {} {} [{}, {}]", name, metrics::FormatPercentagePoints(a->mean),
                          metrics::FormatPercentagePoints(a->ci_low),
                          metrics::FormatPercentagePoints(a->ci_high));
    } else if (const auto* v = r.Values(name); v && !v->empty()) {
      line += fmt::format(" {} {}", name, metrics::FormatPercentagePoints((*v)[0]));
    }
  }
  return line + "\n";
}

int RunMitigate(const CommonFlags& common, const ExperimentFlags& ef) {
  std::vector<std::string> sets = {"none"};
  if (ef.strategies_opt->count()) {
    for (const auto& s : SplitString(ef.strategies, ';')) {
      if (!Trim(s).empty()) sets.emplace_back(Trim(s));
    }
  }
  std::vector<mitigate::ExperimentConfig> cfgs;
  for (const auto& s : sets) {
    cfgs.push_back(ParseExperiment(EffectiveConfig(ef, common, s), common.threads));
  }
  KvConfig effective = EffectiveConfig(ef, common, std::string("none"));
  std::string joined;
  for (size_t i = 1; i < sets.size(); ++i) joined += (i > 1 ? ";" : "") + sets[i];
  effective.Set("strategies", joined);
  const Dataset d = LoadData(common);
  Json doc = NewReport("mitigate", effective, common.seed);
  doc["metadata"]["inputs"] = InputsJson(common);
  std::string summary;
  for (size_t i = 0; i < cfgs.size(); ++i) {
    const std::string label =
        cfgs[i].strategies.empty() ? "baseline" : mitigate::FormatStrategies(cfgs[i].strategies);
    spdlog::info("running {} ({} repeats)", label, cfgs[i].n_repeats);
    const auto result = mitigate::RunExperiment(d.embeddings.data, d.samples, cfgs[i]);
    AppendSection(doc, "mitigation", RunResultJson(label, cfgs[i], result));
    for (size_t r = 0; r < result.repeats.size(); ++r) {
      if (!result.repeats[r].history.empty()) {
        AppendSection(doc, "active_learning",
                      HistoryJson(fmt::format("{} repeat {}", label, r),
                                  result.repeats[r].history));
      }
    }
    summary += AggregateLine(label, result);
  }
  Finish(doc, common, summary);
  return kExitOk;
}

int RunActiveLearn(const CommonFlags& common, const ExperimentFlags& ef) {
  std::string strategies = "active_learning";
  if (ef.strategies_opt->count() && !Trim(ef.strategies).empty() &&
      Trim(ef.strategies) != "none") {
    strategies += "," + ef.strategies;
  }
  const KvConfig effective = EffectiveConfig(ef, common, strategies);
  const auto cfg = ParseExperiment(effective, common.threads);
  const Dataset d = LoadData(common);
  Json doc = NewReport("active-learn", effective, common.seed);
  doc["metadata"]["inputs"] = InputsJson(common);
  const auto result = mitigate::RunExperiment(d.embeddings.data, d.samples, cfg);
  const std::string label = mitigate::FormatStrategies(cfg.strategies);
  AppendSection(doc, "mitigation", RunResultJson(label, cfg, result));
  std::string summary;
  for (size_t r = 0; r < result.repeats.size(); ++r) {
    const auto& history = result.repeats[r].history;
    AppendSection(doc, "active_learning",
                  HistoryJson(fmt::format("repeat {}", r), history));
    std::string sizes;
    for (const auto& h : history) {
      sizes += (sizes.empty() ? "" : ",") + std::to_string(h.labeled_size);
    }
    summary += fmt::format("repeat {} labeled sizes {}\n", r, sizes);
  }
  summary += AggregateLine(label, result);
  Finish(doc, common, summary);
  return kExitOk;
}

std::vector<KvConfig> LoadGrid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open grid file " + path);
  std::vector<KvConfig> grid;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    KvConfig c;
    std::istringstream fields{std::string(t)};
    std::string field;
    while (fields >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorCode::kInvalidSpec,
                    fmt::format("{}:{}: '{}' is not key=value", path, line_no, field));
      }
      c.Set(field.substr(0, eq), field.substr(eq + 1));
    }
    grid.push_back(std::move(c));
  }
  if (grid.empty()) throw Error(ErrorCode::kInvalidSpec, path + ": empty grid");
  return grid;
}

int RunTune(const CommonFlags& common, const ExperimentFlags& ef, const std::string& grid_path) {
  const KvConfig effective = EffectiveConfig(ef, common);
  const auto cfg = ParseExperiment(effective, common.threads);
  const auto grid = LoadGrid(grid_path);
  const Dataset d = LoadData(common);
  const auto result = mitigate::TuneHeadParams(d.embeddings.data, d.samples, cfg, grid);
  Json doc = NewReport("tune", effective, common.seed);
  doc["metadata"]["inputs"] = InputsJson(common);
  Json candidates = Json::array();
  for (size_t i = 0; i < grid.size(); ++i) {
    Json overrides = Json::object();
    for (const auto& [k, v] : grid[i].entries()) overrides[k] = v;
    candidates.push_back(Json{{"index", static_cast<int>(i)},
                              {"overrides", std::move(overrides)},
                              {"score", result.scores[i]}});
  }
  doc["sections"]["tuning"] =
      Json{{"objective", "validation composite"},
           {"best_index", result.best_index},
           {"candidates", std::move(candidates)}};
  Finish(doc, common,
         fmt::format("best candidate {} composite {}\n", result.best_index,
                     metrics::FormatPercentagePoints(result.scores[result.best_index])));
  return kExitOk;
}

int RunReport(const std::string& from, const std::string& out) {
  const Json doc = LoadReport(from);
  EmitReport(doc, out);
  std::cout << fmt::format("report rendered to {}\n", out);
  return kExitOk;
}

void ApplyThreads(int threads) {
  if (threads > 0) {
    SetDefaultThreads(threads);
    return;
  }
  if (const char* env = std::getenv("FAIRHEAD_THREADS")) {
    try {
      SetDefaultThreads(static_cast<int>(ParseInt(env, "FAIRHEAD_THREADS")));
    } catch (const Error& e) {
      throw Usage(e.what());
    }
  }
}

int Run(int argc, const char* const* argv) {
  CLI::App app{"Subgroup fairness analysis and mitigation for classifier heads "
               "on frozen embeddings",
               "fairhead"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommonFlags common;
  // One set per subcommand: option pointers are per-app.
  ExperimentFlags det_f, train_f, eval_f, mit_f, al_f, tune_f;
  SynthFlags sf;
  EvaluateFlags evf;
  std::string grid;
  std::string from;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic benchmark");
  AddCommon(synth, common, false);
  synth->add_option("--n", sf.n, "Number of samples")->capture_default_str();
  sf.dim_opt = synth->add_option("--dim", sf.dim, "Embedding dimension");
  sf.noise_opt = synth->add_option("--noise", sf.noise,
                                   "Label noise rate on the degraded group");
  synth->add_option("--degraded", sf.degraded, "Degraded group as axis:group");
  synth->add_option("--signal", sf.signals,
                    "Demographic signal as axis:dim:strength (repeatable)");
  sf.missing_opt = synth->add_option("--missing-rate", sf.missing_rate,
                                     "Fraction of missing labels");
  synth->add_option("--spec", sf.spec, "Oracle spec file (key = value)");

  auto* det = app.add_subcommand("detect", "Prevalence, leakage, direction and bias report");
  AddCommon(det, common, true);
  AddExperiment(det, det_f);

  auto* train = app.add_subcommand("train", "Train a multi-condition head and save it");
  AddCommon(train, common, true);
  AddExperiment(train, train_f);

  auto* eval = app.add_subcommand("evaluate", "Threshold and equalized-odds analysis");
  AddCommon(eval, common, true);
  AddExperiment(eval, eval_f);
  eval->add_option("--model", evf.model, "Saved model (trained on the fly if omitted)");
  eval->add_option("--recall-floor", evf.recall_floor, "Minimum validation recall")
      ->capture_default_str();
  eval->add_option("--axis", evf.axis, "Axis for group rates")->capture_default_str();
  eval->add_option("--filter", evf.filters, "Row filter axis=group (repeatable)");
  eval->add_option("--condition", evf.condition, "Single condition to analyze");

  auto* mit = app.add_subcommand("mitigate", "Compare mitigation strategies to baseline");
  AddCommon(mit, common, true);
  AddExperiment(mit, mit_f);

  auto* al = app.add_subcommand("active-learn", "Pool-based active learning run");
  AddCommon(al, common, true);
  AddExperiment(al, al_f);

  auto* tune = app.add_subcommand("tune", "Grid search scored by validation composite");
  AddCommon(tune, common, true);
  AddExperiment(tune, tune_f);
  tune->add_option("--grid", grid, "Grid file, one candidate of key=value pairs per line")
      ->required();

  auto* rep = app.add_subcommand("report", "Render tables and plots from report.json");
  rep->add_option("--from", from, "report.json path")->required();
  rep->add_option("--out", common.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  ApplyThreads(common.threads);
  if (*synth) return RunSynth(common, sf);
  if (*det) return RunDetect(common, det_f);
  if (*train) return RunTrain(common, train_f);
  if (*eval) return RunEvaluate(common, eval_f, evf);
  if (*mit) return RunMitigate(common, mit_f);
  if (*al) return RunActiveLearn(common, al_f);
  if (*tune) return RunTune(common, tune_f, grid);
  return RunReport(from, common.out);
}

}  // namespace

int CliMain(int argc, const char* const* argv) {
  static const auto logger = [] {
    auto l = spdlog::stderr_color_mt("fairhead");
    spdlog::set_default_logger(l);
    spdlog::set_pattern("[%l] %v");
    return l;
  }();
  (void)logger;
  try {
    return Run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kUsage ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int RunCli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"fairhead"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return CliMain(static_cast<int>(argv.size()), argv.data());
}

}  // namespace fairhead::cli
