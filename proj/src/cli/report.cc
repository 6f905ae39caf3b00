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

#include "fairhead/cli/report.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <fmt/format.h>

#include "fairhead/common/error.h"
#include "fairhead/dataio/samples.h"

namespace fairhead::cli {
namespace {

namespace fs = std::filesystem;

std::string Pp(double v) { return metrics::FormatPercentagePoints(v); }

std::string Num(double v) {
  if (!std::isfinite(v)) return "nan";
  return fmt::format("{:.6f}", v);
}

double AsDouble(const Json& v) {
  return v.is_number() ? v.get<double>() : std::nan("");
}

std::string PpJson(const Json& v) {
  return v.is_number() ? Pp(v.get<double>()) : "nan";
}

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string SafeName(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out.empty() ? "unnamed" : out;
}

std::string XmlEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) { Row(header); }
  void Row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += CsvField(cells[i]);
    }
    text_ += '\n';
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

Json RatesJson(const metrics::ConfusionRates& r) {
  return Json{{"tpr", r.tpr}, {"fpr", r.fpr}, {"fnr", r.fnr}, {"tnr", r.tnr}};
}

// Sections.

void EmitPrevalence(const Json& s, const fs::path& dir) {
  if (!s.contains("cells") || s["cells"].empty()) return;
  Csv csv({"axis", "group", "condition", "negatives", "positives",
           "negative_share", "positive_share", "positive_rate"});
  for (const auto& c : s["cells"]) {
    csv.Row({c["axis"], c["group"], c["condition"],
             std::to_string(c["negatives"].get<int>()),
             std::to_string(c["positives"].get<int>()), PpJson(c["negative_share"]),
             PpJson(c["positive_share"]), PpJson(c["positive_rate"])});
  }
  WriteText(dir / "prevalence.csv", csv.text());
}

void EmitLeakage(const Json& s, const fs::path& dir) {
  Csv csv({"axis", "probe_auc"});
  for (const char* axis : {"sex", "age", "race"}) {
    if (s.contains(axis)) csv.Row({axis, PpJson(s[axis])});
  }
  WriteText(dir / "leakage.csv", csv.text());
}

void EmitDirection(const Json& s, const fs::path& dir) {
  for (const auto& entry : s) {
    if (entry["rows"].empty()) continue;
    std::vector<std::string> header = {"feature", "mean_abs_phi"};
    std::vector<std::string> axes;
    for (const auto& a : entry["axes"]) axes.push_back(a.get<std::string>());
    for (const auto& a : axes) header.push_back(a + "_direction");
    Csv csv(header);
    for (const auto& row : entry["rows"]) {
      std::vector<std::string> cells = {std::to_string(row["feature"].get<int>()),
                                        Num(AsDouble(row["mean_abs_phi"]))};
      for (const auto& a : axes) cells.push_back(row["verdicts"][a]);
      csv.Row(cells);
    }
    WriteText(dir / ("direction_" + SafeName(entry["condition"].get<std::string>()) +
                     ".csv"),
              csv.text());
  }
}

void EmitFairness(const Json& s, const fs::path& dir) {
  if (s.empty()) return;
  Csv table({"label", "condition", "count", "positives", "auprc", "roc_auc",
             "delta_sex", "delta_age", "delta_race", "composite"});
  Csv groups({"label", "condition", "axis", "group", "count", "positives",
              "auprc"});
  for (const auto& rep : s) {
    const std::string label = rep["label"];
    std::vector<std::string> categories;
    std::vector<BarSeries> series = {{"AUPRC", {}, {}, {}},
                                     {"delta sex", {}, {}, {}},
                                     {"delta age", {}, {}, {}},
                                     {"delta race", {}, {}, {}}};
    for (const auto& c : rep["conditions"]) {
      std::vector<std::string> row = {label,
                                      c["condition"],
                                      std::to_string(c["count"].get<int>()),
                                      std::to_string(c["positives"].get<int>()),
                                      PpJson(c["auprc"]),
                                      PpJson(c["roc_auc"])};
      categories.push_back(c["condition"]);
      series[0].values.push_back(AsDouble(c["auprc"]) * 100.0);
      size_t k = 1;
      for (const auto& ax : c["axes"]) {
        row.push_back(PpJson(ax["delta"]));
        if (k < series.size()) series[k++].values.push_back(AsDouble(ax["delta"]) * 100.0);
        for (const auto& g : ax["groups"]) {
          groups.Row({label, c["condition"], ax["axis"], g["name"],
                      std::to_string(g["count"].get<int>()),
                      std::to_string(g["positives"].get<int>()), PpJson(g["auprc"])});
        }
      }
      row.push_back("");
      table.Row(row);
    }
    table.Row({label, "mean", "", "", PpJson(rep["mean_auprc"]), "",
               PpJson(rep["mean_delta"]["sex"]), PpJson(rep["mean_delta"]["age"]),
               PpJson(rep["mean_delta"]["race"]), PpJson(rep["composite"])});
    categories.push_back("mean");
    series[0].values.push_back(AsDouble(rep["mean_auprc"]) * 100.0);
    series[1].values.push_back(AsDouble(rep["mean_delta"]["sex"]) * 100.0);
    series[2].values.push_back(AsDouble(rep["mean_delta"]["age"]) * 100.0);
    series[3].values.push_back(AsDouble(rep["mean_delta"]["race"]) * 100.0);
    WriteText(dir / ("fairness_" + SafeName(label) + ".svg"),
              GroupedBarSvg("Performance and subgroup gaps: " + label,
                            "percentage points", categories, series));
  }
  WriteText(dir / "fairness.csv", table.text());
  WriteText(dir / "subgroups.csv", groups.text());
}

void EmitMitigation(const Json& s, const fs::path& dir) {
  if (s.empty()) return;
  Csv csv({"label", "strategies", "metric", "mean", "std", "ci_low", "ci_high",
           "n_runs"});
  const std::vector<std::string> plotted = {"auprc.mean", "delta.sex", "delta.age",
                                            "delta.race"};
  std::vector<BarSeries> series;
  for (const auto& run : s) {
    const std::string label = run["label"];
    BarSeries bars{label, {}, {}, {}};
    for (const auto& [name, agg] : run["aggregates"].items()) {
      csv.Row({label, run["strategies"], name, PpJson(agg["mean"]), PpJson(agg["std"]),
               PpJson(agg["ci_low"]), PpJson(agg["ci_high"]),
               std::to_string(agg["n_runs"].get<int>())});
    }
    for (const auto& name : plotted) {
      const Json& agg = run["aggregates"].contains(name) ? run["aggregates"][name]
                                                         : Json::object();
      const double mean = agg.contains("mean") ? AsDouble(agg["mean"]) : 0.0;
      bars.values.push_back(mean * 100.0);
      bars.low.push_back((agg.contains("ci_low") ? AsDouble(agg["ci_low"]) : mean) * 100.0);
      bars.high.push_back((agg.contains("ci_high") ? AsDouble(agg["ci_high"]) : mean) *
                          100.0);
    }
    series.push_back(std::move(bars));
  }
  WriteText(dir / "mitigation.csv", csv.text());
  WriteText(dir / "mitigation.svg",
            GroupedBarSvg("Mitigation comparison (mean, 95% CI)", "percentage points",
                          {"AUPRC", "delta sex", "delta age", "delta race"}, series));
}

void EmitThreshold(const Json& s, const fs::path& dir) {
  if (s.empty()) return;
  Csv groups({"label", "condition", "axis", "group", "count", "positives", "tpr",
              "fpr", "fnr"});
  Csv gaps({"label", "condition", "axis", "recall_floor", "threshold", "recall",
            "delta_fnr", "delta_tpr", "delta_fpr", "eo_gap"});
  for (const auto& t : s) {
    for (const auto& g : t["groups"]) {
      groups.Row({t["label"], t["condition"], t["axis"], g["group"],
                  std::to_string(g["count"].get<int>()),
                  std::to_string(g["positives"].get<int>()), PpJson(g["tpr"]),
                  PpJson(g["fpr"]), PpJson(g["fnr"])});
    }
    gaps.Row({t["label"], t["condition"], t["axis"], PpJson(t["recall_floor"]),
              Num(AsDouble(t["threshold"])), PpJson(t["overall"]["tpr"]),
              PpJson(t["delta_fnr"]), PpJson(t["delta_tpr"]), PpJson(t["delta_fpr"]),
              PpJson(t["eo_gap"])});
  }
  WriteText(dir / "threshold.csv", groups.text());
  WriteText(dir / "threshold_gaps.csv", gaps.text());
}

void EmitActiveLearning(const Json& s, const fs::path& dir) {
  if (s.empty()) return;
  Csv csv({"label", "round", "labeled_size", "selected", "score"});
  for (const auto& h : s) {
    int round = 0;
    for (const auto& r : h["history"]) {
      csv.Row({h["label"], std::to_string(round++),
               std::to_string(r["labeled_size"].get<int>()),
               std::to_string(r["selected"].get<int>()), PpJson(r["score"])});
    }
  }
  WriteText(dir / "active_learning.csv", csv.text());
}

void EmitTuning(const Json& s, const fs::path& dir) {
  if (!s.contains("candidates") || s["candidates"].empty()) return;
  Csv csv({"index", "overrides", "score", "best"});
  const int best = s["best_index"].get<int>();
  for (const auto& c : s["candidates"]) {
    std::string overrides;
    for (const auto& [k, v] : c["overrides"].items()) {
      if (!overrides.empty()) overrides += ' ';
      overrides += k + "=" + v.get<std::string>();
    }
    const int index = c["index"].get<int>();
    csv.Row({std::to_string(index), overrides, PpJson(c["score"]),
             index == best ? "1" : "0"});
  }
  WriteText(dir / "tuning.csv", csv.text());
}

void EmitProjection(const Json& s, const fs::path& dir) {
  if (!s.contains("points") || s["points"].empty()) return;
  Csv csv({"id", "x", "y", "sex", "age", "race"});
  for (const auto& p : s["points"]) {
    csv.Row({p["id"], Num(AsDouble(p["x"])), Num(AsDouble(p["y"])), p["sex"], p["age"],
             p["race"]});
  }
  WriteText(dir / "projection.csv", csv.text());
}

uint64_t Fnv1a64(std::string_view text) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::string ConfigHash(const KvConfig& config) {
  return fmt::format("fnv1a64:{:016x}", Fnv1a64(config.ToString()));
}

Json NewReport(std::string_view command, const KvConfig& effective, uint64_t seed) {
  Json config = Json::object();
  for (const auto& [k, v] : effective.entries()) config[k] = v;
  Json doc;
  doc["schema"] = kReportSchema;
  doc["metadata"] = Json{{"tool", "fairhead"},
                         {"version", kToolVersion},
                         {"command", std::string(command)},
                         {"seed", seed},
                         {"config", std::move(config)},
                         {"config_hash", ConfigHash(effective)}};
  doc["sections"] = Json::object();
  return doc;
}

Json PrevalenceJson(const detect::PrevalenceTable& table) {
  Json cells = Json::array();
  for (const auto& c : table.cells) {
    cells.push_back(Json{{"axis", std::string(dataio::AxisName(c.axis))},
                         {"group", c.group},
                         {"condition", c.condition},
                         {"negatives", c.negatives},
                         {"positives", c.positives},
                         {"negative_share", c.negative_share},
                         {"positive_share", c.positive_share},
                         {"positive_rate", c.positive_rate}});
  }
  return Json{{"cells", std::move(cells)}};
}

Json LeakageJson(const detect::LeakageResult& result) {
  return Json{{"sex", result.sex_auc}, {"age", result.age_auc}, {"race", result.race_auc}};
}

Json DirectionJson(const std::string& condition, const detect::DirectionTable& table) {
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    Json verdicts = Json::object();
    Json means = Json::object();
    for (size_t a = 0; a < table.axes.size(); ++a) {
      verdicts[table.axes[a]] = std::string(detect::DirectionName(r.verdicts[a]));
      means[table.axes[a]] = r.group_means[a];
    }
    rows.push_back(Json{{"feature", r.feature},
                        {"mean_abs_phi", r.mean_abs_phi},
                        {"verdicts", std::move(verdicts)},
                        {"group_means", std::move(means)}});
  }
  return Json{{"condition", condition}, {"axes", table.axes}, {"rows", std::move(rows)}};
}

Json FairnessJson(const std::string& label, const detect::FairnessReport& report) {
  Json conditions = Json::array();
  for (const auto& c : report.conditions) {
    Json axes = Json::array();
    for (const auto& ax : c.axes) {
      Json groups = Json::array();
      for (const auto& g : ax.groups) {
        groups.push_back(Json{{"name", g.name},
                              {"count", g.count},
                              {"positives", g.positives},
                              {"auprc", g.auprc}});
      }
      axes.push_back(Json{{"axis", ax.axis},
                          {"delta", ax.delta},
                          {"dropped", ax.dropped},
                          {"groups", std::move(groups)}});
    }
    conditions.push_back(Json{{"condition", c.condition},
                              {"count", c.count},
                              {"positives", c.positives},
                              {"auprc", c.auprc},
                              {"roc_auc", c.roc_auc},
                              {"axes", std::move(axes)}});
  }
  return Json{{"label", label},
              {"mean_auprc", report.mean_auprc},
              {"mean_delta",
               Json{{"sex", report.mean_delta[0]},
                    {"age", report.mean_delta[1]},
                    {"race", report.mean_delta[2]}}},
              {"composite", report.composite},
              {"conditions", std::move(conditions)}};
}

Json AggregateJson(const metrics::RunAggregate& a) {
  return Json{{"mean", a.mean},
              {"std", a.std},
              {"ci_low", a.ci_low},
              {"ci_high", a.ci_high},
              {"n_runs", a.n_runs}};
}

Json RunResultJson(const std::string& label, const mitigate::ExperimentConfig& cfg,
                   const mitigate::RunResult& result) {
  Json aggregates = Json::object();
  Json values = Json::object();
  for (const auto& [name, v] : result.values) {
    values[name] = v;
    if (const auto* agg = result.Aggregate(name)) {
      aggregates[name] = AggregateJson(*agg);
    } else if (v.size() == 1) {
      aggregates[name] = AggregateJson({v[0], 0.0, v[0], v[0], 1});
    }
  }
  Json repeats = Json::array();
  for (const auto& r : result.repeats) {
    repeats.push_back(Json{{"seed", r.seed},
                           {"pca_components", r.pca_components},
                           {"train_size", r.train_size}});
  }
  return Json{{"label", label},
              {"head", std::string(heads::HeadKindName(cfg.head))},
              {"strategies", mitigate::FormatStrategies(cfg.strategies)},
              {"n_repeats", cfg.n_repeats},
              {"aggregates", std::move(aggregates)},
              {"values", std::move(values)},
              {"repeats", std::move(repeats)}};
}

Json ThresholdJson(const std::string& label, const std::string& condition,
                   const std::string& axis, const detect::ThresholdAnalysis& a) {
  Json groups = Json::array();
  for (const auto& g : a.groups) {
    Json row = RatesJson(g.rates);
    row["group"] = g.group;
    row["count"] = g.count;
    row["positives"] = g.positives;
    groups.push_back(std::move(row));
  }
  return Json{{"label", label},
              {"condition", condition},
              {"axis", axis},
              {"recall_floor", a.recall_floor},
              {"threshold", a.threshold},
              {"overall", RatesJson(a.overall)},
              {"groups", std::move(groups)},
              {"delta_fnr", a.delta_fnr},
              {"delta_tpr", a.delta_tpr},
              {"delta_fpr", a.delta_fpr},
              {"eo_gap", a.eo_gap}};
}

Json HistoryJson(const std::string& label,
                 const std::vector<mitigate::ActiveLearningRound>& history) {
  Json rounds = Json::array();
  for (const auto& r : history) {
    rounds.push_back(Json{{"labeled_size", r.labeled_size},
                          {"score", r.score},
                          {"selected", static_cast<int>(r.selected.size())}});
  }
  return Json{{"label", label}, {"history", std::move(rounds)}};
}

void AppendSection(Json& doc, const std::string& name, Json entry) {
  Json& sections = doc["sections"];
  if (!sections.contains(name)) sections[name] = Json::array();
  sections[name].push_back(std::move(entry));
}

void EmitReport(const Json& doc, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create " + out_dir.string() + ": " + ec.message());
  }
  WriteText(out_dir / "report.json", doc.dump(2) + "\n");
  if (!doc.contains("sections")) return;
  const Json& s = doc["sections"];
  const auto present = [&](const char* name) {
    return s.contains(name) && !s[name].is_null() && !s[name].empty();
  };
  if (present("prevalence")) EmitPrevalence(s["prevalence"], out_dir);
  if (present("leakage")) EmitLeakage(s["leakage"], out_dir);
  if (present("direction")) EmitDirection(s["direction"], out_dir);
  if (present("fairness")) EmitFairness(s["fairness"], out_dir);
  if (present("mitigation")) EmitMitigation(s["mitigation"], out_dir);
  if (present("threshold")) EmitThreshold(s["threshold"], out_dir);
  if (present("active_learning")) EmitActiveLearning(s["active_learning"], out_dir);
  if (present("tuning")) EmitTuning(s["tuning"], out_dir);
  if (present("projection")) EmitProjection(s["projection"], out_dir);
}

Json LoadReport(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidSpec, path.string() + ": " + e.what());
  }
  if (!doc.contains("schema") || doc["schema"] != kReportSchema) {
    throw Error(ErrorCode::kInvalidSpec,
                path.string() + ": expected schema " + kReportSchema);
  }
  return doc;
}

std::string GroupedBarSvg(const std::string& title, const std::string& y_label,
                          const std::vector<std::string>& categories,
                          const std::vector<BarSeries>& series) {
  static const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                   "#59a14f", "#edc948", "#b07aa1", "#9c755f"};
  const double left = 70, right = 20, top = 50, bottom = 90;
  const double bar_w = 16, group_gap = 24;
  const size_t ns = std::max<size_t>(series.size(), 1);
  const double group_w = ns * bar_w + group_gap;
  const double plot_w = std::max(200.0, group_w * categories.size());
  const double plot_h = 260;
  const double width = left + plot_w + right;
  const double height = top + plot_h + bottom + 20.0 * series.size();

  double vmax = 0.0, vmin = 0.0;
  for (const auto& s : series) {
    for (const auto* v : {&s.values, &s.low, &s.high}) {
      for (double x : *v) {
        if (!std::isfinite(x)) continue;
        vmax = std::max(vmax, x);
        vmin = std::min(vmin, x);
      }
    }
  }
  if (vmax - vmin <= 0.0) vmax = vmin + 1.0;
  const double step = std::pow(10.0, std::floor(std::log10((vmax - vmin) / 5.0)));
  vmax = std::ceil(vmax / step) * step;
  vmin = std::floor(vmin / step) * step;
  const auto y_of = [&](double v) {
    return top + plot_h * (vmax - v) / (vmax - vmin);
  };

  std::string o;
  o += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"11\">\n",
      width, height, width, height);
  o += fmt::format("<rect width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", width,
                   height);
  o += fmt::format("<text x=\"{:.1f}\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                   width / 2, XmlEscape(title));
  o += fmt::format(
      "<text transform=\"translate(16,{:.1f}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
      top + plot_h / 2, XmlEscape(y_label));
  for (double t = vmin; t <= vmax + step * 1e-6; t += step) {
    const double y = y_of(t);
    o += fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#dddddd\"/>\n",
        left, y, left + plot_w, y);
    o += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n",
                     left - 6, y + 4, fmt::format("{:g}", std::round(t * 1e6) / 1e6));
  }
  o += fmt::format(
      "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"black\"/>\n",
      left, y_of(0.0), left + plot_w, y_of(0.0));

  for (size_t c = 0; c < categories.size(); ++c) {
    const double gx = left + c * group_w + group_gap / 2;
    for (size_t s = 0; s < series.size(); ++s) {
      if (c >= series[s].values.size() || !std::isfinite(series[s].values[c])) continue;
      const double v = series[s].values[c];
      const double x = gx + s * bar_w;
      const double y0 = y_of(std::max(v, 0.0));
      const double y1 = y_of(std::min(v, 0.0));
      o += fmt::format(
          "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"{}\"/>\n",
          x, y0, bar_w - 2, y1 - y0, kPalette[s % 8]);
      if (c < series[s].low.size() && c < series[s].high.size() &&
          series[s].high[c] > series[s].low[c]) {
        const double cx = x + (bar_w - 2) / 2;
        o += fmt::format(
            "<path d=\"M{:.1f} {:.1f}V{:.1f}M{:.1f} {:.1f}H{:.1f}M{:.1f} {:.1f}H{:.1f}\" "
            "stroke=\"black\" fill=\"none\"/>\n",
            cx, y_of(series[s].low[c]), y_of(series[s].high[c]), cx - 4,
            y_of(series[s].low[c]), cx + 4, cx - 4, y_of(series[s].high[c]), cx + 4);
      }
    }
    const double lx = gx + ns * bar_w / 2;
    const double ly = top + plot_h + 14;
    o += fmt::format(
        "<text transform=\"translate({:.1f},{:.1f}) rotate(30)\">{}</text>\n", lx - 10,
        ly, XmlEscape(categories[c]));
  }
  for (size_t s = 0; s < series.size(); ++s) {
    const double y = top + plot_h + bottom + 20.0 * s;
    o += fmt::format(
        "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n", left,
        y - 10, kPalette[s % 8]);
    o += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", left + 18, y,
                     XmlEscape(series[s].name));
  }
  o += "</svg>\n";
  return o;
}

}  // namespace fairhead::cli
