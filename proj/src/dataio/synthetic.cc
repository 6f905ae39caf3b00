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

#include "fairhead/dataio/synthetic.h"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "fairhead/common/error.h"
#include "fairhead/common/random.h"

namespace fairhead::dataio {
namespace {

constexpr double kProportionTolerance = 1e-9;

// Offsets per group, indexed like the group enums.
constexpr std::array<double, 2> kSexCodes = {0.5, -0.5};
constexpr std::array<double, 2> kAgeCodes = {-0.5, 0.5};
constexpr std::array<double, 4> kRaceCodes = {-0.5, 0.0, 0.5, 0.0};

template <size_t N>
void CheckProportions(const std::array<double, N>& p, std::string_view what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidSpec,
                  fmt::format("{} proportions must be non-negative", what));
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProportionTolerance) {
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("{} proportions sum to {}, expected 1", what, sum));
  }
}

template <size_t N>
size_t DrawCategory(Rng& rng, const std::array<double, N>& p) {
  const double u = rng.Uniform();
  double cumulative = 0.0;
  for (size_t k = 0; k + 1 < N; ++k) {
    cumulative += p[k];
    if (u < cumulative) return k;
  }
  // Guard against rounding in the cumulative sum: the last non-empty group.
  for (size_t k = N; k-- > 0;) {
    if (p[k] > 0.0) return k;
  }
  return N - 1;
}

template <size_t N>
std::string JoinArray(const std::array<double, N>& values) {
  std::string out;
  for (size_t i = 0; i < N; ++i) {
    if (i) out += ',';
    out += FormatDouble(values[i]);
  }
  return out;
}

template <size_t N>
std::array<double, N> ParseArray(const std::string& text, std::string_view key) {
  const auto parts = SplitString(text, ',');
  if (parts.size() != N) {
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("{}: expected {} values, got {}", key, N,
                            parts.size()));
  }
  std::array<double, N> out;
  for (size_t i = 0; i < N; ++i) out[i] = ParseDouble(parts[i], key);
  return out;
}

double Sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

OracleSpec OracleSpec::Default(int dim) {
  if (dim < 10) {
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("default oracle needs dim >= 10, got {}", dim));
  }
  OracleSpec spec;
  spec.dim = dim;
  // Biases target the overall prevalences of the four conditions in the
  // reference cohort (about 12%, 50%, 24% and 40%).
  const std::array<double, 4> biases = {-6.5, 0.0, -4.0, -1.4};
  for (size_t c = 0; c < kDefaultConditions.size(); ++c) {
    ConditionOracle oracle;
    oracle.name = std::string(kDefaultConditions[c]);
    oracle.weights.assign(dim, 0.0);
    oracle.weights[c] = 4.0;
    oracle.weights[c + 1] = 2.8;
    oracle.weights[c + 4] = 2.0;
    oracle.bias = biases[c];
    spec.conditions.push_back(std::move(oracle));
  }
  return spec;
}

void OracleSpec::Validate() const {
  if (dim <= 0) throw Error(ErrorCode::kInvalidSpec, "dim must be positive");
  if (conditions.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "at least one condition is required");
  }
  for (const auto& c : conditions) {
    if (c.name.empty()) throw Error(ErrorCode::kInvalidSpec, "empty condition name");
    if (static_cast<int>(c.weights.size()) != dim) {
      throw Error(ErrorCode::kInvalidSpec,
                  fmt::format("condition {} has {} weights, dim is {}", c.name,
                              c.weights.size(), dim));
    }
  }
  for (size_t a = 0; a < signals.size(); ++a) {
    if (signals[a] && (signals[a]->dim < 0 || signals[a]->dim >= dim)) {
      throw Error(ErrorCode::kInvalidSpec,
                  fmt::format("signal dim {} out of range", signals[a]->dim));
    }
  }
  if (!(label_noise_rate >= 0.0 && label_noise_rate < 0.5)) {
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("label_noise_rate {} outside [0, 0.5)",
                            label_noise_rate));
  }
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) {
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("missing_rate {} outside [0, 1)", missing_rate));
  }
  const int groups = degraded_axis == Axis::kRace ? 4 : 2;
  if (degraded_group < 0 || degraded_group >= groups) {
    throw Error(ErrorCode::kInvalidSpec, "degraded group out of range");
  }
  CheckProportions(sex_proportions, "sex");
  CheckProportions(age_proportions, "age");
  CheckProportions(race_proportions, "race");
  CheckProportions(split_proportions, "split");
}

KvConfig OracleSpec::ToConfig() const {
  KvConfig config;
  config.Set("dim", std::to_string(dim));
  config.Set("label_noise_rate", FormatDouble(label_noise_rate));
  config.Set("missing_rate", FormatDouble(missing_rate));
  const std::string group_name =
      degraded_axis == Axis::kRace && degraded_group == static_cast<int>(Race::kOther)
          ? "other"
          : AxisGroupNames(degraded_axis)[degraded_group];
  config.Set("degraded_group",
             fmt::format("{}:{}", AxisName(degraded_axis), group_name));
  config.Set("proportion.sex", JoinArray(sex_proportions));
  config.Set("proportion.age", JoinArray(age_proportions));
  config.Set("proportion.race", JoinArray(race_proportions));
  config.Set("proportion.split", JoinArray(split_proportions));
  for (Axis axis : kAllAxes) {
    const auto& s = signals[static_cast<size_t>(axis)];
    if (s) {
      config.Set(fmt::format("signal.{}", AxisName(axis)),
                 fmt::format("{}:{}", s->dim, FormatDouble(s->strength)));
    }
  }
  for (size_t c = 0; c < conditions.size(); ++c) {
    const auto& oracle = conditions[c];
    config.Set(fmt::format("condition.{}.name", c), oracle.name);
    config.Set(fmt::format("condition.{}.bias", c), FormatDouble(oracle.bias));
    std::string weights;
    for (size_t j = 0; j < oracle.weights.size(); ++j) {
      if (oracle.weights[j] == 0.0) continue;
      if (!weights.empty()) weights += ',';
      weights += fmt::format("{}:{}", j, FormatDouble(oracle.weights[j]));
    }
    config.Set(fmt::format("condition.{}.weights", c), weights);
  }
  return config;
}

OracleSpec OracleSpec::FromConfig(const KvConfig& config) {
  const int dim = static_cast<int>(config.GetInt("dim", 32));
  OracleSpec spec;
  const bool has_conditions = config.Has("condition.0.name");
  if (has_conditions) {
    spec.dim = dim;
  } else {
    spec = Default(dim);
  }
  spec.label_noise_rate = config.GetDouble("label_noise_rate", 0.0);
  spec.missing_rate = config.GetDouble("missing_rate", 0.0);
  if (const auto g = config.Get("degraded_group")) {
    const auto parts = SplitString(*g, ':');
    if (parts.size() != 2) {
      throw Error(ErrorCode::kInvalidSpec,
                  fmt::format("degraded_group \"{}\" (expected axis:group)", *g));
    }
    spec.degraded_axis = ParseAxis(parts[0]);
    spec.degraded_group = AxisGroupIndex(spec.degraded_axis, parts[1]);
    if (spec.degraded_group < 0) {
      throw Error(ErrorCode::kInvalidSpec,
                  fmt::format("unknown group \"{}\"", parts[1]));
    }
  }
  if (const auto v = config.Get("proportion.sex")) {
    spec.sex_proportions = ParseArray<2>(*v, "proportion.sex");
  }
  if (const auto v = config.Get("proportion.age")) {
    spec.age_proportions = ParseArray<2>(*v, "proportion.age");
  }
  if (const auto v = config.Get("proportion.race")) {
    spec.race_proportions = ParseArray<4>(*v, "proportion.race");
  }
  if (const auto v = config.Get("proportion.split")) {
    spec.split_proportions = ParseArray<3>(*v, "proportion.split");
  }
  for (Axis axis : kAllAxes) {
    const std::string key = fmt::format("signal.{}", AxisName(axis));
    if (const auto v = config.Get(key)) {
      const auto parts = SplitString(*v, ':');
      if (parts.size() != 2) {
        throw Error(ErrorCode::kInvalidSpec,
                    fmt::format("{}: expected dim:strength", key));
      }
      spec.signals[static_cast<size_t>(axis)] = DemographicSignal{
          static_cast<int>(ParseInt(parts[0], key)), ParseDouble(parts[1], key)};
    }
  }
  if (has_conditions) {
    for (int c = 0;; ++c) {
      const auto name = config.Get(fmt::format("condition.{}.name", c));
      if (!name) break;
      ConditionOracle oracle;
      oracle.name = *name;
      oracle.bias = config.GetDouble(fmt::format("condition.{}.bias", c), 0.0);
      oracle.weights.assign(dim, 0.0);
      const std::string key = fmt::format("condition.{}.weights", c);
      const std::string weights = config.GetString(key, "");
      if (!Trim(weights).empty()) {
        for (const auto& entry : SplitString(weights, ',')) {
          const auto parts = SplitString(entry, ':');
          if (parts.size() != 2) {
            throw Error(ErrorCode::kInvalidSpec,
                        fmt::format("{}: expected index:value pairs", key));
          }
          const int64_t j = ParseInt(parts[0], key);
          if (j < 0 || j >= dim) {
            throw Error(ErrorCode::kInvalidSpec,
                        fmt::format("{}: index {} out of range", key, j));
          }
          oracle.weights[j] = ParseDouble(parts[1], key);
        }
      }
      spec.conditions.push_back(std::move(oracle));
    }
  }
  spec.Validate();
  return spec;
}

SyntheticDataset GenerateSynthetic(const OracleSpec& spec, int n, uint64_t seed) {
  spec.Validate();
  if (n < 100) {
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("synthetic benchmark needs n >= 100, got {}", n));
  }
  Rng feature_rng(Rng::Derive(seed, 1));
  Rng demo_rng(Rng::Derive(seed, 2));
  Rng split_rng(Rng::Derive(seed, 3));
  Rng label_rng(Rng::Derive(seed, 4));
  Rng flip_rng(Rng::Derive(seed, 5));
  Rng missing_rng(Rng::Derive(seed, 6));

  const int dim = spec.dim;
  const size_t num_conditions = spec.conditions.size();
  SyntheticDataset out;
  out.spec = spec;
  out.embeddings.data.resize(n, dim);
  out.embeddings.ids.reserve(n);
  std::vector<Sample> rows;
  rows.reserve(n);
  std::vector<std::string> condition_names;
  for (const auto& c : spec.conditions) condition_names.push_back(c.name);

  const int id_width = static_cast<int>(std::to_string(n).size());
  for (int i = 0; i < n; ++i) {
    auto x = out.embeddings.data.row(i);
    // Values are kept at float32 precision so the in-memory dataset equals what
    // the embeddings file stores.
    for (int j = 0; j < dim; ++j) {
      x(j) = static_cast<float>(feature_rng.Normal());
    }

    Sample s;
    s.id = fmt::format("s{:0{}}", i, id_width);
    s.sex = static_cast<Sex>(DrawCategory(demo_rng, spec.sex_proportions));
    const auto age_group =
        static_cast<AgeGroup>(DrawCategory(demo_rng, spec.age_proportions));
    const uint64_t age_draw = demo_rng.UniformInt(1 << 20);
    s.age_years = age_group == AgeGroup::kYoung
                      ? 18 + static_cast<int>(age_draw % 52)   // 18..69
                      : 70 + static_cast<int>(age_draw % 26);  // 70..95
    s.race = static_cast<Race>(DrawCategory(demo_rng, spec.race_proportions));
    s.split = static_cast<Split>(DrawCategory(split_rng, spec.split_proportions));

    int group_on_degraded_axis = 0;
    switch (spec.degraded_axis) {
      case Axis::kSex: group_on_degraded_axis = static_cast<int>(s.sex); break;
      case Axis::kAge: group_on_degraded_axis = static_cast<int>(age_group); break;
      case Axis::kRace: group_on_degraded_axis = static_cast<int>(s.race); break;
    }
    const bool degraded = group_on_degraded_axis == spec.degraded_group;

    s.labels.resize(num_conditions);
    for (size_t c = 0; c < num_conditions; ++c) {
      const auto& oracle = spec.conditions[c];
      double logit = oracle.bias;
      for (int j = 0; j < dim; ++j) logit += oracle.weights[j] * x(j);
      int label = label_rng.Uniform() < Sigmoid(logit) ? 1 : 0;
      const double flip_draw = flip_rng.Uniform();
      if (degraded && flip_draw < spec.label_noise_rate) label = 1 - label;
      const double missing_draw = missing_rng.Uniform();
      if (missing_draw < spec.missing_rate) label = kMissingLabel;
      s.labels[c] = static_cast<int8_t>(label);
    }

    if (const auto& sig = spec.signals[static_cast<size_t>(Axis::kSex)]) {
      x(sig->dim) += sig->strength * kSexCodes[static_cast<size_t>(s.sex)];
    }
    if (const auto& sig = spec.signals[static_cast<size_t>(Axis::kAge)]) {
      x(sig->dim) += sig->strength * kAgeCodes[static_cast<size_t>(age_group)];
    }
    if (const auto& sig = spec.signals[static_cast<size_t>(Axis::kRace)]) {
      x(sig->dim) += sig->strength * kRaceCodes[static_cast<size_t>(s.race)];
    }
    for (int j = 0; j < dim; ++j) x(j) = static_cast<float>(x(j));

    out.embeddings.ids.push_back(s.id);
    rows.push_back(std::move(s));
  }
  out.samples = SampleTable(std::move(condition_names), std::move(rows));
  return out;
}

}  // namespace fairhead::dataio
