// Copyright 2026 The IEFF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ieff/serialization.h"

#include <fstream>
#include <sstream>

#include "ieff/control_plane.h"

namespace ieff {
namespace {

template <typename T>
void read_optional(const Json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

std::string line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return std::to_string(line);
}

Json value_to_json(const FeatureValue& value) {
  if (const auto* id = std::get_if<std::int64_t>(&value)) return *id;
  if (const auto* dense = std::get_if<double>(&value)) return *dense;
  return std::get<std::vector<double>>(value);
}

FeatureValue value_from_json(const Json& j, const FeatureId& feature, std::size_t dim) {
  switch (feature.kind) {
    case FeatureKind::kSparseId:
      return j.get<std::int64_t>();
    case FeatureKind::kDense:
      return j.get<double>();
    case FeatureKind::kEmbedding: {
      auto vec = j.get<std::vector<double>>();
      if (vec.size() != dim) {
        throw Error(ErrorCode::kParseError, "embedding '" + feature.name + "' has dimension " +
                                                std::to_string(vec.size()) + ", expected " +
                                                std::to_string(dim));
      }
      return vec;
    }
  }
  return 0.0;
}

Json features_to_json(const std::vector<FeatureEntry>& features,
                      const FeatureRegistry& registry) {
  Json out = Json::object();
  for (const auto& entry : features) {
    out[registry.at(entry.feature).name] = value_to_json(entry.value);
  }
  return out;
}

std::vector<FeatureEntry> features_from_json(const Json& j, const FeatureRegistry& registry) {
  std::vector<FeatureEntry> out;
  for (const auto& [name, value] : j.items()) {
    const FeatureIndex index = registry.index_of(name);
    out.push_back({index, value_from_json(value, registry.at(index), registry.embedding_dim())});
  }
  std::sort(out.begin(), out.end(),
            [](const FeatureEntry& a, const FeatureEntry& b) { return a.feature < b.feature; });
  return out;
}

}  // namespace

void to_json(Json& j, const FeatureId& v) {
  j = Json{{"name", v.name}, {"kind", to_string(v.kind)}};
}
void from_json(const Json& j, FeatureId& v) {
  v.name = j.at("name").get<std::string>();
  v.kind = parse_feature_kind(j.at("kind").get<std::string>());
}

void to_json(Json& j, const FadingSchedule& v) {
  j = Json{{"start_day", v.start_day},
           {"rate_per_day", v.rate_per_day},
           {"initial_coverage", v.initial_coverage},
           {"target_coverage", v.target_coverage},
           {"mode", to_string(v.mode)}};
}
void from_json(const Json& j, FadingSchedule& v) {
  read_optional(j, "start_day", v.start_day);
  read_optional(j, "rate_per_day", v.rate_per_day);
  read_optional(j, "initial_coverage", v.initial_coverage);
  read_optional(j, "target_coverage", v.target_coverage);
  if (j.contains("mode")) v.mode = parse_fading_mode(j.at("mode").get<std::string>());
}

void to_json(Json& j, const GuardrailConfig& v) {
  j = Json{{"baseline_window_days", v.baseline_window_days},
           {"max_daily_ne_increase", v.max_daily_ne_increase},
           {"max_cumulative_ne_increase", v.max_cumulative_ne_increase},
           {"action_on_daily_breach", to_string(v.action_on_daily_breach)},
           {"action_on_cumulative_breach", to_string(v.action_on_cumulative_breach)}};
}
void from_json(const Json& j, GuardrailConfig& v) {
  read_optional(j, "baseline_window_days", v.baseline_window_days);
  read_optional(j, "max_daily_ne_increase", v.max_daily_ne_increase);
  read_optional(j, "max_cumulative_ne_increase", v.max_cumulative_ne_increase);
  if (j.contains("action_on_daily_breach")) {
    v.action_on_daily_breach = parse_guardrail_action(j.at("action_on_daily_breach").get<std::string>());
  }
  if (j.contains("action_on_cumulative_breach")) {
    v.action_on_cumulative_breach =
        parse_guardrail_action(j.at("action_on_cumulative_breach").get<std::string>());
  }
}

void to_json(Json& j, const RolloutPolicy& v) {
  j = Json{{"features", v.features},
           {"schedule", v.schedule},
           {"max_daily_ne_increase", v.max_daily_ne_increase},
           {"max_cumulative_ne_increase", v.max_cumulative_ne_increase},
           {"max_duration_days", v.max_duration_days},
           {"guardrail",
            {{"baseline_window_days", v.baseline_window_days},
             {"action_on_daily_breach", to_string(v.action_on_daily_breach)},
             {"action_on_cumulative_breach", to_string(v.action_on_cumulative_breach)}}}};
}
void from_json(const Json& j, RolloutPolicy& v) {
  v.features = j.at("features").get<std::vector<std::string>>();
  v.schedule = j.at("schedule").get<FadingSchedule>();
  read_optional(j, "max_daily_ne_increase", v.max_daily_ne_increase);
  read_optional(j, "max_cumulative_ne_increase", v.max_cumulative_ne_increase);
  read_optional(j, "max_duration_days", v.max_duration_days);
  if (auto g = j.find("guardrail"); g != j.end()) {
    GuardrailConfig config = v.guardrail();
    from_json(*g, config);
    v.baseline_window_days = config.baseline_window_days;
    v.action_on_daily_breach = config.action_on_daily_breach;
    v.action_on_cumulative_breach = config.action_on_cumulative_breach;
  }
}

void to_json(Json& j, const HistoryEntry& v) {
  j = Json{{"day", v.day},
           {"sequence", v.sequence},
           {"from", to_string(v.from)},
           {"to", to_string(v.to)},
           {"reason", to_string(v.reason)}};
}
void from_json(const Json& j, HistoryEntry& v) {
  v.day = j.at("day").get<int>();
  v.sequence = j.at("sequence").get<std::uint64_t>();
  v.from = parse_rollout_state(j.at("from").get<std::string>());
  v.to = parse_rollout_state(j.at("to").get<std::string>());
  v.reason = parse_transition_reason(j.at("reason").get<std::string>());
}

void to_json(Json& j, const Rollout& v) {
  j = Json{{"id", v.id},
           {"policy", v.policy},
           {"state", to_string(v.state)},
           {"paused_days_accumulated", v.paused_days_accumulated},
           {"created_day", v.created_day},
           {"restore_coverage", v.restore_coverage},
           {"history", v.history}};
}
void from_json(const Json& j, Rollout& v) {
  v.id = j.at("id").get<std::string>();
  v.policy = j.at("policy").get<RolloutPolicy>();
  v.state = parse_rollout_state(j.at("state").get<std::string>());
  v.paused_days_accumulated = j.at("paused_days_accumulated").get<int>();
  v.created_day = j.at("created_day").get<int>();
  v.restore_coverage = j.value("restore_coverage", v.policy.schedule.initial_coverage);
  v.history = j.at("history").get<std::vector<HistoryEntry>>();
}

void to_json(Json& j, const MetricPoint& v) {
  j = Json{{"day", v.day},
           {"ne", v.ne},
           {"mean_prediction", v.mean_prediction},
           {"mean_label", v.mean_label},
           {"coverage_snapshot", v.coverage_snapshot},
           {"guardrail_verdict", to_string(v.guardrail_verdict)}};
}
void from_json(const Json& j, MetricPoint& v) {
  v.day = j.at("day").get<int>();
  v.ne = j.at("ne").get<double>();
  v.mean_prediction = j.at("mean_prediction").get<double>();
  v.mean_label = j.at("mean_label").get<double>();
  v.coverage_snapshot = j.at("coverage_snapshot").get<std::map<std::string, double>>();
  v.guardrail_verdict = parse_guardrail_verdict(j.at("guardrail_verdict").get<std::string>());
}

void to_json(Json& j, const CoverageSnapshot& v) {
  Json entries = Json::object();
  for (const auto& slot : v.slots()) {
    if (slot) entries[slot->feature] = {{"mode", to_string(slot->mode)}, {"fraction", slot->fraction}};
  }
  j = Json{{"version", v.version()}, {"day", v.day()}, {"entries", entries}};
}

CoverageSnapshot snapshot_from_json(const Json& j, const FeatureRegistry& registry) {
  std::map<std::string, std::pair<FadingMode, double>> entries;
  for (const auto& [name, e] : j.at("entries").items()) {
    entries[name] = {parse_fading_mode(e.at("mode").get<std::string>()),
                     e.at("fraction").get<double>()};
  }
  return CoverageSnapshot::from_entries(j.at("version").get<std::uint64_t>(),
                                        j.at("day").get<int>(), registry, entries);
}

void to_json(Json& j, const WorldConfig& v) {
  j = Json{{"seed", v.seed},
           {"sparse_features", v.sparse_features},
           {"sparse_cardinality", v.sparse_cardinality},
           {"dense_features", v.dense_features},
           {"embedding_features", v.embedding_features},
           {"embedding_dim", v.embedding_dim},
           {"weight_scale", v.weight_scale},
           {"informative_features", v.informative_features},
           {"informative_boost", v.informative_boost},
           {"proxy_features", v.proxy_features},
           {"proxy_fidelity", v.proxy_fidelity},
           {"weights", v.weights},
           {"bias", v.bias},
           {"requests_per_day", v.requests_per_day},
           {"holdout_per_day", v.holdout_per_day},
           {"simulation_days", v.simulation_days}};
}
void from_json(const Json& j, WorldConfig& v) {
  read_optional(j, "seed", v.seed);
  read_optional(j, "sparse_features", v.sparse_features);
  read_optional(j, "sparse_cardinality", v.sparse_cardinality);
  read_optional(j, "dense_features", v.dense_features);
  read_optional(j, "embedding_features", v.embedding_features);
  read_optional(j, "embedding_dim", v.embedding_dim);
  read_optional(j, "weight_scale", v.weight_scale);
  read_optional(j, "informative_features", v.informative_features);
  read_optional(j, "informative_boost", v.informative_boost);
  read_optional(j, "proxy_features", v.proxy_features);
  read_optional(j, "proxy_fidelity", v.proxy_fidelity);
  read_optional(j, "weights", v.weights);
  read_optional(j, "bias", v.bias);
  read_optional(j, "requests_per_day", v.requests_per_day);
  read_optional(j, "holdout_per_day", v.holdout_per_day);
  read_optional(j, "simulation_days", v.simulation_days);
}

void to_json(Json& j, const ScenarioRollout& v) {
  j = Json{{"policy", v.policy}};
  if (v.create_day) j["create_day"] = *v.create_day;
}
void from_json(const Json& j, ScenarioRollout& v) {
  v.policy = j.at("policy").get<RolloutPolicy>();
  if (j.contains("create_day")) v.create_day = j.at("create_day").get<int>();
}

namespace {

constexpr std::array<std::pair<std::string_view, OperatorActionKind>, 4> kActionKinds{{
    {"pause", OperatorActionKind::kPause},
    {"resume", OperatorActionKind::kResume},
    {"rollback", OperatorActionKind::kRollback},
    {"set-rate", OperatorActionKind::kSetRate},
}};

}  // namespace

void to_json(Json& j, const OperatorAction& v) {
  std::string_view name = "?";
  for (const auto& [n, k] : kActionKinds) {
    if (k == v.action) name = n;
  }
  j = Json{{"day", v.day}, {"action", name}, {"rollout", v.rollout}};
  if (v.action == OperatorActionKind::kSetRate) j["rate_per_day"] = v.rate_per_day;
}
void from_json(const Json& j, OperatorAction& v) {
  v.day = j.at("day").get<int>();
  const auto name = j.at("action").get<std::string>();
  bool found = false;
  for (const auto& [n, k] : kActionKinds) {
    if (n == name) {
      v.action = k;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::kParseError, "invalid operator action '" + name + "'");
  read_optional(j, "rollout", v.rollout);
  read_optional(j, "rate_per_day", v.rate_per_day);
}

void to_json(Json& j, const MetricFault& v) {
  j = Json{{"day", v.day}, {"ne_offset", v.ne_offset}};
}
void from_json(const Json& j, MetricFault& v) {
  v.day = j.at("day").get<int>();
  v.ne_offset = j.at("ne_offset").get<double>();
}

void to_json(Json& j, const ScenarioConfig& v) {
  j = Json{{"name", v.name},
           {"kind", to_string(v.kind)},
           {"warmup_days", v.warmup_days},
           {"rollouts", v.rollouts},
           {"window_days", v.window_days},
           {"operator_actions", v.operator_actions},
           {"faults", v.faults},
           {"guardrails_enabled", v.guardrails_enabled},
           {"baseline_guardrail", v.baseline_guardrail},
           {"learning_rate", v.learning_rate},
           {"model_buckets", v.model_buckets}};
}
void from_json(const Json& j, ScenarioConfig& v) {
  read_optional(j, "name", v.name);
  if (j.contains("kind")) v.kind = parse_scenario_kind(j.at("kind").get<std::string>());
  read_optional(j, "warmup_days", v.warmup_days);
  read_optional(j, "rollouts", v.rollouts);
  read_optional(j, "window_days", v.window_days);
  read_optional(j, "operator_actions", v.operator_actions);
  read_optional(j, "faults", v.faults);
  read_optional(j, "guardrails_enabled", v.guardrails_enabled);
  read_optional(j, "baseline_guardrail", v.baseline_guardrail);
  read_optional(j, "learning_rate", v.learning_rate);
  read_optional(j, "model_buckets", v.model_buckets);
}

void to_json(Json& j, const PhaseRow& v) {
  j = Json{{"band", v.band}, {"days", v.days}, {"delta_ne_sum", v.delta_ne_sum}, {"mean_ne", v.mean_ne}};
}
void from_json(const Json& j, PhaseRow& v) {
  v.band = j.at("band").get<std::string>();
  v.days = j.at("days").get<int>();
  v.delta_ne_sum = j.at("delta_ne_sum").get<double>();
  v.mean_ne = j.at("mean_ne").get<double>();
}

void to_json(Json& j, const RunSummary& v) {
  j = Json{{"rollout_start_day", v.rollout_start_day},
           {"window_first_day", v.window_first_day},
           {"window_last_day", v.window_last_day},
           {"baseline_ne", v.baseline_ne},
           {"peak_daily_delta", v.peak_daily_delta},
           {"peak_daily_delta_day", v.peak_daily_delta_day},
           {"cumulative_delta", v.cumulative_delta},
           {"peak_ne", v.peak_ne},
           {"peak_ne_day", v.peak_ne_day},
           {"steady_state_ne", v.steady_state_ne},
           {"recovery_days", v.recovery_days},
           {"tracked_feature", v.tracked_feature},
           {"phases", v.phases},
           {"guardrail_triggers", v.guardrail_triggers}};
}
void from_json(const Json& j, RunSummary& v) {
  v.rollout_start_day = j.at("rollout_start_day").get<int>();
  v.window_first_day = j.at("window_first_day").get<int>();
  v.window_last_day = j.at("window_last_day").get<int>();
  v.baseline_ne = j.at("baseline_ne").get<double>();
  v.peak_daily_delta = j.at("peak_daily_delta").get<double>();
  v.peak_daily_delta_day = j.at("peak_daily_delta_day").get<int>();
  v.cumulative_delta = j.at("cumulative_delta").get<double>();
  v.peak_ne = j.at("peak_ne").get<double>();
  v.peak_ne_day = j.at("peak_ne_day").get<int>();
  v.steady_state_ne = j.at("steady_state_ne").get<double>();
  v.recovery_days = j.at("recovery_days").get<int>();
  v.tracked_feature = j.at("tracked_feature").get<std::string>();
  v.phases = j.at("phases").get<std::vector<PhaseRow>>();
  v.guardrail_triggers = j.at("guardrail_triggers").get<int>();
}

void to_json(Json& j, const RunReport& v) {
  j = Json{{"scenario", v.scenario},
           {"seed", v.seed},
           {"series", v.series},
           {"coverage_features", v.coverage_features},
           {"aborted", v.aborted},
           {"summary", v.summary}};
}
void from_json(const Json& j, RunReport& v) {
  v.scenario = j.at("scenario").get<std::string>();
  v.seed = j.at("seed").get<std::uint64_t>();
  v.series = j.at("series").get<std::vector<MetricPoint>>();
  v.coverage_features = j.at("coverage_features").get<std::vector<std::string>>();
  v.aborted = j.at("aborted").get<bool>();
  v.summary = j.at("summary").get<RunSummary>();
}

void to_json(Json& j, const PhaseComparison& v) {
  j = Json{{"band", v.band},
           {"days", v.days},
           {"paired_delta_sum", v.paired_delta_sum},
           {"normalized_pct", v.normalized_pct},
           {"deficit_pct", v.deficit_pct}};
}

void to_json(Json& j, const RunComparison& v) {
  j = Json{{"a", v.a},
           {"b", v.b},
           {"phases", v.phases},
           {"peak_ratio", v.peak_ratio},
           {"cumulative_ratio", v.cumulative_ratio},
           {"recovery_ratio", v.recovery_ratio},
           {"peak_delta", v.peak_delta},
           {"cumulative_delta", v.cumulative_delta}};
}

Json registry_to_json(const FeatureRegistry& registry) {
  Json features = Json::array();
  for (const auto& f : registry.features()) features.push_back(f);
  return Json{{"embedding_dim", registry.embedding_dim()}, {"features", features}};
}

FeatureRegistry registry_from_json(const Json& j) {
  FeatureRegistry registry(j.at("embedding_dim").get<std::size_t>());
  for (const auto& f : j.at("features")) registry.add(f.get<FeatureId>());
  return registry;
}

Json example_to_json(const Example& e, const FeatureRegistry& registry) {
  return Json{{"request_id", e.request_id},
              {"features", features_to_json(e.features, registry)},
              {"label", e.label},
              {"day", e.day}};
}

Example example_from_json(const Json& j, const FeatureRegistry& registry) {
  Example e;
  e.request_id = j.at("request_id").get<std::uint64_t>();
  e.features = features_from_json(j.at("features"), registry);
  e.label = j.at("label").get<int>();
  e.day = j.at("day").get<int>();
  return e;
}

Json logged_example_to_json(const LoggedExample& e, const FeatureRegistry& registry) {
  Json j{{"request_id", e.request_id},
         {"features", features_to_json(e.features, registry)},
         {"label", e.label},
         {"day", e.day}};
  if (e.snapshot) j["snapshot"] = *e.snapshot;
  j["effective_coverage_snapshot"] = e.effective_coverage_snapshot();
  return j;
}

LoggedExample logged_example_from_json(const Json& j, const FeatureRegistry& registry) {
  LoggedExample e;
  e.request_id = j.at("request_id").get<std::uint64_t>();
  e.features = features_from_json(j.at("features"), registry);
  e.label = j.at("label").get<int>();
  e.day = j.at("day").get<int>();
  if (j.contains("snapshot")) {
    e.snapshot = std::make_shared<const CoverageSnapshot>(snapshot_from_json(j.at("snapshot"), registry));
  }
  return e;
}

Json control_plane_to_json(const ControlPlane& cp) {
  Json features = Json::array();
  for (const auto& f : cp.registry().features()) features.push_back(f);
  return Json{{"day", cp.day()},
              {"sequence", cp.sequence()},
              {"snapshot", *cp.snapshot()},
              {"features", features},
              {"rollouts", cp.rollouts()}};
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError,
                source + ":" + line_of(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path);
}

WorldConfig load_world_config(const std::string& path) {
  auto config = json_to<WorldConfig>(read_json_file(path), path);
  config.validate();
  return config;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  Json j = read_json_file(path);
  try {
    auto config = j.get<ScenarioConfig>();
    config.validate();
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

}  // namespace ieff
