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

#ifndef IEFF_SERIALIZATION_H_
#define IEFF_SERIALIZATION_H_

// Canonical JSON form of the domain types. Field names match the struct
// members. Types that reference features by index (examples, snapshots) need
// the registry to resolve names.

#include <string>

#include "json.hpp"

#include "ieff/error.h"
#include "ieff/harness.h"
#include "ieff/serving_adapter.h"
#include "ieff/trainer.h"
#include "ieff/types.h"
#include "ieff/world.h"

namespace ieff {

using Json = nlohmann::json;

void to_json(Json& j, const FeatureId& v);
void from_json(const Json& j, FeatureId& v);
void to_json(Json& j, const FadingSchedule& v);
void from_json(const Json& j, FadingSchedule& v);
void to_json(Json& j, const GuardrailConfig& v);
void from_json(const Json& j, GuardrailConfig& v);
void to_json(Json& j, const RolloutPolicy& v);
void from_json(const Json& j, RolloutPolicy& v);
void to_json(Json& j, const HistoryEntry& v);
void from_json(const Json& j, HistoryEntry& v);
void to_json(Json& j, const Rollout& v);
void from_json(const Json& j, Rollout& v);
void to_json(Json& j, const MetricPoint& v);
void from_json(const Json& j, MetricPoint& v);
void to_json(Json& j, const CoverageSnapshot& v);
void to_json(Json& j, const WorldConfig& v);
void from_json(const Json& j, WorldConfig& v);
void to_json(Json& j, const ScenarioRollout& v);
void from_json(const Json& j, ScenarioRollout& v);
void to_json(Json& j, const OperatorAction& v);
void from_json(const Json& j, OperatorAction& v);
void to_json(Json& j, const MetricFault& v);
void from_json(const Json& j, MetricFault& v);
void to_json(Json& j, const ScenarioConfig& v);
void from_json(const Json& j, ScenarioConfig& v);
void to_json(Json& j, const PhaseRow& v);
void from_json(const Json& j, PhaseRow& v);
void to_json(Json& j, const RunSummary& v);
void from_json(const Json& j, RunSummary& v);
void to_json(Json& j, const RunReport& v);
void from_json(const Json& j, RunReport& v);
void to_json(Json& j, const PhaseComparison& v);
void to_json(Json& j, const RunComparison& v);

Json registry_to_json(const FeatureRegistry& registry);
FeatureRegistry registry_from_json(const Json& j);

CoverageSnapshot snapshot_from_json(const Json& j, const FeatureRegistry& registry);

Json example_to_json(const Example& example, const FeatureRegistry& registry);
Example example_from_json(const Json& j, const FeatureRegistry& registry);
// The snapshot is written inline as effective_coverage_snapshot plus its
// version and day.
Json logged_example_to_json(const LoggedExample& example, const FeatureRegistry& registry);
LoggedExample logged_example_from_json(const Json& j, const FeatureRegistry& registry);

// Structured state dump used by golden tests and GET /v1/state.
Json control_plane_to_json(const ControlPlane& control_plane);

// Parses JSON text, mapping syntax errors to kParseError with "<source>:<line>".
Json parse_json(const std::string& text, const std::string& source);
// Reads and parses a file. Schema errors name the file.
Json read_json_file(const std::string& path);
WorldConfig load_world_config(const std::string& path);
ScenarioConfig load_scenario_config(const std::string& path);

template <typename T>
T json_to(const Json& j, const std::string& source) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, source + ": " + e.what());
  }
}

}  // namespace ieff

#endif  // IEFF_SERIALIZATION_H_
