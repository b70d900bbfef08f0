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

#ifndef IEFF_PRESETS_H_
#define IEFF_PRESETS_H_

// Shipped world and scenario presets. The files under configs/ are these
// values serialized.

#include <cstdint>
#include <string>
#include <vector>

#include "ieff/harness.h"
#include "ieff/world.h"

namespace ieff::presets {

WorldConfig default_world(std::uint64_t seed = 1);

// The designated informative sparse features of the default world.
std::vector<std::string> top_sparse_features(int count = 5);

ScenarioConfig baseline();
// Coverage fade-out of the boosted informative features (sparse_00..04) at `rate` per day.
ScenarioConfig deprecation_fading(double rate = 0.02);
ScenarioConfig zero_out();
// 10%/day fade used for privacy or emergency removals.
ScenarioConfig emergency_fast_fade();
// Distribution fade-out of a dense feature alongside a coverage fade-in of
// an embedding hidden since day 0.
ScenarioConfig migration();
// Operator rollback of the 2%/day fade once coverage reaches 40%.
ScenarioConfig rollback_drill();
// +0.05 NE metric fault during a 2%/day fade with rollback on cumulative
// breach.
ScenarioConfig guardrail_fault();

struct NamedScenario {
  std::string file;
  ScenarioConfig config;
};
std::vector<NamedScenario> all_scenarios();

}  // namespace ieff::presets

#endif  // IEFF_PRESETS_H_
