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

#include "ieff/presets.h"

namespace ieff::presets {
namespace {

constexpr int kWarmupDays = 15;
constexpr int kWindowDays = 50;

RolloutPolicy fade_policy(std::vector<std::string> features, double rate) {
  RolloutPolicy p;
  p.features = std::move(features);
  p.schedule.start_day = kWarmupDays;
  p.schedule.rate_per_day = rate;
  p.schedule.initial_coverage = 1.0;
  p.schedule.target_coverage = 0.0;
  p.schedule.mode = FadingMode::kCoverage;
  p.max_duration_days = kWindowDays;
  return p;
}

ScenarioConfig base(std::string name, ScenarioKind kind) {
  ScenarioConfig s;
  s.name = std::move(name);
  s.kind = kind;
  s.warmup_days = kWarmupDays;
  s.window_days = kWindowDays;
  return s;
}

}  // namespace

WorldConfig default_world(std::uint64_t seed) {
  WorldConfig w;
  w.seed = seed;
  return w;
}

std::vector<std::string> top_sparse_features(int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(sparse_feature_name(i));
  return out;
}

ScenarioConfig baseline() { return base("baseline", ScenarioKind::kBaseline); }

ScenarioConfig deprecation_fading(double rate) {
  ScenarioConfig s = base("deprecation-fading", ScenarioKind::kFading);
  s.rollouts.push_back({fade_policy(top_sparse_features(), rate), std::nullopt});
  // Offline comparison runs measure the damage instead of stopping it.
  s.guardrails_enabled = false;
  return s;
}

ScenarioConfig zero_out() {
  ScenarioConfig s = base("zero-out", ScenarioKind::kZeroOut);
  s.rollouts.push_back({fade_policy(top_sparse_features(), 1.0), std::nullopt});
  s.guardrails_enabled = false;
  return s;
}

ScenarioConfig emergency_fast_fade() {
  ScenarioConfig s = base("emergency-fast-fade", ScenarioKind::kFading);
  s.rollouts.push_back({fade_policy(top_sparse_features(), 0.10), std::nullopt});
  s.guardrails_enabled = false;
  return s;
}

ScenarioConfig migration() {
  ScenarioConfig s = base("migration", ScenarioKind::kFading);
  RolloutPolicy out = fade_policy({dense_feature_name(0)}, 0.05);
  out.schedule.mode = FadingMode::kDistribution;
  RolloutPolicy in = fade_policy({embedding_feature_name(1)}, 0.05);
  in.schedule.initial_coverage = 0.0;
  in.schedule.target_coverage = 1.0;
  s.rollouts.push_back({out, std::nullopt});
  s.rollouts.push_back({in, 0});
  s.guardrails_enabled = false;
  return s;
}

ScenarioConfig rollback_drill() {
  ScenarioConfig s = base("rollback-drill", ScenarioKind::kFading);
  s.rollouts.push_back({fade_policy(top_sparse_features(), 0.02), std::nullopt});
  s.operator_actions.push_back({kWarmupDays + 30, OperatorActionKind::kRollback, 0, 0.0});
  s.guardrails_enabled = false;
  return s;
}

ScenarioConfig guardrail_fault() {
  ScenarioConfig s = base("guardrail-fault", ScenarioKind::kFading);
  RolloutPolicy p = fade_policy(top_sparse_features(), 0.02);
  p.action_on_cumulative_breach = GuardrailAction::kRollback;
  s.rollouts.push_back({p, std::nullopt});
  s.faults.push_back({kWarmupDays + 3, 0.05});
  return s;
}

std::vector<NamedScenario> all_scenarios() {
  return {
      {"baseline.json", baseline()},
      {"deprecation_fading.json", deprecation_fading()},
      {"zero_out.json", zero_out()},
      {"emergency_fast_fade.json", emergency_fast_fade()},
      {"migration.json", migration()},
      {"rollback_drill.json", rollback_drill()},
      {"guardrail_fault.json", guardrail_fault()},
  };
}

}  // namespace ieff::presets
