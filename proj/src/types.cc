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

#include "ieff/types.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "ieff/error.h"
#include "ieff/hashing.h"
#include "ieff/serving_adapter.h"

namespace ieff {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kUnknownFeature: return "unknown-feature";
    case ErrorCode::kFeatureConflict: return "feature-conflict";
    case ErrorCode::kInvalidSchedule: return "invalid-schedule";
    case ErrorCode::kIllegalTransition: return "illegal-transition";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kDegenerateLabels: return "degenerate-labels";
    case ErrorCode::kInsufficientHistory: return "insufficient-history";
    case ErrorCode::kOutOfOrderDay: return "out-of-order-day";
    case ErrorCode::kMismatchedHorizon: return "mismatched-horizon";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kIoError: return "io-error";
    case ErrorCode::kSimulationFinished: return "simulation-finished";
  }
  return "unknown";
}

FeatureRegistry::FeatureRegistry(std::size_t embedding_dim)
    : embedding_dim_(embedding_dim) {
  if (embedding_dim_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be positive");
  }
}

FeatureIndex FeatureRegistry::add(FeatureId feature) {
  if (feature.name.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "feature name must be non-empty");
  }
  if (by_name_.contains(feature.name)) {
    throw Error(ErrorCode::kFeatureConflict,
                "feature '" + feature.name + "' is already registered");
  }
  const auto index = static_cast<std::uint32_t>(features_.size());
  by_name_.emplace(feature.name, index);
  name_hashes_.push_back(fnv1a64(feature.name));
  features_.push_back(std::move(feature));
  return FeatureIndex{index};
}

std::optional<FeatureIndex> FeatureRegistry::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return FeatureIndex{it->second};
}

FeatureIndex FeatureRegistry::index_of(std::string_view name) const {
  if (auto index = find(name)) return *index;
  throw Error(ErrorCode::kUnknownFeature,
              "unknown feature '" + std::string(name) + "'");
}

namespace {

bool is_fraction(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

}  // namespace

void FadingSchedule::validate() const {
  if (start_day < 0) {
    throw Error(ErrorCode::kInvalidSchedule, "start_day must be >= 0");
  }
  if (!is_fraction(rate_per_day) || !is_fraction(initial_coverage) ||
      !is_fraction(target_coverage)) {
    throw Error(ErrorCode::kInvalidSchedule,
                "rate_per_day, initial_coverage and target_coverage must lie in [0, 1]");
  }
}

void GuardrailConfig::validate() const {
  if (baseline_window_days < 2) {
    throw Error(ErrorCode::kInvalidArgument, "baseline_window_days must be >= 2");
  }
  if (!(max_daily_ne_increase > 0.0) || !(max_cumulative_ne_increase > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "guardrail thresholds must be > 0");
  }
}

GuardrailConfig RolloutPolicy::guardrail() const {
  GuardrailConfig config;
  config.baseline_window_days = baseline_window_days;
  config.max_daily_ne_increase = max_daily_ne_increase;
  config.max_cumulative_ne_increase = max_cumulative_ne_increase;
  config.action_on_daily_breach = action_on_daily_breach;
  config.action_on_cumulative_breach = action_on_cumulative_breach;
  return config;
}

bool is_terminal(RolloutState state) {
  return state == RolloutState::kCompleted || state == RolloutState::kRolledBack;
}

bool is_legal_transition(RolloutState from, RolloutState to) {
  using S = RolloutState;
  switch (from) {
    case S::kPending: return to == S::kActive;
    case S::kActive: return to == S::kPaused || to == S::kCompleted || to == S::kRolledBack;
    case S::kPaused: return to == S::kActive || to == S::kRolledBack;
    case S::kCompleted:
    case S::kRolledBack: return false;
  }
  return false;
}

void Rollout::transition(RolloutState to, int day, std::uint64_t sequence,
                         TransitionReason reason) {
  if (!is_legal_transition(state, to)) {
    throw Error(ErrorCode::kIllegalTransition,
                "rollout " + id + ": illegal transition " +
                    std::string(to_string(state)) + " -> " + std::string(to_string(to)));
  }
  history.push_back(HistoryEntry{day, sequence, state, to, reason});
  state = to;
}

namespace {

const FeatureEntry* find_entry(const std::vector<FeatureEntry>& features,
                               FeatureIndex feature) {
  auto it = std::lower_bound(
      features.begin(), features.end(), feature,
      [](const FeatureEntry& e, FeatureIndex f) { return e.feature < f; });
  return it != features.end() && it->feature == feature ? &*it : nullptr;
}

}  // namespace

const FeatureEntry* Example::find(FeatureIndex feature) const {
  return find_entry(features, feature);
}

const FeatureEntry* LoggedExample::find(FeatureIndex feature) const {
  return find_entry(features, feature);
}

std::map<std::string, double> LoggedExample::effective_coverage_snapshot() const {
  return snapshot ? snapshot->fractions() : std::map<std::string, double>{};
}

bool LoggedExample::operator==(const LoggedExample& other) const {
  if (request_id != other.request_id || features != other.features ||
      label != other.label || day != other.day) {
    return false;
  }
  if (snapshot == other.snapshot) return true;
  if (!snapshot || !other.snapshot) return false;
  return *snapshot == *other.snapshot;
}

// ---------------------------------------------------------------------------
// Enum spellings

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& table,
             std::string_view what) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  throw Error(ErrorCode::kParseError,
              "invalid " + std::string(what) + " '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view name_enum(E e, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [name, value] : table) {
    if (value == e) return name;
  }
  return "?";
}

constexpr std::array<std::pair<std::string_view, FeatureKind>, 3> kKinds{{
    {"sparse-id", FeatureKind::kSparseId},
    {"embedding", FeatureKind::kEmbedding},
    {"dense", FeatureKind::kDense},
}};
constexpr std::array<std::pair<std::string_view, FadingMode>, 2> kModes{{
    {"coverage", FadingMode::kCoverage},
    {"distribution", FadingMode::kDistribution},
}};
constexpr std::array<std::pair<std::string_view, GuardrailAction>, 2> kActions{{
    {"pause", GuardrailAction::kPause},
    {"rollback", GuardrailAction::kRollback},
}};
constexpr std::array<std::pair<std::string_view, RolloutState>, 5> kStates{{
    {"Pending", RolloutState::kPending},
    {"Active", RolloutState::kActive},
    {"Paused", RolloutState::kPaused},
    {"Completed", RolloutState::kCompleted},
    {"RolledBack", RolloutState::kRolledBack},
}};
constexpr std::array<std::pair<std::string_view, TransitionReason>, 3> kReasons{{
    {"schedule", TransitionReason::kSchedule},
    {"operator", TransitionReason::kOperator},
    {"guardrail", TransitionReason::kGuardrail},
}};
constexpr std::array<std::pair<std::string_view, GuardrailVerdict>, 3> kVerdicts{{
    {"ok", GuardrailVerdict::kOk},
    {"paused", GuardrailVerdict::kPause},
    {"rolled_back", GuardrailVerdict::kRollback},
}};

}  // namespace

std::string_view to_string(FeatureKind kind) { return name_enum(kind, kKinds); }
std::string_view to_string(FadingMode mode) { return name_enum(mode, kModes); }
std::string_view to_string(GuardrailAction action) { return name_enum(action, kActions); }
std::string_view to_string(RolloutState state) { return name_enum(state, kStates); }
std::string_view to_string(TransitionReason reason) { return name_enum(reason, kReasons); }
std::string_view to_string(GuardrailVerdict verdict) { return name_enum(verdict, kVerdicts); }

FeatureKind parse_feature_kind(std::string_view s) { return parse_enum(s, kKinds, "feature kind"); }
FadingMode parse_fading_mode(std::string_view s) { return parse_enum(s, kModes, "fading mode"); }
GuardrailAction parse_guardrail_action(std::string_view s) {
  return parse_enum(s, kActions, "guardrail action");
}
RolloutState parse_rollout_state(std::string_view s) { return parse_enum(s, kStates, "rollout state"); }
TransitionReason parse_transition_reason(std::string_view s) {
  return parse_enum(s, kReasons, "transition reason");
}
GuardrailVerdict parse_guardrail_verdict(std::string_view s) {
  return parse_enum(s, kVerdicts, "guardrail verdict");
}

}  // namespace ieff
