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

#ifndef IEFF_TYPES_H_
#define IEFF_TYPES_H_

// Shared vocabulary: features, schedules, rollout policies and lifecycle,
// examples, and per-day metrics.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace ieff {

inline constexpr std::size_t kDefaultEmbeddingDim = 8;

enum class FeatureKind { kSparseId, kEmbedding, kDense };

struct FeatureId {
  std::string name;
  FeatureKind kind = FeatureKind::kDense;

  bool operator==(const FeatureId&) const = default;
};

// Dense index of a feature inside a FeatureRegistry.
struct FeatureIndex {
  std::uint32_t value = 0;

  auto operator<=>(const FeatureIndex&) const = default;
};

// Owns the set of known features. Names are unique and a feature's kind is
// fixed at registration.
class FeatureRegistry {
 public:
  explicit FeatureRegistry(std::size_t embedding_dim = kDefaultEmbeddingDim);

  FeatureIndex add(FeatureId feature);

  std::optional<FeatureIndex> find(std::string_view name) const;
  // Throws kUnknownFeature.
  FeatureIndex index_of(std::string_view name) const;

  const FeatureId& at(FeatureIndex index) const { return features_.at(index.value); }
  std::uint64_t name_hash(FeatureIndex index) const { return name_hashes_.at(index.value); }
  std::span<const FeatureId> features() const { return features_; }
  std::size_t size() const { return features_.size(); }
  std::size_t embedding_dim() const { return embedding_dim_; }

  bool operator==(const FeatureRegistry& other) const {
    return features_ == other.features_ && embedding_dim_ == other.embedding_dim_;
  }

 private:
  std::size_t embedding_dim_;
  std::vector<FeatureId> features_;
  std::vector<std::uint64_t> name_hashes_;
  std::unordered_map<std::string, std::uint32_t> by_name_;
};

enum class FadingMode { kCoverage, kDistribution };

struct FadingSchedule {
  int start_day = 0;
  double rate_per_day = 0.0;
  double initial_coverage = 1.0;
  double target_coverage = 0.0;
  FadingMode mode = FadingMode::kCoverage;

  bool is_fade_in() const { return target_coverage > initial_coverage; }
  // Throws kInvalidSchedule when a field is out of range.
  void validate() const;

  bool operator==(const FadingSchedule&) const = default;
};

enum class GuardrailAction { kPause, kRollback };

struct GuardrailConfig {
  int baseline_window_days = 5;
  double max_daily_ne_increase = 0.03;
  double max_cumulative_ne_increase = 0.04;
  GuardrailAction action_on_daily_breach = GuardrailAction::kPause;
  GuardrailAction action_on_cumulative_breach = GuardrailAction::kRollback;

  void validate() const;

  bool operator==(const GuardrailConfig&) const = default;
};

struct RolloutPolicy {
  std::vector<std::string> features;
  FadingSchedule schedule;
  double max_daily_ne_increase = 0.03;
  double max_cumulative_ne_increase = 0.04;
  int max_duration_days = 365;
  // Remaining guardrail settings; thresholds come from the fields above.
  int baseline_window_days = 5;
  GuardrailAction action_on_daily_breach = GuardrailAction::kPause;
  GuardrailAction action_on_cumulative_breach = GuardrailAction::kRollback;

  GuardrailConfig guardrail() const;

  bool operator==(const RolloutPolicy&) const = default;
};

enum class RolloutState { kPending, kActive, kPaused, kCompleted, kRolledBack };

bool is_terminal(RolloutState state);
bool is_legal_transition(RolloutState from, RolloutState to);

enum class TransitionReason { kSchedule, kOperator, kGuardrail };

struct HistoryEntry {
  int day = 0;
  std::uint64_t sequence = 0;
  RolloutState from = RolloutState::kPending;
  RolloutState to = RolloutState::kPending;
  TransitionReason reason = TransitionReason::kSchedule;

  bool operator==(const HistoryEntry&) const = default;
};

struct Rollout {
  std::string id;
  RolloutPolicy policy;
  RolloutState state = RolloutState::kPending;
  int paused_days_accumulated = 0;
  int created_day = 0;
  std::vector<HistoryEntry> history;
  // Coverage restored on rollback. Equals the schedule's initial_coverage
  // unless a paused rate change re-anchored the ramp.
  double restore_coverage = 1.0;

  // Applies a legal transition and appends it to history. Throws
  // kIllegalTransition otherwise.
  void transition(RolloutState to, int day, std::uint64_t sequence,
                  TransitionReason reason);

  bool operator==(const Rollout&) const = default;
};

// Sparse ids are one active id per slot; embeddings have the registry's
// fixed dimension.
using FeatureValue = std::variant<std::int64_t, std::vector<double>, double>;

struct FeatureEntry {
  FeatureIndex feature;
  FeatureValue value;

  bool operator==(const FeatureEntry&) const = default;
};

// Features are kept sorted by FeatureIndex with no duplicates.
struct Example {
  std::uint64_t request_id = 0;
  std::vector<FeatureEntry> features;
  int label = 0;
  int day = 0;

  const FeatureEntry* find(FeatureIndex feature) const;
  bool operator==(const Example&) const = default;
};

class CoverageSnapshot;

struct LoggedExample {
  std::uint64_t request_id = 0;
  std::vector<FeatureEntry> features;
  int label = 0;
  int day = 0;
  // The snapshot the adapter applied; its entries are the effective coverage.
  std::shared_ptr<const CoverageSnapshot> snapshot;

  const FeatureEntry* find(FeatureIndex feature) const;
  std::map<std::string, double> effective_coverage_snapshot() const;
  bool operator==(const LoggedExample& other) const;
};

enum class GuardrailVerdict { kOk, kPause, kRollback };

struct MetricPoint {
  int day = 0;
  double ne = 0.0;
  double mean_prediction = 0.0;
  double mean_label = 0.0;
  std::map<std::string, double> coverage_snapshot;
  GuardrailVerdict guardrail_verdict = GuardrailVerdict::kOk;

  bool operator==(const MetricPoint&) const = default;
};

std::string_view to_string(FeatureKind kind);
std::string_view to_string(FadingMode mode);
std::string_view to_string(GuardrailAction action);
std::string_view to_string(RolloutState state);
std::string_view to_string(TransitionReason reason);
// MetricPoint spelling: ok | paused | rolled_back.
std::string_view to_string(GuardrailVerdict verdict);

FeatureKind parse_feature_kind(std::string_view s);
FadingMode parse_fading_mode(std::string_view s);
GuardrailAction parse_guardrail_action(std::string_view s);
RolloutState parse_rollout_state(std::string_view s);
TransitionReason parse_transition_reason(std::string_view s);
GuardrailVerdict parse_guardrail_verdict(std::string_view s);

}  // namespace ieff

#endif  // IEFF_TYPES_H_
