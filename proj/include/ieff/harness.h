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

#ifndef IEFF_HARNESS_H_
#define IEFF_HARNESS_H_

// Serve -> log -> train day loop over synthetic traffic, and the run/compare
// statistics built on top of it.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ieff/control_plane.h"
#include "ieff/guardrail.h"
#include "ieff/trainer.h"
#include "ieff/types.h"
#include "ieff/world.h"

namespace ieff {

enum class ScenarioKind { kBaseline, kFading, kZeroOut };

std::string_view to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(std::string_view s);

struct ScenarioRollout {
  RolloutPolicy policy;
  // Day the rollout is created; defaults to the scenario's warmup_days.
  std::optional<int> create_day;

  bool operator==(const ScenarioRollout&) const = default;
};

enum class OperatorActionKind { kPause, kResume, kRollback, kSetRate };

struct OperatorAction {
  int day = 0;
  OperatorActionKind action = OperatorActionKind::kPause;
  // Index into ScenarioConfig::rollouts.
  int rollout = 0;
  double rate_per_day = 0.0;

  bool operator==(const OperatorAction&) const = default;
};

// Additive NE offset reported from `day` onward (metric fault injection).
struct MetricFault {
  int day = 0;
  double ne_offset = 0.0;

  bool operator==(const MetricFault&) const = default;
};

inline constexpr double kScenarioLearningRate = 0.01;

struct ScenarioConfig {
  std::string name = "baseline";
  ScenarioKind kind = ScenarioKind::kBaseline;
  int warmup_days = 15;
  std::vector<ScenarioRollout> rollouts;
  // Summary window: days (warmup_days, warmup_days + window_days].
  int window_days = 50;
  std::vector<OperatorAction> operator_actions;
  std::vector<MetricFault> faults;
  bool guardrails_enabled = true;
  // Monitors runs without rollouts (verdicts are reported, never acted on).
  GuardrailConfig baseline_guardrail;
  // Lower than the trainer default: at 0.05 the day-to-day SGD noise in NE
  // swamps the guardrail thresholds on a 20k-request day.
  double learning_rate = kScenarioLearningRate;
  std::size_t model_buckets = kDefaultBucketCount;

  int rollout_start_day() const { return warmup_days; }
  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;
};

struct PhaseBand {
  std::string_view name;
  double upper;  // inclusive
  double lower;  // exclusive, except the final band which includes 0
};

inline constexpr std::array<PhaseBand, 4> kPhaseBands{{
    {"90-70", 0.9, 0.7},
    {"70-40", 0.7, 0.4},
    {"40-10", 0.4, 0.1},
    {"10-0", 0.1, 0.0},
}};

// Index into kPhaseBands, or -1 above 90% coverage.
int phase_band_of(double coverage);

struct PhaseRow {
  std::string band;
  int days = 0;
  double delta_ne_sum = 0.0;  // sum of (NE - baseline) over the band's days
  double mean_ne = 0.0;

  bool operator==(const PhaseRow&) const = default;
};

struct RunSummary {
  int rollout_start_day = 0;
  int window_first_day = 0;
  int window_last_day = 0;
  double baseline_ne = 0.0;
  double peak_daily_delta = 0.0;
  int peak_daily_delta_day = 0;
  double cumulative_delta = 0.0;
  double peak_ne = 0.0;
  int peak_ne_day = 0;
  double steady_state_ne = 0.0;
  // Days after the NE peak until NE <= steady + 10% of (peak - steady); -1 if
  // never.
  int recovery_days = -1;
  std::string tracked_feature;
  std::vector<PhaseRow> phases;
  int guardrail_triggers = 0;

  bool operator==(const RunSummary&) const = default;
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<MetricPoint> series;
  // Columns for the CSV export, sorted by name.
  std::vector<std::string> coverage_features;
  bool aborted = false;
  RunSummary summary;

  bool operator==(const RunReport&) const = default;
};

inline constexpr int kSteadyStateDays = 5;
inline constexpr double kRecoveryEpsilonFraction = 0.1;

// Recomputes summary statistics from a series. The report stores the result
// and verify_summary() checks the stored copy.
RunSummary summarize(const std::vector<MetricPoint>& series, int rollout_start_day,
                     int window_days, const std::string& tracked_feature,
                     int baseline_window_days = 5);
bool verify_summary(const RunReport& report, int window_days);

// Audit counters for the training-serving consistency checks.
struct ConsistencyStats {
  std::uint64_t generated = 0;
  std::uint64_t served = 0;
  std::uint64_t logged = 0;
  std::uint64_t audited = 0;
  std::uint64_t mismatches = 0;
};

// One simulation session. A day is: serve the current snapshot's day of
// traffic, log it, train, evaluate NE on faded holdout traffic, run
// guardrails, then advance the control-plane clock.
class Simulation {
 public:
  Simulation(WorldConfig world, ScenarioConfig scenario);

  int day() const { return control_plane_.day(); }
  bool done() const;
  bool aborted() const { return aborted_; }

  // Runs one day and returns its metric point. Throws once done().
  const MetricPoint& step();
  void run_to_end();

  ControlPlane& control_plane() { return control_plane_; }
  const ControlPlane& control_plane() const { return control_plane_; }
  const World& world() const { return world_; }
  const ScenarioConfig& scenario() const { return scenario_; }
  const ModelState& model() const { return model_; }
  const std::vector<MetricPoint>& metrics() const { return metrics_; }
  const ConsistencyStats& consistency() const { return consistency_; }
  // Per-day count of served requests carrying `feature`, if tracked.
  const std::vector<int>& exposure(const std::string& feature) const;
  // Rollout ids in scenario order (empty until created).
  const std::vector<std::string>& scenario_rollout_ids() const { return scenario_ids_; }

  RunReport report() const;

 private:
  void apply_scheduled_commands(int day);
  GuardrailVerdict run_guardrails(int day);

  World world_;
  ScenarioConfig scenario_;
  ControlPlane control_plane_;
  Featurizer featurizer_;
  ModelState model_;
  std::vector<MetricPoint> metrics_;
  std::vector<std::string> scenario_ids_;
  std::vector<std::string> tracked_;
  std::vector<std::vector<int>> exposure_;
  ConsistencyStats consistency_;
  bool aborted_ = false;
};

RunReport run_scenario(const WorldConfig& world, const ScenarioConfig& scenario);

struct PhaseComparison {
  std::string band;
  int days = 0;
  double paired_delta_sum = 0.0;  // sum over band days of NE_a - NE_b
  double normalized_pct = 100.0;  // a's performance with b = 100%
  double deficit_pct = 0.0;       // normalized_pct - 100

  bool operator==(const PhaseComparison&) const = default;
};

struct RunComparison {
  std::string a;
  std::string b;
  std::vector<PhaseComparison> phases;
  double peak_ratio = 1.0;
  double cumulative_ratio = 1.0;
  double recovery_ratio = 1.0;
  double peak_delta = 0.0;
  double cumulative_delta = 0.0;

  bool operator==(const RunComparison&) const = default;
};

// Phases follow b's coverage curve on the shared day axis. Throws
// kMismatchedHorizon when the runs cover different days or windows.
RunComparison compare_runs(const RunReport& a, const RunReport& b);

// Field-wise mean over paired-seed comparisons of the same two scenarios.
RunComparison average_comparisons(const std::vector<RunComparison>& comparisons);

}  // namespace ieff

#endif  // IEFF_HARNESS_H_
