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

#include "ieff/control_plane.h"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>

#include "ieff/error.h"
#include "ieff/schedule.h"

namespace ieff {

ControlPlane::ControlPlane(FeatureRegistry registry) : registry_(std::move(registry)) {
  publish();
}

SnapshotPtr ControlPlane::snapshot() const { return std::atomic_load(&snapshot_); }

void ControlPlane::validate(const RolloutPolicy& policy) const {
  if (policy.features.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "rollout policy names no features");
  }
  std::set<std::string> seen;
  for (const auto& name : policy.features) {
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::kInvalidArgument, "feature '" + name + "' listed twice");
    }
    const FeatureIndex index = registry_.index_of(name);
    if (policy.schedule.mode == FadingMode::kDistribution &&
        registry_.at(index).kind == FeatureKind::kSparseId) {
      throw Error(ErrorCode::kInvalidSchedule,
                  "feature '" + name + "': distribution mode is not defined for sparse-id features");
    }
  }
  policy.schedule.validate();
  if (policy.schedule.start_day < day_) {
    throw Error(ErrorCode::kInvalidSchedule, "start_day " +
                                                 std::to_string(policy.schedule.start_day) +
                                                 " is in the past (day " + std::to_string(day_) + ")");
  }
  if (!(policy.max_daily_ne_increase > 0.0) || !(policy.max_cumulative_ne_increase > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "guardrail thresholds must be > 0");
  }
  if (policy.max_duration_days <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_duration_days must be > 0");
  }
  policy.guardrail().validate();
  if (policy.schedule.rate_per_day > 0.0 &&
      ramp_length_days(policy.schedule) > policy.max_duration_days) {
    throw Error(ErrorCode::kInvalidSchedule,
                "feature '" + policy.features.front() + "': ramp needs " +
                    std::to_string(ramp_length_days(policy.schedule)) +
                    " days, exceeding max_duration_days " +
                    std::to_string(policy.max_duration_days));
  }
  for (const auto& rollout : rollouts_) {
    if (is_terminal(rollout.state)) continue;
    for (const auto& name : policy.features) {
      if (std::find(rollout.policy.features.begin(), rollout.policy.features.end(), name) !=
          rollout.policy.features.end()) {
        throw Error(ErrorCode::kFeatureConflict,
                    "feature '" + name + "' is already under rollout " + rollout.id);
      }
    }
  }
}

Rollout ControlPlane::create_rollout(RolloutPolicy policy) {
  validate(policy);
  ++sequence_;
  Rollout rollout;
  rollout.id = "rollout-" + std::to_string(rollouts_.size() + 1);
  rollout.policy = std::move(policy);
  rollout.created_day = day_;
  rollout.restore_coverage = rollout.policy.schedule.initial_coverage;
  rollouts_.push_back(rollout);
  publish();
  return rollout;
}

SnapshotPtr ControlPlane::advance_day() {
  ++day_;
  ++sequence_;
  for (auto& r : rollouts_) {
    const FadingSchedule& s = r.policy.schedule;
    if (r.state == RolloutState::kPending && s.start_day <= day_) {
      r.transition(RolloutState::kActive, day_, sequence_, TransitionReason::kSchedule);
    } else if (r.state == RolloutState::kPaused) {
      ++r.paused_days_accumulated;
    }
    if (r.state == RolloutState::kActive) {
      const int elapsed = day_ - s.start_day - r.paused_days_accumulated;
      const bool ramp_done = s.rate_per_day > 0.0 && elapsed >= ramp_length_days(s);
      if (ramp_done || elapsed >= r.policy.max_duration_days) {
        r.transition(RolloutState::kCompleted, day_, sequence_, TransitionReason::kSchedule);
      }
    }
  }
  publish();
  return snapshot();
}

Rollout& ControlPlane::mutable_rollout(const std::string& id) {
  for (auto& r : rollouts_) {
    if (r.id == id) return r;
  }
  throw Error(ErrorCode::kNotFound, "no rollout with id '" + id + "'");
}

const Rollout& ControlPlane::rollout(const std::string& id) const {
  return const_cast<ControlPlane*>(this)->mutable_rollout(id);
}

Rollout ControlPlane::pause(const std::string& id, TransitionReason reason) {
  Rollout& r = mutable_rollout(id);
  r.transition(RolloutState::kPaused, day_, ++sequence_, reason);
  publish();
  return r;
}

Rollout ControlPlane::resume(const std::string& id, TransitionReason reason) {
  Rollout& r = mutable_rollout(id);
  if (r.state != RolloutState::kPaused) {
    throw Error(ErrorCode::kIllegalTransition,
                "rollout " + id + ": resume requires Paused, state is " +
                    std::string(to_string(r.state)));
  }
  r.transition(RolloutState::kActive, day_, ++sequence_, reason);
  publish();
  return r;
}

Rollout ControlPlane::rollback(const std::string& id, TransitionReason reason) {
  Rollout& r = mutable_rollout(id);
  r.transition(RolloutState::kRolledBack, day_, ++sequence_, reason);
  publish();
  return r;
}

Rollout ControlPlane::set_rate(const std::string& id, double rate_per_day) {
  Rollout& r = mutable_rollout(id);
  if (r.state != RolloutState::kPending && r.state != RolloutState::kPaused) {
    throw Error(ErrorCode::kIllegalTransition,
                "rollout " + id + ": rate can only change while Pending or Paused (state is " +
                    std::string(to_string(r.state)) + "); pause first");
  }
  RolloutPolicy updated = r.policy;
  updated.schedule.rate_per_day = rate_per_day;
  updated.schedule.validate();
  const bool reanchor = r.state == RolloutState::kPaused;
  if (reanchor) {
    // Coverage at the current day is unchanged under the new rate.
    updated.schedule.initial_coverage = current_fraction(r);
    updated.schedule.start_day = day_;
  }
  if (rate_per_day > 0.0 && ramp_length_days(updated.schedule) > updated.max_duration_days) {
    throw Error(ErrorCode::kInvalidSchedule, "rollout " + id + ": ramp exceeds max_duration_days");
  }
  if (reanchor) r.paused_days_accumulated = 0;
  r.policy = std::move(updated);
  ++sequence_;
  publish();
  return r;
}

double ControlPlane::current_fraction(const Rollout& r) const {
  const FadingSchedule& s = r.policy.schedule;
  switch (r.state) {
    case RolloutState::kPending:
      return s.initial_coverage;
    case RolloutState::kRolledBack:
      return r.restore_coverage;
    default:
      return effective_coverage(s, day_, r.paused_days_accumulated);
  }
}

std::vector<std::string> ControlPlane::non_terminal_ids() const {
  std::vector<std::string> ids;
  for (const auto& r : rollouts_) {
    if (!is_terminal(r.state)) ids.push_back(r.id);
  }
  return ids;
}

void ControlPlane::publish() {
  std::map<std::string, std::pair<FadingMode, double>> entries;
  for (const auto& r : rollouts_) {
    for (const auto& name : r.policy.features) {
      entries[name] = {r.policy.schedule.mode, current_fraction(r)};
    }
  }
  auto next = std::make_shared<const CoverageSnapshot>(
      CoverageSnapshot::from_entries(++version_, day_, registry_, entries));
  std::atomic_store(&snapshot_, SnapshotPtr(std::move(next)));
}

}  // namespace ieff
