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

#ifndef IEFF_CONTROL_PLANE_H_
#define IEFF_CONTROL_PLANE_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ieff/serving_adapter.h"
#include "ieff/types.h"

namespace ieff {

using SnapshotPtr = std::shared_ptr<const CoverageSnapshot>;

// Owns the rollout lifecycle and the simulated clock.
//
// Not internally synchronized: callers serialize all mutations through a
// single writer (see CommandQueue). snapshot() may be read from any thread;
// publication is an atomic pointer swap.
//
// Every rollout that has been created contributes its feature's entry to the
// published snapshot: Pending and RolledBack rollouts at initial coverage,
// Active, Paused and Completed ones at their schedule value. When a feature
// has several rollouts over time, the most recently created one wins.
class ControlPlane {
 public:
  explicit ControlPlane(FeatureRegistry registry);

  ControlPlane(const ControlPlane&) = delete;
  ControlPlane& operator=(const ControlPlane&) = delete;

  const FeatureRegistry& registry() const { return registry_; }
  int day() const { return day_; }
  std::uint64_t sequence() const { return sequence_; }

  // Validates and registers a Pending rollout. Throws kUnknownFeature,
  // kFeatureConflict or kInvalidSchedule naming the offending feature.
  Rollout create_rollout(RolloutPolicy policy);

  // day += 1, then runs schedule transitions and publishes a new snapshot.
  SnapshotPtr advance_day();

  Rollout pause(const std::string& id, TransitionReason reason = TransitionReason::kOperator);
  Rollout resume(const std::string& id, TransitionReason reason = TransitionReason::kOperator);
  // Instant restore to initial coverage; the restored snapshot is published
  // immediately.
  Rollout rollback(const std::string& id, TransitionReason reason = TransitionReason::kOperator);
  // Only Pending or Paused rollouts may change rate.
  Rollout set_rate(const std::string& id, double rate_per_day);

  const Rollout& rollout(const std::string& id) const;
  const std::vector<Rollout>& rollouts() const { return rollouts_; }
  std::vector<std::string> non_terminal_ids() const;

  // Coverage (or scale) the rollout currently imposes on its features.
  double current_fraction(const Rollout& rollout) const;

  SnapshotPtr snapshot() const;

 private:
  Rollout& mutable_rollout(const std::string& id);
  void validate(const RolloutPolicy& policy) const;
  void publish();

  FeatureRegistry registry_;
  int day_ = 0;
  std::uint64_t sequence_ = 0;
  std::uint64_t version_ = 0;
  std::vector<Rollout> rollouts_;
  SnapshotPtr snapshot_;
};

}  // namespace ieff

#endif  // IEFF_CONTROL_PLANE_H_
