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

#ifndef IEFF_SCHEDULE_H_
#define IEFF_SCHEDULE_H_

#include <span>
#include <vector>

#include "ieff/types.h"

namespace ieff {

// Linear ramp from initial_coverage toward target_coverage. Days before
// start_day and paused days contribute no elapsed fading time. The value is
// always recomputed from the integer step count, never accumulated.
double effective_coverage(const FadingSchedule& schedule, int day, int paused_days);

// Same ramp, read as the multiplicative value scale for distribution mode.
// Throws kInvalidSchedule for coverage-mode schedules.
double effective_scale(const FadingSchedule& schedule, int day, int paused_days);

// Number of active days the ramp needs to reach target_coverage.
// Throws kInvalidSchedule when rate_per_day is 0.
int ramp_length_days(const FadingSchedule& schedule);

// First day at which coverage equals target_coverage, assuming no pauses.
int completion_day(const FadingSchedule& schedule);

struct CoverageCurve {
  std::vector<double> values;
};

// paused[d] marks day d as a paused day (the rollout was Paused when the clock
// entered day d).
CoverageCurve coverage_curve(const FadingSchedule& schedule, std::span<const bool> paused);

}  // namespace ieff

#endif  // IEFF_SCHEDULE_H_
