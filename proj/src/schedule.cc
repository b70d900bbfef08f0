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

#include "ieff/schedule.h"

#include <algorithm>
#include <cmath>

#include "ieff/error.h"

namespace ieff {
namespace {

// Absorbs representation error in gap / rate, e.g. 0.9 / 0.1.
constexpr double kStepSlack = 1e-12;

int steps_to_target(const FadingSchedule& s) {
  const double gap = std::abs(s.initial_coverage - s.target_coverage);
  if (gap <= kStepSlack) return 0;
  return static_cast<int>(std::ceil((gap - kStepSlack) / s.rate_per_day));
}

}  // namespace

double effective_coverage(const FadingSchedule& s, int day, int paused_days) {
  const int elapsed = std::max(0, day - s.start_day - paused_days);
  if (elapsed == 0 || s.rate_per_day == 0.0) return s.initial_coverage;
  if (elapsed >= steps_to_target(s)) return s.target_coverage;
  const double delta = s.rate_per_day * elapsed;
  return s.is_fade_in() ? s.initial_coverage + delta : s.initial_coverage - delta;
}

double effective_scale(const FadingSchedule& s, int day, int paused_days) {
  if (s.mode != FadingMode::kDistribution) {
    throw Error(ErrorCode::kInvalidSchedule,
                "effective_scale requires a distribution-mode schedule");
  }
  return effective_coverage(s, day, paused_days);
}

int ramp_length_days(const FadingSchedule& s) {
  if (s.rate_per_day <= 0.0) {
    throw Error(ErrorCode::kInvalidSchedule,
                "a schedule with rate_per_day = 0 never completes");
  }
  return steps_to_target(s);
}

int completion_day(const FadingSchedule& s) { return s.start_day + ramp_length_days(s); }

CoverageCurve coverage_curve(const FadingSchedule& schedule, std::span<const bool> paused) {
  CoverageCurve curve;
  curve.values.reserve(paused.size());
  int paused_days = 0;
  for (std::size_t d = 0; d < paused.size(); ++d) {
    if (paused[d]) ++paused_days;
    curve.values.push_back(effective_coverage(schedule, static_cast<int>(d), paused_days));
  }
  return curve;
}

}  // namespace ieff
