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

#include "ieff/guardrail.h"

#include <string>

#include "ieff/error.h"

namespace ieff {
namespace {

GuardrailVerdict to_verdict(GuardrailAction action) {
  return action == GuardrailAction::kPause ? GuardrailVerdict::kPause
                                           : GuardrailVerdict::kRollback;
}

}  // namespace

GuardrailReading evaluate_guardrail(const GuardrailConfig& config,
                                    std::span<const MetricPoint> history,
                                    int rollout_start_day) {
  if (history.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "guardrail evaluation needs a non-empty history");
  }
  config.validate();

  const int window = config.baseline_window_days;
  double sum = 0.0;
  int count = 0;
  for (auto it = history.rbegin(); it != history.rend() && count < window; ++it) {
    if (it->day < rollout_start_day) {
      sum += it->ne;
      ++count;
    }
  }
  if (count < window) {
    throw Error(ErrorCode::kInsufficientHistory,
                "guardrail needs " + std::to_string(window) + " days before day " +
                    std::to_string(rollout_start_day) + ", have " + std::to_string(count));
  }

  GuardrailReading reading;
  reading.baseline_ne = sum / window;
  const MetricPoint& today = history.back();
  reading.cumulative_delta = today.ne - reading.baseline_ne;
  reading.daily_delta = history.size() >= 2 ? today.ne - history[history.size() - 2].ne : 0.0;

  if (reading.cumulative_delta > config.max_cumulative_ne_increase) {
    reading.verdict = to_verdict(config.action_on_cumulative_breach);
  } else if (reading.daily_delta > config.max_daily_ne_increase) {
    reading.verdict = to_verdict(config.action_on_daily_breach);
  }
  return reading;
}

}  // namespace ieff
