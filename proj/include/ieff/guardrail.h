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

#ifndef IEFF_GUARDRAIL_H_
#define IEFF_GUARDRAIL_H_

#include <span>

#include "ieff/types.h"

namespace ieff {

struct GuardrailReading {
  double baseline_ne = 0.0;
  double daily_delta = 0.0;
  double cumulative_delta = 0.0;
  GuardrailVerdict verdict = GuardrailVerdict::kOk;
};

// Evaluates the latest point of `history` (ascending by day) against a
// rollout that started on `rollout_start_day`. Baseline NE is the mean over
// the baseline_window_days points strictly before the start. The cumulative
// check runs first. Throws kInsufficientHistory when fewer than
// baseline_window_days points precede the start.
GuardrailReading evaluate_guardrail(const GuardrailConfig& config,
                                    std::span<const MetricPoint> history,
                                    int rollout_start_day);

inline GuardrailVerdict evaluate(const GuardrailConfig& config,
                                 std::span<const MetricPoint> history,
                                 int rollout_start_day) {
  return evaluate_guardrail(config, history, rollout_start_day).verdict;
}

}  // namespace ieff

#endif  // IEFF_GUARDRAIL_H_
