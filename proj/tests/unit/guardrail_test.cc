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

#include <gtest/gtest.h>

#include <vector>

#include "ieff/error.h"

namespace ieff {
namespace {

std::vector<MetricPoint> series(const std::vector<double>& ne) {
  std::vector<MetricPoint> out;
  for (std::size_t i = 0; i < ne.size(); ++i) {
    MetricPoint p;
    p.day = static_cast<int>(i);
    p.ne = ne[i];
    out.push_back(p);
  }
  return out;
}

TEST(Guardrail, FlatSeriesIsOk) {
  const auto h = series(std::vector<double>(12, 0.8));
  const GuardrailReading r = evaluate_guardrail(GuardrailConfig{}, h, 6);
  EXPECT_EQ(r.verdict, GuardrailVerdict::kOk);
  EXPECT_DOUBLE_EQ(r.baseline_ne, 0.8);
  EXPECT_EQ(r.daily_delta, 0.0);
  EXPECT_EQ(r.cumulative_delta, 0.0);
}

TEST(Guardrail, DailyBreachFiresTheConfiguredAction) {
  GuardrailConfig c;
  c.max_daily_ne_increase = 0.001;
  c.max_cumulative_ne_increase = 1.0;
  const auto h = series({0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.502});
  EXPECT_EQ(evaluate(c, h, 5), GuardrailVerdict::kPause);
  c.action_on_daily_breach = GuardrailAction::kRollback;
  EXPECT_EQ(evaluate(c, h, 5), GuardrailVerdict::kRollback);
  // Exactly at the threshold does not breach.
  const auto at = series({0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5 + 0.0009});
  EXPECT_EQ(evaluate(c, at, 5), GuardrailVerdict::kOk);
}

TEST(Guardrail, BaselineUsesOnlyDaysBeforeTheStart) {
  // Days 0..4 average 0.6; days from the start onward are excluded.
  const auto h = series({0.4, 0.5, 0.6, 0.7, 0.8, 0.61, 0.62, 0.63});
  const GuardrailReading r = evaluate_guardrail(GuardrailConfig{}, h, 5);
  EXPECT_NEAR(r.baseline_ne, 0.6, 1e-15);
  EXPECT_NEAR(r.cumulative_delta, 0.03, 1e-12);
  EXPECT_NEAR(r.daily_delta, 0.01, 1e-12);
  // A later start shifts the trailing window.
  EXPECT_NEAR(evaluate_guardrail(GuardrailConfig{}, h, 7).baseline_ne,
              (0.6 + 0.7 + 0.8 + 0.61 + 0.62) / 5, 1e-15);
}

TEST(Guardrail, CumulativeOutranksDaily) {
  GuardrailConfig c;
  c.action_on_cumulative_breach = GuardrailAction::kRollback;
  c.action_on_daily_breach = GuardrailAction::kPause;
  const auto h = series({0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.6});
  EXPECT_EQ(evaluate(c, h, 6), GuardrailVerdict::kRollback);
  c.action_on_cumulative_breach = GuardrailAction::kPause;
  c.action_on_daily_breach = GuardrailAction::kRollback;
  EXPECT_EQ(evaluate(c, h, 6), GuardrailVerdict::kPause);
}

TEST(Guardrail, InjectedStepUnderRollback) {
  std::vector<double> ne(10, 0.7);
  ne.push_back(0.75);
  GuardrailConfig c;
  c.action_on_cumulative_breach = GuardrailAction::kRollback;
  const GuardrailReading r = evaluate_guardrail(c, series(ne), 8);
  EXPECT_EQ(r.verdict, GuardrailVerdict::kRollback);
  EXPECT_NEAR(r.cumulative_delta, 0.05, 1e-12);
}

TEST(Guardrail, InsufficientHistory) {
  const auto h = series({0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
  try {
    evaluate(GuardrailConfig{}, h, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientHistory);
  }
  EXPECT_NO_THROW(evaluate(GuardrailConfig{}, h, 5));
  EXPECT_THROW(evaluate(GuardrailConfig{}, std::vector<MetricPoint>{}, 0), Error);
}

TEST(Guardrail, ConfigValidation) {
  GuardrailConfig c;
  c.baseline_window_days = 1;
  EXPECT_THROW(c.validate(), Error);
  c = GuardrailConfig{};
  c.max_daily_ne_increase = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = GuardrailConfig{};
  c.max_cumulative_ne_increase = -0.1;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_NO_THROW(GuardrailConfig{}.validate());
}

TEST(Guardrail, PureAndDeterministic) {
  const auto h = series({0.5, 0.52, 0.49, 0.51, 0.5, 0.53, 0.56, 0.58});
  const GuardrailReading a = evaluate_guardrail(GuardrailConfig{}, h, 5);
  const GuardrailReading b = evaluate_guardrail(GuardrailConfig{}, h, 5);
  EXPECT_EQ(a.verdict, b.verdict);
  EXPECT_EQ(a.baseline_ne, b.baseline_ne);
  EXPECT_EQ(a.daily_delta, b.daily_delta);
  EXPECT_EQ(a.cumulative_delta, b.cumulative_delta);
}

}  // namespace
}  // namespace ieff
