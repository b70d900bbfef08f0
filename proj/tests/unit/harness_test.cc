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

#include "ieff/harness.h"

#include <gtest/gtest.h>

#include <cmath>

#include "ieff/error.h"
#include "test_util.h"

namespace ieff {
namespace {

using testing::fade_out;
using testing::small_fading;
using testing::small_world;

MetricPoint point(int day, double ne, double coverage = 1.0) {
  MetricPoint p;
  p.day = day;
  p.ne = ne;
  p.coverage_snapshot = {{"f", coverage}};
  return p;
}

TEST(PhaseBands, EdgesFollowTheTable) {
  EXPECT_EQ(phase_band_of(1.0), -1);
  EXPECT_EQ(phase_band_of(0.9000001), -1);
  EXPECT_EQ(phase_band_of(0.9), 0);
  EXPECT_EQ(phase_band_of(0.7000001), 0);
  EXPECT_EQ(phase_band_of(0.7), 1);
  EXPECT_EQ(phase_band_of(0.4), 2);
  EXPECT_EQ(phase_band_of(0.1), 3);
  EXPECT_EQ(phase_band_of(0.05), 3);
  EXPECT_EQ(phase_band_of(0.0), 3);
}

TEST(Summarize, SyntheticSeries) {
  // Baseline 0.5 over days 0..4, start on day 5, spike to 0.8 on day 7 and
  // decay back to 0.55.
  std::vector<MetricPoint> s;
  for (int d = 0; d < 5; ++d) s.push_back(point(d, 0.5));
  const double ne[] = {0.5, 0.6, 0.8, 0.7, 0.6, 0.57, 0.55, 0.55, 0.55, 0.55, 0.55};
  const double cov[] = {1.0, 0.8, 0.6, 0.3, 0.05, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < 11; ++i) s.push_back(point(5 + i, ne[i], cov[i]));
  const RunSummary r = summarize(s, 5, 10, "f");
  EXPECT_EQ(r.window_first_day, 6);
  EXPECT_EQ(r.window_last_day, 15);
  EXPECT_DOUBLE_EQ(r.baseline_ne, 0.5);
  EXPECT_NEAR(r.peak_daily_delta, 0.2, 1e-12);
  EXPECT_EQ(r.peak_daily_delta_day, 7);
  EXPECT_DOUBLE_EQ(r.peak_ne, 0.8);
  EXPECT_EQ(r.peak_ne_day, 7);
  EXPECT_NEAR(r.steady_state_ne, 0.55, 1e-12);
  // Threshold 0.55 + 0.1 * 0.25 = 0.575, first reached on day 10.
  EXPECT_EQ(r.recovery_days, 3);
  double cumulative = 0;
  for (int i = 1; i < 11; ++i) cumulative += ne[i] - 0.5;
  EXPECT_NEAR(r.cumulative_delta, cumulative, 1e-12);
  ASSERT_EQ(r.phases.size(), 4u);
  EXPECT_EQ(r.phases[0].days, 1);  // 0.8
  EXPECT_EQ(r.phases[1].days, 1);  // 0.6
  EXPECT_EQ(r.phases[2].days, 1);  // 0.3
  EXPECT_EQ(r.phases[3].days, 7);
  EXPECT_NEAR(r.phases[1].delta_ne_sum, 0.3, 1e-12);
  EXPECT_NEAR(r.phases[1].mean_ne, 0.8, 1e-12);
}

TEST(Summarize, FlatSeriesShowsNoDamage) {
  std::vector<MetricPoint> s;
  for (int d = 0; d < 12; ++d) s.push_back(point(d, 0.7));
  const RunSummary r = summarize(s, 5, 6, "");
  EXPECT_EQ(r.peak_daily_delta, 0.0);
  EXPECT_EQ(r.cumulative_delta, 0.0);
  EXPECT_EQ(r.recovery_days, 0);
  for (const auto& row : r.phases) EXPECT_EQ(row.days, 0);
}

TEST(Simulation, EndToEndDeterminism) {
  const RunReport a = run_scenario(small_world(2), small_fading());
  const RunReport b = run_scenario(small_world(2), small_fading());
  EXPECT_EQ(a, b);
  EXPECT_NE(a, run_scenario(small_world(3), small_fading()));
  EXPECT_EQ(a.series.size(), 30u);
  EXPECT_TRUE(verify_summary(a, small_fading().window_days));
  RunReport tampered = a;
  tampered.summary.peak_daily_delta += 1e-9;
  EXPECT_FALSE(verify_summary(tampered, small_fading().window_days));
}

TEST(Simulation, ConsistencyAndConservation) {
  Simulation sim(small_world(4), small_fading(0.2));
  sim.run_to_end();
  const ConsistencyStats& c = sim.consistency();
  EXPECT_EQ(c.generated, 30u * 2000u);
  EXPECT_EQ(c.served, c.generated);
  EXPECT_EQ(c.logged, c.generated);
  EXPECT_GT(c.audited, 30u * 20u);
  EXPECT_EQ(c.mismatches, 0u);
}

TEST(Simulation, ExposureIsMonotoneUnderFadeOut) {
  Simulation sim(small_world(5), small_fading(0.07));
  sim.run_to_end();
  const auto& exposure = sim.exposure("sparse_00");
  ASSERT_EQ(exposure.size(), 30u);
  for (int d = 0; d < 8; ++d) EXPECT_EQ(exposure[d], 2000) << d;
  for (std::size_t d = 1; d < exposure.size(); ++d) {
    EXPECT_LE(exposure[d], exposure[d - 1]) << d;
  }
  EXPECT_EQ(exposure.back(), 0);
  EXPECT_THROW(sim.exposure("dense_00"), Error);
}

TEST(Simulation, MetricPointsCarryTheServedCoverage) {
  const RunReport r = run_scenario(small_world(6), small_fading(0.25));
  for (const auto& p : r.series) {
    // No entry until the rollout is created on day 8.
    if (p.day < 8) {
      EXPECT_EQ(p.coverage_snapshot.count("sparse_00"), 0u) << p.day;
      continue;
    }
    const double expected = std::max(0.0, 1.0 - 0.25 * (p.day - 8));
    EXPECT_NEAR(p.coverage_snapshot.at("sparse_00"), expected, 1e-12) << p.day;
    EXPECT_TRUE(std::isfinite(p.ne));
    EXPECT_GT(p.mean_label, 0.0);
  }
  EXPECT_EQ(r.coverage_features, std::vector<std::string>{"sparse_00"});
}

TEST(Simulation, ModelRecoversAfterFullRemoval) {
  // Default-sized world, shortened: the recovery signal needs full-size days.
  WorldConfig w;
  w.seed = 1;
  w.simulation_days = 32;
  ScenarioConfig s;
  s.name = "zero";
  s.kind = ScenarioKind::kZeroOut;
  s.warmup_days = 15;
  s.window_days = 16;
  s.rollouts.push_back(
      {fade_out({"sparse_00", "sparse_01", "sparse_02", "sparse_03", "sparse_04"}, 15, 1.0, 5),
       std::nullopt});
  s.guardrails_enabled = false;
  const RunReport r = run_scenario(w, s);
  // Coverage is c0 on the start day and 0 from the next day on.
  EXPECT_EQ(r.series[15].coverage_snapshot.at("sparse_00"), 1.0);
  EXPECT_EQ(r.series[16].coverage_snapshot.at("sparse_00"), 0.0);
  const double first_day_removed = r.series[16].ne;
  EXPECT_GT(first_day_removed, r.series[15].ne);
  for (int k = 5; k <= 15; ++k) {
    EXPECT_LT(r.series[16 + k].ne, first_day_removed) << k;
  }
}

TEST(Simulation, StepAfterTheHorizonThrows) {
  Simulation sim(small_world(1, 12), small_fading());
  sim.run_to_end();
  EXPECT_TRUE(sim.done());
  EXPECT_FALSE(sim.aborted());
  try {
    sim.step();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSimulationFinished);
  }
}

TEST(Simulation, GuardrailRollbackAbortsWithTheReportSoFar) {
  ScenarioConfig s = small_fading(0.02);
  s.rollouts[0].policy.max_duration_days = 60;
  // Thresholds sized for the small world's day-to-day noise.
  s.rollouts[0].policy.max_daily_ne_increase = 0.5;
  s.rollouts[0].policy.max_cumulative_ne_increase = 0.1;
  s.guardrails_enabled = true;
  s.faults.push_back({12, 0.2});
  const RunReport r = run_scenario(small_world(3), s);
  EXPECT_TRUE(r.aborted);
  ASSERT_EQ(r.series.size(), 13u);
  EXPECT_EQ(r.series.back().guardrail_verdict, GuardrailVerdict::kRollback);
  for (std::size_t i = 0; i + 1 < r.series.size(); ++i) {
    EXPECT_EQ(r.series[i].guardrail_verdict, GuardrailVerdict::kOk) << i;
  }

  Simulation sim(small_world(3), s);
  sim.run_to_end();
  const Rollout& rollout = sim.control_plane().rollout(sim.scenario_rollout_ids().at(0));
  EXPECT_EQ(rollout.state, RolloutState::kRolledBack);
  EXPECT_EQ(rollout.history.back().reason, TransitionReason::kGuardrail);
  EXPECT_EQ(rollout.history.back().day, 12);
  EXPECT_EQ(sim.control_plane().snapshot()->fractions().at("sparse_00"), 1.0);
}

TEST(Simulation, DailyBreachPausesTheRollout) {
  ScenarioConfig s = small_fading(0.02);
  s.rollouts[0].policy.max_duration_days = 60;
  s.guardrails_enabled = true;
  s.rollouts[0].policy.max_cumulative_ne_increase = 1.0;
  s.rollouts[0].policy.max_daily_ne_increase = 0.1;
  s.faults.push_back({13, 0.2});
  Simulation sim(small_world(3), s);
  sim.run_to_end();
  EXPECT_FALSE(sim.aborted());
  const Rollout& rollout = sim.control_plane().rollout(sim.scenario_rollout_ids().at(0));
  EXPECT_EQ(rollout.state, RolloutState::kPaused);
  EXPECT_EQ(rollout.history.back().reason, TransitionReason::kGuardrail);
  EXPECT_EQ(rollout.history.back().day, 13);
  EXPECT_EQ(sim.metrics()[13].guardrail_verdict, GuardrailVerdict::kPause);
  // Frozen from the pause onward.
  const double frozen = sim.metrics()[14].coverage_snapshot.at("sparse_00");
  EXPECT_EQ(sim.metrics().back().coverage_snapshot.at("sparse_00"), frozen);
}

TEST(Simulation, OperatorActionsRunOnTheirDay) {
  ScenarioConfig s = small_fading(0.1);
  s.operator_actions.push_back({11, OperatorActionKind::kPause, 0, 0.0});
  s.operator_actions.push_back({13, OperatorActionKind::kSetRate, 0, 0.2});
  s.operator_actions.push_back({14, OperatorActionKind::kResume, 0, 0.0});
  const RunReport r = run_scenario(small_world(7), s);
  auto cov = [&](int d) { return r.series[d].coverage_snapshot.at("sparse_00"); };
  // The pause on day 11 holds the coverage already published for day 11; the
  // rate change re-anchors there and the shifted ramp resumes after day 14.
  EXPECT_NEAR(cov(10), 0.8, 1e-12);
  EXPECT_NEAR(cov(11), 0.7, 1e-12);
  EXPECT_NEAR(cov(13), 0.7, 1e-12);
  EXPECT_NEAR(cov(14), 0.7, 1e-12);
  EXPECT_NEAR(cov(15), 0.5, 1e-12);
  EXPECT_NEAR(cov(16), 0.3, 1e-12);

  ScenarioConfig early = small_fading();
  early.operator_actions.push_back({3, OperatorActionKind::kPause, 0, 0.0});
  EXPECT_THROW(run_scenario(small_world(7), early), Error);
}

TEST(Simulation, InvalidScenariosAreRejected) {
  ScenarioConfig s = small_fading();
  s.rollouts[0].policy.features = {"sparse_42"};
  try {
    Simulation sim(small_world(), s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownFeature);
  }
  ScenarioConfig z = small_fading();
  z.kind = ScenarioKind::kZeroOut;
  EXPECT_THROW(Simulation(small_world(), z), Error);
  ScenarioConfig b = small_fading();
  b.kind = ScenarioKind::kBaseline;
  EXPECT_THROW(Simulation(small_world(), b), Error);
}

TEST(CompareRuns, IdentityGivesZeroDeltasAndUnitRatios) {
  const RunReport r = run_scenario(small_world(8), small_fading());
  const RunComparison c = compare_runs(r, r);
  EXPECT_EQ(c.peak_ratio, 1.0);
  EXPECT_EQ(c.cumulative_ratio, 1.0);
  EXPECT_EQ(c.recovery_ratio, 1.0);
  EXPECT_EQ(c.peak_delta, 0.0);
  EXPECT_EQ(c.cumulative_delta, 0.0);
  ASSERT_EQ(c.phases.size(), 4u);
  for (const auto& p : c.phases) {
    EXPECT_EQ(p.paired_delta_sum, 0.0);
    EXPECT_EQ(p.normalized_pct, 100.0);
    EXPECT_EQ(p.deficit_pct, 0.0);
  }
  EXPECT_EQ(average_comparisons({c, c}), c);
}

TEST(CompareRuns, PhasesFollowTheReferenceCoverage) {
  const RunReport a = run_scenario(small_world(8), small_fading(0.3));
  const RunReport b = run_scenario(small_world(8), small_fading(0.1));
  const RunComparison c = compare_runs(a, b);
  std::vector<int> expected(4, 0);
  for (const auto& p : b.series) {
    if (p.day < b.summary.window_first_day || p.day > b.summary.window_last_day) continue;
    ++expected[phase_band_of(p.coverage_snapshot.at("sparse_00"))];
  }
  int days = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(c.phases[k].days, expected[k]) << k;
    EXPECT_GT(c.phases[k].days, 0) << k;
    days += c.phases[k].days;
  }
  // Every window day of b lies at or below 90% coverage.
  EXPECT_EQ(days, 15);
  // Swapping the runs regroups the days by the faster fade.
  EXPECT_NE(compare_runs(b, a).phases[3].days, c.phases[3].days);
  for (const auto& p : c.phases) {
    EXPECT_NEAR(p.deficit_pct, p.normalized_pct - 100.0, 1e-12);
  }
}

TEST(CompareRuns, MismatchedHorizonsAreRejected) {
  const RunReport a = run_scenario(small_world(8), small_fading());
  const RunReport b = run_scenario(small_world(8, 25), small_fading());
  try {
    compare_runs(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMismatchedHorizon);
  }
  ScenarioConfig other = small_fading();
  other.warmup_days = 9;
  other.rollouts[0].policy.schedule.start_day = 9;
  EXPECT_THROW(compare_runs(a, run_scenario(small_world(8), other)), Error);
}

TEST(CompareRuns, BaselineRunsHaveNoPhases) {
  ScenarioConfig base;
  base.warmup_days = 8;
  base.window_days = 15;
  const RunReport a = run_scenario(small_world(21), base);
  const RunReport b = run_scenario(small_world(22), base);
  const RunComparison c = compare_runs(a, b);
  for (const auto& p : c.phases) EXPECT_EQ(p.days, 0);
}

}  // namespace
}  // namespace ieff
