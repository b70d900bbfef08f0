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

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "ieff/error.h"
#include "ieff/serving_adapter.h"

namespace ieff {
namespace {

// Every 97th served request is re-derived and compared with its log entry.
constexpr int kAuditStride = 97;

constexpr std::array<std::pair<std::string_view, ScenarioKind>, 3> kScenarioKinds{{
    {"baseline", ScenarioKind::kBaseline},
    {"fading", ScenarioKind::kFading},
    {"zero-out", ScenarioKind::kZeroOut},
}};

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double coverage_of(const MetricPoint& point, const std::string& feature) {
  auto it = point.coverage_snapshot.find(feature);
  return it == point.coverage_snapshot.end() ? 1.0 : it->second;
}

double ratio(double a, double b) {
  if (a == b) return 1.0;
  if (b == 0.0) return std::numeric_limits<double>::infinity();
  return a / b;
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  for (const auto& [name, k] : kScenarioKinds) {
    if (k == kind) return name;
  }
  return "?";
}

ScenarioKind parse_scenario_kind(std::string_view s) {
  for (const auto& [name, k] : kScenarioKinds) {
    if (name == s) return k;
  }
  throw Error(ErrorCode::kParseError, "invalid scenario kind '" + std::string(s) + "'");
}

void ScenarioConfig::validate() const {
  if (warmup_days < 0 || window_days <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "warmup_days must be >= 0 and window_days > 0");
  }
  if (kind == ScenarioKind::kBaseline && !rollouts.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "baseline scenario '" + name + "' has rollouts");
  }
  if (kind != ScenarioKind::kBaseline && rollouts.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "scenario '" + name + "' has no rollouts");
  }
  for (const auto& r : rollouts) {
    const FadingSchedule& s = r.policy.schedule;
    if (kind == ScenarioKind::kZeroOut &&
        (s.rate_per_day != 1.0 || s.target_coverage != 0.0 || s.initial_coverage != 1.0)) {
      throw Error(ErrorCode::kInvalidSchedule,
                  "zero-out scenario '" + name + "' requires rate 1.0 from coverage 1.0 to 0.0");
    }
    const int create = r.create_day.value_or(warmup_days);
    if (create < 0 || create > s.start_day) {
      throw Error(ErrorCode::kInvalidSchedule,
                  "scenario '" + name + "': rollout must be created on or before its start day");
    }
  }
  for (const auto& a : operator_actions) {
    if (a.rollout < 0 || a.rollout >= static_cast<int>(rollouts.size())) {
      throw Error(ErrorCode::kInvalidArgument,
                  "operator action refers to rollout " + std::to_string(a.rollout));
    }
  }
  baseline_guardrail.validate();
  if (!(learning_rate > 0.0) || model_buckets == 0) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate and model_buckets must be positive");
  }
}

int phase_band_of(double coverage) {
  for (std::size_t i = 0; i < kPhaseBands.size(); ++i) {
    const PhaseBand& band = kPhaseBands[i];
    const bool last = i + 1 == kPhaseBands.size();
    if (coverage <= band.upper && (coverage > band.lower || (last && coverage >= 0.0))) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

RunSummary summarize(const std::vector<MetricPoint>& series, int rollout_start_day,
                     int window_days, const std::string& tracked_feature,
                     int baseline_window_days) {
  RunSummary s;
  s.rollout_start_day = rollout_start_day;
  s.window_first_day = rollout_start_day + 1;
  s.window_last_day = rollout_start_day + window_days;
  s.tracked_feature = tracked_feature;

  std::map<int, const MetricPoint*> by_day;
  for (const auto& p : series) {
    by_day[p.day] = &p;
    if (p.guardrail_verdict != GuardrailVerdict::kOk) ++s.guardrail_triggers;
  }

  std::vector<double> before;
  for (int d = rollout_start_day - baseline_window_days; d < rollout_start_day; ++d) {
    if (auto it = by_day.find(d); it != by_day.end()) before.push_back(it->second->ne);
  }
  s.baseline_ne = mean_of(before);

  std::vector<double> tail;
  for (auto it = series.rbegin(); it != series.rend() && tail.size() < kSteadyStateDays; ++it) {
    tail.push_back(it->ne);
  }
  s.steady_state_ne = mean_of(tail);

  std::vector<std::vector<double>> band_ne(kPhaseBands.size());
  bool have_peak = false;
  s.peak_daily_delta = -std::numeric_limits<double>::infinity();
  for (int d = s.window_first_day; d <= s.window_last_day; ++d) {
    auto it = by_day.find(d);
    if (it == by_day.end()) continue;
    const MetricPoint& p = *it->second;
    s.cumulative_delta += p.ne - s.baseline_ne;
    if (auto prev = by_day.find(d - 1); prev != by_day.end()) {
      const double delta = p.ne - prev->second->ne;
      if (delta > s.peak_daily_delta) {
        s.peak_daily_delta = delta;
        s.peak_daily_delta_day = d;
      }
    }
    if (!have_peak || p.ne > s.peak_ne) {
      s.peak_ne = p.ne;
      s.peak_ne_day = d;
      have_peak = true;
    }
    if (!tracked_feature.empty()) {
      if (int band = phase_band_of(coverage_of(p, tracked_feature)); band >= 0) {
        band_ne[static_cast<std::size_t>(band)].push_back(p.ne);
      }
    }
  }
  if (!std::isfinite(s.peak_daily_delta)) s.peak_daily_delta = 0.0;

  if (have_peak) {
    const double threshold =
        s.steady_state_ne + kRecoveryEpsilonFraction * (s.peak_ne - s.steady_state_ne);
    for (auto it = by_day.find(s.peak_ne_day); it != by_day.end(); ++it) {
      if (it->second->ne <= threshold) {
        s.recovery_days = it->first - s.peak_ne_day;
        break;
      }
    }
  }

  for (std::size_t b = 0; b < kPhaseBands.size(); ++b) {
    PhaseRow row;
    row.band = std::string(kPhaseBands[b].name);
    row.days = static_cast<int>(band_ne[b].size());
    for (double ne : band_ne[b]) row.delta_ne_sum += ne - s.baseline_ne;
    row.mean_ne = mean_of(band_ne[b]);
    s.phases.push_back(row);
  }
  return s;
}

bool verify_summary(const RunReport& report, int window_days) {
  return summarize(report.series, report.summary.rollout_start_day, window_days,
                   report.summary.tracked_feature) == report.summary;
}

// ---------------------------------------------------------------------------
// Simulation

Simulation::Simulation(WorldConfig world, ScenarioConfig scenario)
    : world_(std::move(world)),
      scenario_(std::move(scenario)),
      control_plane_(world_.registry()),
      featurizer_(world_.registry(), scenario_.model_buckets),
      model_(ModelState::zeros(scenario_.model_buckets, scenario_.learning_rate)) {
  scenario_.validate();
  std::set<std::string> tracked;
  for (const auto& r : scenario_.rollouts) {
    for (const auto& name : r.policy.features) {
      world_.registry().index_of(name);
      tracked.insert(name);
    }
  }
  tracked_.assign(tracked.begin(), tracked.end());
  exposure_.resize(tracked_.size());
}

bool Simulation::done() const {
  return aborted_ || day() >= world_.config().simulation_days;
}

const std::vector<int>& Simulation::exposure(const std::string& feature) const {
  auto it = std::find(tracked_.begin(), tracked_.end(), feature);
  if (it == tracked_.end()) {
    throw Error(ErrorCode::kNotFound, "feature '" + feature + "' is not under a scenario rollout");
  }
  return exposure_[static_cast<std::size_t>(it - tracked_.begin())];
}

void Simulation::apply_scheduled_commands(int day) {
  for (std::size_t i = 0; i < scenario_.rollouts.size(); ++i) {
    const auto& r = scenario_.rollouts[i];
    if (r.create_day.value_or(scenario_.warmup_days) == day) {
      scenario_ids_.resize(scenario_.rollouts.size());
      scenario_ids_[i] = control_plane_.create_rollout(r.policy).id;
    }
  }
  for (const auto& a : scenario_.operator_actions) {
    if (a.day != day) continue;
    const auto index = static_cast<std::size_t>(a.rollout);
    if (index >= scenario_ids_.size() || scenario_ids_[index].empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "operator action on day " + std::to_string(day) +
                      " precedes creation of rollout " + std::to_string(a.rollout));
    }
    const std::string& id = scenario_ids_[index];
    switch (a.action) {
      case OperatorActionKind::kPause: control_plane_.pause(id); break;
      case OperatorActionKind::kResume: control_plane_.resume(id); break;
      case OperatorActionKind::kRollback: control_plane_.rollback(id); break;
      case OperatorActionKind::kSetRate: control_plane_.set_rate(id, a.rate_per_day); break;
    }
  }
}

GuardrailVerdict Simulation::run_guardrails(int day) {
  if (!scenario_.guardrails_enabled) return GuardrailVerdict::kOk;
  if (control_plane_.rollouts().empty()) {
    const int start = scenario_.rollout_start_day();
    if (day < start || start < scenario_.baseline_guardrail.baseline_window_days) {
      return GuardrailVerdict::kOk;
    }
    return evaluate(scenario_.baseline_guardrail, metrics_, start);
  }
  GuardrailVerdict worst = GuardrailVerdict::kOk;
  // Every live rollout is watched, whether scheduled by the scenario or created
  // later through the API.
  for (const auto& id : control_plane_.non_terminal_ids()) {
    const Rollout& r = control_plane_.rollout(id);
    if (r.state != RolloutState::kActive && r.state != RolloutState::kPaused) continue;
    GuardrailVerdict verdict = GuardrailVerdict::kOk;
    try {
      verdict = evaluate(r.policy.guardrail(), metrics_, r.policy.schedule.start_day);
    } catch (const Error& e) {
      // Rollouts that start before a full baseline window exists run unguarded.
      if (e.code() != ErrorCode::kInsufficientHistory) throw;
    }
    if (verdict == GuardrailVerdict::kPause && r.state == RolloutState::kActive) {
      control_plane_.pause(id, TransitionReason::kGuardrail);
    } else if (verdict == GuardrailVerdict::kRollback) {
      control_plane_.rollback(id, TransitionReason::kGuardrail);
      aborted_ = true;
    }
    worst = std::max(worst, verdict);
  }
  return worst;
}

const MetricPoint& Simulation::step() {
  if (done()) {
    throw Error(ErrorCode::kSimulationFinished,
                aborted_ ? "simulation aborted by a guardrail rollback"
                         : "simulation reached its horizon");
  }
  const int d = day();
  apply_scheduled_commands(d);
  const SnapshotPtr snapshot = control_plane_.snapshot();

  std::vector<std::optional<FeatureIndex>> tracked_index;
  for (const auto& name : tracked_) tracked_index.push_back(world_.registry().find(name));
  std::vector<int> exposure(tracked_.size(), 0);

  std::vector<LoggedExample> log;
  log.reserve(static_cast<std::size_t>(world_.config().requests_per_day));
  double prediction_sum = 0.0;
  double label_sum = 0.0;
  world_.visit_day(d, TrafficStream::kServing, [&](Example&& request) {
    const bool audit = log.size() % kAuditStride == 0;
    std::optional<Example> raw;
    if (audit) raw = request;
    ++consistency_.generated;
    LoggedExample served = apply_fading(std::move(request), snapshot);
    prediction_sum += predict(model_, featurizer_, served);
    label_sum += served.label;
    ++consistency_.served;
    for (std::size_t t = 0; t < tracked_.size(); ++t) {
      if (tracked_index[t] && served.find(*tracked_index[t]) != nullptr) ++exposure[t];
    }
    log.push_back(std::move(served));
    if (audit) {
      ++consistency_.audited;
      // The log entry must be bit-identical to what the adapter serves for
      // this request under this snapshot.
      if (!(apply_fading(*raw, snapshot) == log.back()) ||
          log.back().snapshot.get() != snapshot.get()) {
        ++consistency_.mismatches;
      }
    }
  });
  consistency_.logged += log.size();
  for (std::size_t t = 0; t < tracked_.size(); ++t) exposure_[t].push_back(exposure[t]);

  train_day(model_, featurizer_, log);
  log.clear();

  std::vector<int> labels;
  std::vector<double> predictions;
  labels.reserve(static_cast<std::size_t>(world_.config().holdout_per_day));
  predictions.reserve(labels.capacity());
  world_.visit_day(d, TrafficStream::kHoldout, [&](Example&& e) {
    const LoggedExample faded = apply_fading(std::move(e), snapshot);
    labels.push_back(faded.label);
    predictions.push_back(predict(model_, featurizer_, faded));
  });
  double ne = normalized_entropy(labels, predictions);
  for (const auto& fault : scenario_.faults) {
    if (d >= fault.day) ne += fault.ne_offset;
  }

  MetricPoint point;
  point.day = d;
  point.ne = ne;
  const double n = static_cast<double>(world_.config().requests_per_day);
  point.mean_prediction = prediction_sum / n;
  point.mean_label = label_sum / n;
  point.coverage_snapshot = snapshot->fractions();
  metrics_.push_back(point);

  metrics_.back().guardrail_verdict = run_guardrails(d);
  control_plane_.advance_day();
  return metrics_.back();
}

void Simulation::run_to_end() {
  while (!done()) step();
}

RunReport Simulation::report() const {
  RunReport report;
  report.scenario = scenario_.name;
  report.seed = world_.config().seed;
  report.series = metrics_;
  report.coverage_features = tracked_;
  report.aborted = aborted_;
  const std::string tracked =
      scenario_.rollouts.empty() ? std::string() : scenario_.rollouts.front().policy.features.front();
  report.summary = summarize(metrics_, scenario_.rollout_start_day(), scenario_.window_days,
                             tracked);
  return report;
}

RunReport run_scenario(const WorldConfig& world, const ScenarioConfig& scenario) {
  Simulation sim(world, scenario);
  sim.run_to_end();
  return sim.report();
}

// ---------------------------------------------------------------------------
// Comparison

RunComparison compare_runs(const RunReport& a, const RunReport& b) {
  const RunSummary& sa = a.summary;
  const RunSummary& sb = b.summary;
  if (sa.rollout_start_day != sb.rollout_start_day || sa.window_first_day != sb.window_first_day ||
      sa.window_last_day != sb.window_last_day || a.series.size() != b.series.size()) {
    throw Error(ErrorCode::kMismatchedHorizon,
                "runs '" + a.scenario + "' and '" + b.scenario + "' cover different horizons");
  }
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    if (a.series[i].day != b.series[i].day) {
      throw Error(ErrorCode::kMismatchedHorizon, "runs disagree on the day axis");
    }
  }

  RunComparison out;
  out.a = a.scenario;
  out.b = b.scenario;
  std::vector<std::vector<std::pair<double, double>>> bands(kPhaseBands.size());
  const std::string& reference = sb.tracked_feature;
  for (std::size_t i = 0; i < b.series.size(); ++i) {
    const int d = b.series[i].day;
    if (d < sb.window_first_day || d > sb.window_last_day || reference.empty()) continue;
    if (int band = phase_band_of(coverage_of(b.series[i], reference)); band >= 0) {
      bands[static_cast<std::size_t>(band)].emplace_back(a.series[i].ne, b.series[i].ne);
    }
  }
  for (std::size_t k = 0; k < kPhaseBands.size(); ++k) {
    PhaseComparison row;
    row.band = std::string(kPhaseBands[k].name);
    row.days = static_cast<int>(bands[k].size());
    double sum_a = 0.0;
    double sum_b = 0.0;
    for (const auto& [ne_a, ne_b] : bands[k]) {
      row.paired_delta_sum += ne_a - ne_b;
      sum_a += ne_a;
      sum_b += ne_b;
    }
    // Lower NE is better, so a's relative performance is NE_b / NE_a.
    row.normalized_pct = row.days == 0 || sum_a == sum_b ? 100.0 : 100.0 * sum_b / sum_a;
    row.deficit_pct = row.normalized_pct - 100.0;
    out.phases.push_back(row);
  }
  out.peak_ratio = ratio(sa.peak_daily_delta, sb.peak_daily_delta);
  out.cumulative_ratio = ratio(sa.cumulative_delta, sb.cumulative_delta);
  out.recovery_ratio = ratio(sa.recovery_days, sb.recovery_days);
  out.peak_delta = sa.peak_daily_delta - sb.peak_daily_delta;
  out.cumulative_delta = sa.cumulative_delta - sb.cumulative_delta;
  return out;
}

RunComparison average_comparisons(const std::vector<RunComparison>& comparisons) {
  if (comparisons.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "nothing to average");
  }
  RunComparison out = comparisons.front();
  const double n = static_cast<double>(comparisons.size());
  auto mean = [&](auto field) {
    double sum = 0.0;
    for (const auto& c : comparisons) sum += field(c);
    return sum / n;
  };
  out.peak_ratio = mean([](const RunComparison& c) { return c.peak_ratio; });
  out.cumulative_ratio = mean([](const RunComparison& c) { return c.cumulative_ratio; });
  out.recovery_ratio = mean([](const RunComparison& c) { return c.recovery_ratio; });
  out.peak_delta = mean([](const RunComparison& c) { return c.peak_delta; });
  out.cumulative_delta = mean([](const RunComparison& c) { return c.cumulative_delta; });
  for (std::size_t k = 0; k < out.phases.size(); ++k) {
    for (const auto& c : comparisons) {
      if (c.phases.size() != out.phases.size() || c.a != out.a || c.b != out.b) {
        throw Error(ErrorCode::kMismatchedHorizon, "comparisons cover different scenarios");
      }
    }
    auto& row = out.phases[k];
    row.days = static_cast<int>(
        std::lround(mean([&](const RunComparison& c) { return double(c.phases[k].days); })));
    row.paired_delta_sum = mean([&](const RunComparison& c) { return c.phases[k].paired_delta_sum; });
    row.normalized_pct = mean([&](const RunComparison& c) { return c.phases[k].normalized_pct; });
    row.deficit_pct = row.normalized_pct - 100.0;
  }
  return out;
}

}  // namespace ieff
