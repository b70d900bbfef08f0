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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every tolerance used below is pinned in this file.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "ieff/hashing.h"
#include "ieff/harness.h"
#include "ieff/presets.h"
#include "ieff/report_io.h"
#include "ieff/serving_adapter.h"
#include "ieff/trainer.h"

namespace ieff {
namespace {

// AC1
constexpr int kPairedSeeds = 5;
constexpr double kMaxPeakRatio = 0.7;
constexpr double kMaxCumulativeRatio = 0.75;
constexpr double kRuntimeBudgetSeconds = 120.0;
// AC3
constexpr int kMinRecoveryDays = 2;
constexpr double kMaxFadingSpikeFraction = 0.5;
// AC5
constexpr int kKeepRateSamples = 1'000'000;
constexpr double kKeepRateTolerance = 0.002;
constexpr int kNestedTriples = 100'000;
// AC6
constexpr int kBaselineSeeds = 10;
constexpr double kNoiseBandSigmas = 3.0;
constexpr int kMaxReturnDays = 5;
constexpr std::uint64_t kDrillSeed = 1;
// AC8
constexpr double kGradientRelTolerance = 1e-6;
constexpr double kNeExample = 0.23696559416620616642;
constexpr double kNeTolerance = 1e-9;

int failures = 0;

void verdict(const char* id, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

struct Run {
  RunReport report;
  ConsistencyStats consistency;
  std::string csv;
};

Run simulate(std::uint64_t seed, const ScenarioConfig& scenario) {
  Simulation sim(presets::default_world(seed), scenario);
  sim.run_to_end();
  Run r{sim.report(), sim.consistency(), {}};
  r.csv = report_csv(r.report);
  return r;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Largest day-over-day NE increase inside the rollout window.
double max_daily_delta(const RunReport& r) {
  double best = -1e300;
  for (std::size_t i = 1; i < r.series.size(); ++i) {
    const int d = r.series[i].day;
    if (d < r.summary.window_first_day || d > r.summary.window_last_day) continue;
    best = std::max(best, r.series[i].ne - r.series[i - 1].ne);
  }
  return best;
}

}  // namespace
}  // namespace ieff

int main() {
  using namespace ieff;
  std::vector<Run> zero;
  std::vector<Run> fading;
  const ScenarioConfig zero_cfg = presets::zero_out();
  const ScenarioConfig fading_cfg = presets::deprecation_fading();

  // AC1 -------------------------------------------------------------------
  {
    const auto t0 = std::chrono::steady_clock::now();
    for (int s = 1; s <= kPairedSeeds; ++s) {
      zero.push_back(simulate(static_cast<std::uint64_t>(s), zero_cfg));
      fading.push_back(simulate(static_cast<std::uint64_t>(s), fading_cfg));
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::vector<double> zp, fp, zc, fc;
    for (int i = 0; i < kPairedSeeds; ++i) {
      zp.push_back(zero[i].report.summary.peak_daily_delta);
      fp.push_back(fading[i].report.summary.peak_daily_delta);
      zc.push_back(zero[i].report.summary.cumulative_delta);
      fc.push_back(fading[i].report.summary.cumulative_delta);
    }
    const double peak_ratio = mean(fp) / mean(zp);
    const double cum_ratio = mean(fc) / mean(zc);
    verdict("AC1",
            peak_ratio <= kMaxPeakRatio && cum_ratio <= kMaxCumulativeRatio &&
                seconds < kRuntimeBudgetSeconds,
            fmt("mean peak daily dNE fading %.5f vs zero-out %.5f (ratio %.3f, limit %.2f); "
                "mean cumulative dNE %.4f vs %.4f (ratio %.3f, limit %.2f); %d paired seeds "
                "in %.1f s (budget %.0f s)",
                mean(fp), mean(zp), peak_ratio, kMaxPeakRatio, mean(fc), mean(zc), cum_ratio,
                kMaxCumulativeRatio, kPairedSeeds, seconds, kRuntimeBudgetSeconds));
  }

  // AC2 -------------------------------------------------------------------
  {
    std::vector<RunComparison> per_seed;
    for (int i = 0; i < kPairedSeeds; ++i) {
      per_seed.push_back(compare_runs(zero[i].report, fading[i].report));
    }
    const RunComparison c = average_comparisons(per_seed);
    std::size_t largest = 0;
    for (std::size_t k = 1; k < c.phases.size(); ++k) {
      if (c.phases[k].deficit_pct < c.phases[largest].deficit_pct) largest = k;
    }
    const auto& mid = c.phases[1];
    const auto& tail = c.phases[3];
    const bool pass = largest == 1 && std::abs(tail.deficit_pct) < std::abs(mid.deficit_pct);
    std::string rows;
    for (const auto& p : c.phases) {
      rows += fmt("%s %+.3f%% (%d d, paired sum %+.4f); ", p.band.c_str(), p.deficit_pct, p.days,
                  p.paired_delta_sum);
    }
    verdict("AC2", pass,
            "zero-out deficit vs fading=100% by band: " + rows +
                fmt("largest in %s, required 70-40 largest and 10-0 smaller",
                    c.phases[largest].band.c_str()));
  }

  // AC3 -------------------------------------------------------------------
  {
    bool pass = true;
    std::string detail;
    for (int i = 0; i < kPairedSeeds; ++i) {
      const int recovery = zero[i].report.summary.recovery_days;
      const double spike = zero[i].report.summary.peak_daily_delta;
      const double worst = max_daily_delta(fading[i].report);
      const bool ok = recovery >= kMinRecoveryDays && worst <= kMaxFadingSpikeFraction * spike;
      pass = pass && ok;
      detail += fmt("seed %d recovery %d d, fading max daily dNE %.5f = %.2f x spike %.5f; ",
                    i + 1, recovery, worst, worst / spike, spike);
    }
    verdict("AC3", pass,
            detail + fmt("required recovery >= %d d and ratio <= %.2f", kMinRecoveryDays,
                         kMaxFadingSpikeFraction));
  }

  // Baseline seeds feed AC6 (noise band) and AC7 (false triggers).
  std::vector<Run> baseline;
  for (int s = 1; s <= kBaselineSeeds; ++s) {
    baseline.push_back(simulate(static_cast<std::uint64_t>(s), presets::baseline()));
  }

  // AC4 -------------------------------------------------------------------
  {
    const Run z = simulate(1, zero_cfg);
    const Run f = simulate(1, fading_cfg);
    const Run b = simulate(2, presets::baseline());
    const bool pass = z.csv == zero[0].csv && f.csv == fading[0].csv && b.csv == baseline[1].csv;
    verdict("AC4", pass,
            fmt("re-executed zero-out seed 1, fading seed 1 and baseline seed 2: CSV reports "
                "%s (%zu, %zu, %zu bytes)",
                pass ? "byte-identical" : "DIFFER", z.csv.size(), f.csv.size(), b.csv.size()));
  }

  // AC5 -------------------------------------------------------------------
  {
    std::mt19937_64 rng(20260101);
    int kept = 0;
    for (int i = 0; i < kKeepRateSamples; ++i) kept += gate_decision("sparse_00", rng(), 0.5);
    const double rate = static_cast<double>(kept) / kKeepRateSamples;

    const FeatureRegistry reg = make_registry(presets::default_world());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int violations = 0;
    for (int i = 0; i < kNestedTriples; ++i) {
      const FeatureIndex f{static_cast<std::uint32_t>(rng() % reg.size())};
      const std::uint64_t id = rng();
      double c1 = unit(rng);
      double c2 = unit(rng);
      if (c1 > c2) std::swap(c1, c2);
      if (gate_decision(reg.name_hash(f), id, c1) && !gate_decision(reg.name_hash(f), id, c2)) {
        ++violations;
      }
    }

    struct Golden {
      const char* name;
      std::uint64_t request_id;
      std::uint64_t fnv;
      std::uint64_t hash;
      double unit;
    };
    // From tests/oracles/gate_hash_oracle.py.
    const Golden golden[] = {
        {"ad_id", 0x0ULL, 0x847b9ffe34db52a0ULL, 0x9e0e45f3b9468017ULL, 0.6174052925137179},
        {"user_country", 0x2aULL, 0x2402232c750b6fb7ULL, 0x764626e188ab502fULL, 0.4620079327220712},
        {"item_embedding", 0xdeadbeefcafef00dULL, 0x7d3c1523c116f2a0ULL, 0xa351eeda06570322ULL,
         0.6379689485823654},
    };
    int golden_ok = 0;
    for (const auto& g : golden) {
      golden_ok += fnv1a64(g.name) == g.fnv && gate_hash(g.name, g.request_id) == g.hash &&
                   to_unit_interval(gate_hash(g.name, g.request_id)) == g.unit;
    }
    verdict("AC5",
            std::abs(rate - 0.5) <= kKeepRateTolerance && violations == 0 && golden_ok == 3,
            fmt("keep rate at c=0.5 over %d ids %.6f (tolerance %.3f); %d nesting violations "
                "in %d triples; %d/3 golden hash vectors bit-exact",
                kKeepRateSamples, rate, kKeepRateTolerance, violations, kNestedTriples,
                golden_ok));
  }

  // AC6 -------------------------------------------------------------------
  {
    std::vector<double> deltas;
    for (const Run& b : baseline) {
      for (std::size_t i = 1; i < b.report.series.size(); ++i) {
        if (b.report.series[i].day >= b.report.summary.window_first_day) {
          deltas.push_back(b.report.series[i].ne - b.report.series[i - 1].ne);
        }
      }
    }
    const double m = mean(deltas);
    double var = 0.0;
    for (double d : deltas) var += (d - m) * (d - m);
    const double sigma = std::sqrt(var / static_cast<double>(deltas.size() - 1));
    const double band = kNoiseBandSigmas * sigma;

    std::uint64_t audited = 0;
    std::uint64_t mismatches = 0;
    bool conserved = true;
    const Run drill = simulate(kDrillSeed, presets::rollback_drill());
    for (const auto* runs : {&zero, &fading, &baseline}) {
      for (const Run& r : *runs) {
        audited += r.consistency.audited;
        mismatches += r.consistency.mismatches;
        conserved = conserved && r.consistency.generated == r.consistency.served &&
                    r.consistency.served == r.consistency.logged;
      }
    }
    audited += drill.consistency.audited;
    mismatches += drill.consistency.mismatches;

    const int rollback_day = presets::rollback_drill().operator_actions.at(0).day;
    const RunReport& paired = baseline.at(kDrillSeed - 1).report;
    const double c0 =
        presets::rollback_drill().rollouts.at(0).policy.schedule.initial_coverage;
    bool restored = true;
    for (const auto& feature : presets::top_sparse_features()) {
      restored = restored &&
                 drill.report.series.at(rollback_day + 1).coverage_snapshot.at(feature) == c0;
    }
    int back_within = -1;
    double gap_at_rollback = drill.report.series.at(rollback_day).ne - paired.series.at(rollback_day).ne;
    for (int k = 0; k <= kMaxReturnDays; ++k) {
      const int d = rollback_day + k;
      if (std::abs(drill.report.series.at(d).ne - paired.series.at(d).ne) <= band) {
        back_within = k;
        break;
      }
    }
    verdict("AC6",
            mismatches == 0 && conserved && audited > 0 && restored && back_within >= 0,
            fmt("%llu audited requests, %llu mismatches, conservation %s; coverage on day %d "
                "after the day-%d rollback %s c0=%.1f; NE gap to paired baseline %.4f on the "
                "rollback day, within the noise band %.4f (3 sigma, sigma %.5f over %d "
                "baseline seeds) after %d day(s) (limit %d)",
                static_cast<unsigned long long>(audited),
                static_cast<unsigned long long>(mismatches), conserved ? "holds" : "BROKEN",
                rollback_day + 1, rollback_day, restored ? "equals" : "DIFFERS FROM", c0,
                gap_at_rollback, band, sigma, kBaselineSeeds, back_within, kMaxReturnDays));
  }

  // AC7 -------------------------------------------------------------------
  {
    const ScenarioConfig cfg = presets::guardrail_fault();
    Simulation sim(presets::default_world(1), cfg);
    sim.run_to_end();
    const Rollout& r = sim.control_plane().rollout(sim.scenario_rollout_ids().at(0));
    const int breach_day = cfg.faults.at(0).day;
    const HistoryEntry& last = r.history.back();
    const bool fault_ok = r.state == RolloutState::kRolledBack &&
                          last.reason == TransitionReason::kGuardrail && last.day == breach_day &&
                          sim.metrics().back().day == breach_day && sim.aborted();
    int triggers = 0;
    for (const Run& b : baseline) triggers += b.report.summary.guardrail_triggers;
    verdict("AC7", fault_ok && triggers == 0,
            fmt("+%.2f NE fault on day %d: rollout %s with reason %s on day %d, run %s; "
                "%d guardrail triggers across %d baseline seeds",
                cfg.faults.at(0).ne_offset, breach_day, std::string(to_string(r.state)).c_str(),
                std::string(to_string(last.reason)).c_str(), last.day,
                sim.aborted() ? "aborted with its report so far" : "not aborted", triggers,
                kBaselineSeeds));
  }

  // AC8 -------------------------------------------------------------------
  {
    const World world(presets::default_world(3));
    const Featurizer featurizer(world.registry(), 1 << 12);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 0.2);
    double worst = 0.0;
    int checked = 0;
    const auto examples = world.generate_day(0);
    for (int t = 0; t < 40; ++t) {
      ModelState m = ModelState::zeros(1 << 12, 0.25);
      for (double& w : m.weights) w = n(rng);
      m.bias = n(rng);
      const Example& raw = examples[static_cast<std::size_t>(t) * 97];
      LoggedExample e;
      e.features = raw.features;
      e.label = raw.label;
      e.day = 0;
      ModelState stepped = m;
      std::vector<LoggedExample> one{e};
      train_day(stepped, featurizer, one);
      auto loss = [&](const ModelState& s) {
        const double p = predict(s, featurizer, e);
        return e.label == 1 ? -std::log(p) : -std::log1p(-p);
      };
      std::vector<std::size_t> buckets;
      featurizer.for_each_term(e.features, [&](std::size_t b, double) { buckets.push_back(b); });
      std::sort(buckets.begin(), buckets.end());
      buckets.erase(std::unique(buckets.begin(), buckets.end()), buckets.end());
      constexpr double h = 1e-5;
      for (std::size_t b : buckets) {
        ModelState plus = m;
        ModelState minus = m;
        plus.weights[b] += h;
        minus.weights[b] -= h;
        const double fd = (loss(plus) - loss(minus)) / (2 * h);
        const double analytic = (m.weights[b] - stepped.weights[b]) / m.learning_rate;
        worst = std::max(worst, std::abs(analytic - fd) / std::abs(fd));
        ++checked;
      }
    }
    const std::vector<int> ys{1, 0, 0, 1};
    const std::vector<double> ps{0.9, 0.1, 0.2, 0.8};
    const double ne = normalized_entropy(ys, ps);
    verdict("AC8",
            worst <= kGradientRelTolerance && std::abs(ne - kNeExample) <= kNeTolerance,
            fmt("worst relative gradient error %.2e over %d weights (limit %.0e); NE worked "
                "example %.12f vs oracle %.12f (limit %.0e)",
                worst, checked, kGradientRelTolerance, ne, kNeExample, kNeTolerance));
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
