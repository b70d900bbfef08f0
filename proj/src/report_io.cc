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

#include "ieff/report_io.h"

#include <cstdio>
#include <fstream>

#include "ieff/error.h"
#include "ieff/serialization.h"

namespace ieff {
namespace {

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

}  // namespace

std::string report_csv(const RunReport& report) {
  std::string out = "day,ne,mean_prediction,mean_label";
  for (const auto& f : report.coverage_features) out += ",coverage_" + f;
  out += ",verdict\n";
  for (const auto& p : report.series) {
    out += std::to_string(p.day);
    out += "," + fmt("%.10f", p.ne);
    out += "," + fmt("%.10f", p.mean_prediction);
    out += "," + fmt("%.10f", p.mean_label);
    for (const auto& f : report.coverage_features) {
      auto it = p.coverage_snapshot.find(f);
      out += "," + fmt("%.6f", it == p.coverage_snapshot.end() ? 1.0 : it->second);
    }
    out += ",";
    out += to_string(p.guardrail_verdict);
    out += "\n";
  }
  return out;
}

std::string summary_text(const RunReport& report) {
  Json j{{"scenario", report.scenario},
         {"seed", report.seed},
         {"aborted", report.aborted},
         {"summary", report.summary}};
  return j.dump(2) + "\n";
}

std::string comparison_text(const RunComparison& c) {
  std::string out = "phase      coverage  days  " + c.a + " (%)  " + c.b + " (%)  delta (%)  paired dNE sum\n";
  for (const auto& row : c.phases) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-10s %-9s %4d  %8.3f  %8.3f  %+9.3f  %+.6f\n",
                  row.band == "90-70"   ? "early"
                  : row.band == "70-40" ? "mid"
                  : row.band == "40-10" ? "late"
                                        : "final",
                  row.band.c_str(), row.days, row.normalized_pct, 100.0, row.deficit_pct,
                  row.paired_delta_sum);
    out += line;
  }
  char tail[256];
  std::snprintf(tail, sizeof(tail),
                "peak daily dNE ratio %.4f\ncumulative dNE ratio %.4f\nrecovery ratio %.4f\n",
                c.peak_ratio, c.cumulative_ratio, c.recovery_ratio);
  out += tail;
  return out;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
  out << contents;
  if (!out) throw Error(ErrorCode::kIoError, "write to '" + path + "' failed");
}

namespace {
constexpr int kRunCheckpointVersion = 1;
}  // namespace

std::string checkpoint_text(const RunCheckpoint& c) {
  Json j{{"format", "ieff-run"},
         {"version", kRunCheckpointVersion},
         {"world", c.world},
         {"scenario", c.scenario},
         {"report", c.report},
         {"model", Json::parse(save_checkpoint(c.model))}};
  return j.dump() + "\n";
}

RunCheckpoint parse_checkpoint(const std::string& text, const std::string& source) {
  const Json j = parse_json(text, source);
  if (j.value("format", "") != "ieff-run" || j.value("version", 0) != kRunCheckpointVersion) {
    throw Error(ErrorCode::kParseError, source + ": not an ieff-run v1 checkpoint");
  }
  RunCheckpoint c;
  c.world = json_to<WorldConfig>(j.at("world"), source);
  c.scenario = json_to<ScenarioConfig>(j.at("scenario"), source);
  c.report = json_to<RunReport>(j.at("report"), source);
  c.model = load_checkpoint(j.at("model").dump());
  return c;
}

}  // namespace ieff
