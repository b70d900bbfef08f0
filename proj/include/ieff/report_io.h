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

#ifndef IEFF_REPORT_IO_H_
#define IEFF_REPORT_IO_H_

#include <string>

#include "ieff/harness.h"
#include "ieff/trainer.h"
#include "ieff/world.h"

namespace ieff {

// Header: day,ne,mean_prediction,mean_label,coverage_<feature>...,verdict
std::string report_csv(const RunReport& report);
// Pretty-printed JSON summary (scenario, seed, aborted flag and RunSummary).
std::string summary_text(const RunReport& report);
// Plain-text phase report for a comparison, a against b = 100%.
std::string comparison_text(const RunComparison& comparison);

void write_file(const std::string& path, const std::string& contents);

// Everything needed to re-emit or re-derive a run: both configs, the report
// and the final model.
struct RunCheckpoint {
  WorldConfig world;
  ScenarioConfig scenario;
  RunReport report;
  ModelState model;
};

std::string checkpoint_text(const RunCheckpoint& checkpoint);
RunCheckpoint parse_checkpoint(const std::string& text, const std::string& source);

}  // namespace ieff

#endif  // IEFF_REPORT_IO_H_
