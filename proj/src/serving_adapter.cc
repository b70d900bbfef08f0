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

#include "ieff/serving_adapter.h"

#include <utility>
#include <vector>

#include "ieff/error.h"

namespace ieff {

CoverageSnapshot::CoverageSnapshot(std::uint64_t version, int day,
                                   std::vector<std::optional<CoverageEntry>> slots)
    : version_(version), day_(day), slots_(std::move(slots)) {
  for (const auto& slot : slots_) {
    if (!slot) continue;
    if (!(slot->fraction >= 0.0 && slot->fraction <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "coverage for '" + slot->feature + "' outside [0, 1]");
    }
    ++count_;
  }
}

CoverageSnapshot CoverageSnapshot::from_entries(
    std::uint64_t version, int day, const FeatureRegistry& registry,
    const std::map<std::string, std::pair<FadingMode, double>>& entries) {
  std::vector<std::optional<CoverageEntry>> slots(registry.size());
  for (const auto& [name, entry] : entries) {
    const FeatureIndex index = registry.index_of(name);
    slots[index.value] =
        CoverageEntry{name, registry.name_hash(index), entry.first, entry.second};
  }
  return CoverageSnapshot(version, day, std::move(slots));
}

std::map<std::string, double> CoverageSnapshot::fractions() const {
  std::map<std::string, double> out;
  for (const auto& slot : slots_) {
    if (slot) out.emplace(slot->feature, slot->fraction);
  }
  return out;
}

bool gate_decision(std::string_view feature, std::uint64_t request_id, double coverage) {
  return gate_decision(fnv1a64(feature), request_id, coverage);
}

namespace {

void scale_value(FeatureValue& value, double alpha) {
  if (auto* dense = std::get_if<double>(&value)) {
    *dense *= alpha;
  } else if (auto* embedding = std::get_if<std::vector<double>>(&value)) {
    for (double& x : *embedding) x *= alpha;
  }
  // Sparse ids are never distribution-faded; policy validation rejects it.
}

}  // namespace

LoggedExample apply_fading(Example&& example,
                           std::shared_ptr<const CoverageSnapshot> snapshot) {
  LoggedExample out;
  out.request_id = example.request_id;
  out.label = example.label;
  out.day = example.day;
  out.features = std::move(example.features);
  if (snapshot && !snapshot->empty()) {
    std::erase_if(out.features, [&](FeatureEntry& entry) {
      const CoverageEntry* fade = snapshot->find(entry.feature);
      if (fade == nullptr) return false;
      if (fade->mode == FadingMode::kCoverage) {
        return !gate_decision(fade->name_hash, out.request_id, fade->fraction);
      }
      scale_value(entry.value, fade->fraction);
      return false;
    });
  }
  out.snapshot = std::move(snapshot);
  return out;
}

LoggedExample apply_fading(const Example& example,
                           std::shared_ptr<const CoverageSnapshot> snapshot) {
  return apply_fading(Example(example), std::move(snapshot));
}

}  // namespace ieff
