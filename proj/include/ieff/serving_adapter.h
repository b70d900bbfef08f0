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

#ifndef IEFF_SERVING_ADAPTER_H_
#define IEFF_SERVING_ADAPTER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ieff/hashing.h"
#include "ieff/types.h"

namespace ieff {

struct CoverageEntry {
  std::string feature;
  std::uint64_t name_hash = 0;
  FadingMode mode = FadingMode::kCoverage;
  double fraction = 1.0;

  bool operator==(const CoverageEntry&) const = default;
};

// Immutable per-version view of every feature under a rollout. Adapters read
// one snapshot for the whole request.
class CoverageSnapshot {
 public:
  CoverageSnapshot() = default;
  CoverageSnapshot(std::uint64_t version, int day,
                   std::vector<std::optional<CoverageEntry>> slots);

  // Builds from name -> (mode, fraction), resolving names in the registry.
  static CoverageSnapshot from_entries(
      std::uint64_t version, int day, const FeatureRegistry& registry,
      const std::map<std::string, std::pair<FadingMode, double>>& entries);

  std::uint64_t version() const { return version_; }
  int day() const { return day_; }
  bool empty() const { return count_ == 0; }

  const CoverageEntry* find(FeatureIndex feature) const {
    return feature.value < slots_.size() && slots_[feature.value]
               ? &*slots_[feature.value]
               : nullptr;
  }
  std::map<std::string, double> fractions() const;
  const std::vector<std::optional<CoverageEntry>>& slots() const { return slots_; }

  bool operator==(const CoverageSnapshot&) const = default;

 private:
  std::uint64_t version_ = 0;
  int day_ = 0;
  std::vector<std::optional<CoverageEntry>> slots_;
  std::size_t count_ = 0;
};

// Keeps the feature iff its unit hash is strictly below coverage. The kept
// set is nested in coverage for a fixed (feature, request).
inline bool gate_decision(std::uint64_t name_hash, std::uint64_t request_id,
                          double coverage) {
  return to_unit_interval(gate_hash(name_hash, request_id)) < coverage;
}
bool gate_decision(std::string_view feature, std::uint64_t request_id,
                   double coverage);

// Drops coverage-mode features failing the gate and scales distribution-mode
// values. Features outside the snapshot pass through unchanged.
LoggedExample apply_fading(const Example& example,
                           std::shared_ptr<const CoverageSnapshot> snapshot);
LoggedExample apply_fading(Example&& example,
                           std::shared_ptr<const CoverageSnapshot> snapshot);

}  // namespace ieff

#endif  // IEFF_SERVING_ADAPTER_H_
