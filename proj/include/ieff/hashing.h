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

#ifndef IEFF_HASHING_H_
#define IEFF_HASHING_H_

#include <cstdint>
#include <string_view>

namespace ieff {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = kFnvOffsetBasis) {
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= kFnvPrime;
  }
  return h;
}

// SplitMix64 output finalizer. A bijection on 64-bit words.
constexpr std::uint64_t splitmix64_finalize(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Gating hash over a precomputed feature-name hash.
constexpr std::uint64_t gate_hash(std::uint64_t name_hash,
                                  std::uint64_t request_id) {
  return splitmix64_finalize(name_hash ^ request_id);
}

constexpr std::uint64_t gate_hash(std::string_view feature_name,
                                  std::uint64_t request_id) {
  return gate_hash(fnv1a64(feature_name), request_id);
}

// Maps a 64-bit word to [0, 1) using its top 53 bits, so the result is
// exactly representable and never rounds up to 1.0.
constexpr double to_unit_interval(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace ieff

#endif  // IEFF_HASHING_H_
