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

#include "ieff/hashing.h"

#include <gtest/gtest.h>

#include <cstdint>
#include <limits>
#include <string>

namespace ieff {
namespace {

struct GoldenVector {
  const char* name;
  std::uint64_t request_id;
  std::uint64_t name_hash;
  std::uint64_t gate;
  double unit;
};

// Produced by tests/oracles/gate_hash_oracle.py, an independent Python
// implementation (arbitrary-precision integers masked to 64 bits).
constexpr GoldenVector kGolden[] = {
    {"ad_id", 0x0ULL, 0x847b9ffe34db52a0ULL, 0x9e0e45f3b9468017ULL, 0.6174052925137179},
    {"user_country", 0x2aULL, 0x2402232c750b6fb7ULL, 0x764626e188ab502fULL, 0.4620079327220712},
    {"item_embedding", 0xdeadbeefcafef00dULL, 0x7d3c1523c116f2a0ULL, 0xa351eeda06570322ULL,
     0.6379689485823654},
};

TEST(Hashing, GoldenVectorsMatchOracleBitExactly) {
  for (const auto& g : kGolden) {
    SCOPED_TRACE(g.name);
    EXPECT_EQ(fnv1a64(g.name), g.name_hash);
    EXPECT_EQ(gate_hash(g.name, g.request_id), g.gate);
    EXPECT_EQ(gate_hash(fnv1a64(g.name), g.request_id), g.gate);
    EXPECT_EQ(to_unit_interval(g.gate), g.unit);
  }
}

TEST(Hashing, FnvReferenceValues) {
  EXPECT_EQ(fnv1a64(""), kFnvOffsetBasis);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  // Chaining is concatenation.
  EXPECT_EQ(fnv1a64("bar", fnv1a64("foo")), fnv1a64("foobar"));
}

TEST(Hashing, UsableInConstantExpressions) {
  static_assert(fnv1a64("") == kFnvOffsetBasis);
  static_assert(splitmix64_finalize(0) == 0xe220a8397b1dcdafULL);
  SUCCEED();
}

TEST(Hashing, UnitIntervalIsHalfOpen) {
  EXPECT_EQ(to_unit_interval(0), 0.0);
  const double top = to_unit_interval(std::numeric_limits<std::uint64_t>::max());
  EXPECT_LT(top, 1.0);
  EXPECT_EQ(top, 1.0 - 0x1.0p-53);
  // Low 11 bits never matter.
  EXPECT_EQ(to_unit_interval(0x7ffULL), 0.0);
  EXPECT_EQ(to_unit_interval(0x800ULL), 0x1.0p-53);
}

TEST(Hashing, FinalizerIsInjectiveOnASample) {
  // A bijection cannot collide; spot-check on consecutive inputs.
  std::uint64_t prev = splitmix64_finalize(0);
  for (std::uint64_t i = 1; i < 10000; ++i) {
    const std::uint64_t x = splitmix64_finalize(i);
    EXPECT_NE(x, prev);
    prev = x;
  }
}

}  // namespace
}  // namespace ieff
