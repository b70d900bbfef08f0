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

#ifndef IEFF_WORLD_H_
#define IEFF_WORLD_H_

// Synthetic CTR traffic. Everything generated is a pure function of the
// world seed and the day.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ieff/hashing.h"
#include "ieff/types.h"

namespace ieff {

// SplitMix64 stream: draw i is splitmix64_finalize(key + i * golden).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : state_(key) {}

  std::uint64_t next() {
    const std::uint64_t out = splitmix64_finalize(state_);
    state_ += 0x9E3779B97F4A7C15ULL;
    return out;
  }
  // [0, 1)
  double uniform() { return to_unit_interval(next()); }
  std::uint64_t below(std::uint64_t n);
  // Marsaglia polar method; the second variate of each pair is kept for the
  // next call.
  double normal();

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct WorldConfig {
  std::uint64_t seed = 1;
  int sparse_features = 30;
  int sparse_cardinality = 100;
  int dense_features = 4;
  int embedding_features = 2;
  int embedding_dim = static_cast<int>(kDefaultEmbeddingDim);
  // Ground-truth feature weights are N(0, weight_scale^2); the first
  // `informative_features` sparse features get boost * |N(0, weight_scale^2)|.
  double weight_scale = 0.5;
  int informative_features = 5;
  double informative_boost = 3.0;
  // The next `proxy_features` sparse features after the informative ones are
  // noisy copies: proxy j repeats informative feature j mod informative_features
  // with probability proxy_fidelity and is uniform otherwise. They let a model
  // recover part of a removed feature's signal through retraining.
  int proxy_features = 5;
  double proxy_fidelity = 0.7;
  // Explicit per-feature ground-truth weights override the drawn ones.
  std::map<std::string, double> weights;
  double bias = -1.0;
  int requests_per_day = 20000;
  int holdout_per_day = 20000;
  int simulation_days = 75;

  void validate() const;
  bool operator==(const WorldConfig&) const = default;
};

std::string sparse_feature_name(int i);
std::string dense_feature_name(int i);
std::string embedding_feature_name(int i);

// Registry in canonical order: sparse, dense, embedding.
FeatureRegistry make_registry(const WorldConfig& config);

enum class TrafficStream : std::uint64_t { kServing = 0, kHoldout = 1 };

class World {
 public:
  explicit World(WorldConfig config);

  const WorldConfig& config() const { return config_; }
  const FeatureRegistry& registry() const { return registry_; }

  double feature_weight(FeatureIndex feature) const { return weights_[feature.value]; }
  // Ground-truth logit of a raw (unfaded) example.
  double true_score(const Example& example) const;
  // Sparse features sorted by decreasing |weight|.
  std::vector<std::string> most_informative_sparse(int count) const;

  std::vector<Example> generate_day(int day,
                                    TrafficStream stream = TrafficStream::kServing) const;
  // Same examples in the same order, handed out one at a time.
  void visit_day(int day, TrafficStream stream,
                 const std::function<void(Example&&)>& visit) const;

 private:
  WorldConfig config_;
  FeatureRegistry registry_;
  std::vector<double> weights_;
  // Per-value effect multipliers for sparse features, embedding directions for
  // embeddings; indexed by feature.
  std::vector<std::vector<double>> profiles_;
  // Source feature index for proxies, -1 otherwise.
  std::vector<int> proxy_source_;
  std::vector<FeatureKind> kinds_;
};

// Convenience for callers holding only a config.
std::vector<Example> generate_day(const WorldConfig& config, int day);

}  // namespace ieff

#endif  // IEFF_WORLD_H_
