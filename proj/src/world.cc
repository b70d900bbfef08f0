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

#include "ieff/world.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ieff/error.h"

namespace ieff {
namespace {

constexpr std::uint64_t kTruthDomain = 0x7472757468ULL;
constexpr std::uint64_t kTrafficDomain = 0x74726166666963ULL;
constexpr std::uint64_t kRequestDomain = 0x72657175657374ULL;

std::uint64_t derive_key(std::uint64_t seed, std::uint64_t domain, std::uint64_t a,
                         std::uint64_t b = 0) {
  std::uint64_t k = splitmix64_finalize(seed ^ domain);
  k = splitmix64_finalize(k ^ a);
  return splitmix64_finalize(k ^ (b * 0xD1B54A32D192ED03ULL));
}

std::string indexed_name(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%02d", prefix, i);
  return buf;
}

}  // namespace

std::uint64_t CounterRng::below(std::uint64_t n) {
  // Lemire's multiply-shift; the bias is below 2^-40 for the sizes used here.
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double x;
  double y;
  double r2;
  do {
    x = 2.0 * uniform() - 1.0;
    y = 2.0 * uniform() - 1.0;
    r2 = x * x + y * y;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_ = y * scale;
  has_spare_ = true;
  return x * scale;
}

void WorldConfig::validate() const {
  if (sparse_features < 0 || dense_features < 0 || embedding_features < 0 ||
      sparse_features + dense_features + embedding_features == 0) {
    throw Error(ErrorCode::kInvalidArgument, "world needs at least one feature");
  }
  if (sparse_cardinality <= 0 || embedding_dim <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "cardinality and embedding_dim must be positive");
  }
  if (informative_features < 0 || informative_features > sparse_features) {
    throw Error(ErrorCode::kInvalidArgument, "informative_features exceeds sparse_features");
  }
  if (proxy_features < 0 || informative_features + proxy_features > sparse_features ||
      (proxy_features > 0 && informative_features == 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "proxy_features needs informative sources and enough sparse features");
  }
  if (!(proxy_fidelity >= 0.0 && proxy_fidelity <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "proxy_fidelity must lie in [0, 1]");
  }
  if (requests_per_day <= 0 || holdout_per_day <= 0 || simulation_days <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "requests_per_day, holdout_per_day and simulation_days must be positive");
  }
  if (requests_per_day >= (1 << 30) || holdout_per_day >= (1 << 30)) {
    throw Error(ErrorCode::kInvalidArgument, "per-day traffic must stay below 2^30");
  }
}

std::string sparse_feature_name(int i) { return indexed_name("sparse", i); }
std::string dense_feature_name(int i) { return indexed_name("dense", i); }
std::string embedding_feature_name(int i) { return indexed_name("embed", i); }

FeatureRegistry make_registry(const WorldConfig& config) {
  FeatureRegistry registry(static_cast<std::size_t>(config.embedding_dim));
  for (int i = 0; i < config.sparse_features; ++i) {
    registry.add({sparse_feature_name(i), FeatureKind::kSparseId});
  }
  for (int i = 0; i < config.dense_features; ++i) {
    registry.add({dense_feature_name(i), FeatureKind::kDense});
  }
  for (int i = 0; i < config.embedding_features; ++i) {
    registry.add({embedding_feature_name(i), FeatureKind::kEmbedding});
  }
  return registry;
}

World::World(WorldConfig config) : config_(std::move(config)), registry_(1) {
  config_.validate();
  registry_ = make_registry(config_);
  for (const auto& [name, w] : config_.weights) registry_.index_of(name);

  weights_.resize(registry_.size());
  profiles_.resize(registry_.size());
  proxy_source_.assign(registry_.size(), -1);
  for (const auto& feature : registry_.features()) kinds_.push_back(feature.kind);
  for (int j = 0; j < config_.proxy_features; ++j) {
    proxy_source_[static_cast<std::size_t>(config_.informative_features + j)] =
        j % config_.informative_features;
  }
  for (std::uint32_t f = 0; f < registry_.size(); ++f) {
    const FeatureId& feature = registry_.at(FeatureIndex{f});
    CounterRng rng(derive_key(config_.seed, kTruthDomain, f));
    double w = config_.weight_scale * rng.normal();
    if (feature.kind == FeatureKind::kSparseId &&
        static_cast<int>(f) < config_.informative_features) {
      w = config_.informative_boost * std::abs(w);
    }
    if (auto it = config_.weights.find(feature.name); it != config_.weights.end()) {
      w = it->second;
    }
    weights_[f] = w;

    auto& profile = profiles_[f];
    if (feature.kind == FeatureKind::kSparseId) {
      profile.resize(static_cast<std::size_t>(config_.sparse_cardinality));
      for (double& z : profile) z = rng.normal();
    } else if (feature.kind == FeatureKind::kEmbedding) {
      profile.resize(static_cast<std::size_t>(config_.embedding_dim));
      const double norm = 1.0 / std::sqrt(static_cast<double>(config_.embedding_dim));
      for (double& g : profile) g = rng.normal() * norm;
    }
  }
}

double World::true_score(const Example& example) const {
  double z = config_.bias;
  for (const auto& entry : example.features) {
    const double w = weights_[entry.feature.value];
    const auto& profile = profiles_[entry.feature.value];
    if (const auto* id = std::get_if<std::int64_t>(&entry.value)) {
      z += w * profile[static_cast<std::size_t>(*id)];
    } else if (const auto* dense = std::get_if<double>(&entry.value)) {
      z += w * *dense;
    } else {
      const auto& vec = std::get<std::vector<double>>(entry.value);
      double dot = 0.0;
      for (std::size_t i = 0; i < vec.size(); ++i) dot += profile[i] * vec[i];
      z += w * dot;
    }
  }
  return z;
}

std::vector<std::string> World::most_informative_sparse(int count) const {
  std::vector<std::uint32_t> sparse;
  for (std::uint32_t f = 0; f < registry_.size(); ++f) {
    if (registry_.at(FeatureIndex{f}).kind == FeatureKind::kSparseId) sparse.push_back(f);
  }
  std::stable_sort(sparse.begin(), sparse.end(), [&](std::uint32_t a, std::uint32_t b) {
    return std::abs(weights_[a]) > std::abs(weights_[b]);
  });
  std::vector<std::string> out;
  for (int i = 0; i < count && i < static_cast<int>(sparse.size()); ++i) {
    out.push_back(registry_.at(FeatureIndex{sparse[static_cast<std::size_t>(i)]}).name);
  }
  return out;
}

void World::visit_day(int day, TrafficStream stream,
                      const std::function<void(Example&&)>& visit) const {
  if (day < 0 || day >= config_.simulation_days) {
    throw Error(ErrorCode::kInvalidArgument,
                "day " + std::to_string(day) + " outside the simulation horizon");
  }
  const auto stream_id = static_cast<std::uint64_t>(stream);
  const int count = stream == TrafficStream::kServing ? config_.requests_per_day
                                                      : config_.holdout_per_day;
  CounterRng rng(derive_key(config_.seed, kTrafficDomain, static_cast<std::uint64_t>(day),
                            stream_id));
  const std::uint64_t id_key = derive_key(config_.seed, kRequestDomain, 0);
  const auto cardinality = static_cast<std::uint64_t>(config_.sparse_cardinality);
  const auto dim = static_cast<std::size_t>(config_.embedding_dim);

  for (int i = 0; i < count; ++i) {
    Example e;
    e.day = day;
    // Bijective in (day, stream, i), so ids never repeat within a day.
    e.request_id = splitmix64_finalize(
        id_key ^ ((static_cast<std::uint64_t>(day) << 32) | (stream_id << 31) |
                  static_cast<std::uint64_t>(i)));
    e.features.reserve(kinds_.size());
    for (std::uint32_t f = 0; f < kinds_.size(); ++f) {
      switch (kinds_[f]) {
        case FeatureKind::kSparseId: {
          auto id = static_cast<std::int64_t>(rng.below(cardinality));
          if (const int source = proxy_source_[f]; source >= 0) {
            if (rng.uniform() < config_.proxy_fidelity) {
              id = std::get<std::int64_t>(e.features[static_cast<std::size_t>(source)].value);
            }
          }
          e.features.push_back({FeatureIndex{f}, id});
          break;
        }
        case FeatureKind::kDense:
          e.features.push_back({FeatureIndex{f}, rng.normal()});
          break;
        case FeatureKind::kEmbedding: {
          std::vector<double> vec(dim);
          for (double& x : vec) x = rng.normal();
          e.features.push_back({FeatureIndex{f}, std::move(vec)});
          break;
        }
      }
    }
    e.label = rng.uniform() < 1.0 / (1.0 + std::exp(-true_score(e))) ? 1 : 0;
    visit(std::move(e));
  }
}

std::vector<Example> World::generate_day(int day, TrafficStream stream) const {
  std::vector<Example> examples;
  examples.reserve(static_cast<std::size_t>(
      stream == TrafficStream::kServing ? config_.requests_per_day : config_.holdout_per_day));
  visit_day(day, stream, [&](Example&& e) { examples.push_back(std::move(e)); });
  return examples;
}

std::vector<Example> generate_day(const WorldConfig& config, int day) {
  return World(config).generate_day(day);
}

}  // namespace ieff
