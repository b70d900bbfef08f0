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

#include "ieff/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include "json.hpp"

#include "ieff/error.h"
#include "ieff/hashing.h"

namespace ieff {
namespace {

constexpr int kCheckpointVersion = 1;
constexpr std::size_t kSparseBucketCache = 1024;

std::uint64_t hash_decimal(std::uint64_t h, std::uint64_t value) {
  char digits[20];
  int n = 0;
  do {
    digits[n++] = static_cast<char>('0' + value % 10);
    value /= 10;
  } while (value != 0);
  while (n > 0) {
    h ^= static_cast<std::uint8_t>(digits[--n]);
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace

ModelState ModelState::zeros(std::size_t buckets, double learning_rate) {
  if (buckets == 0) throw Error(ErrorCode::kInvalidArgument, "bucket count must be positive");
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning rate must be positive");
  }
  ModelState model;
  model.weights.assign(buckets, 0.0);
  model.learning_rate = learning_rate;
  return model;
}

Featurizer::Featurizer(const FeatureRegistry& registry, std::size_t buckets)
    : buckets_(buckets) {
  for (const auto& feature : registry.features()) {
    const std::uint64_t base = fnv1a64(feature.name);
    dense_hash_.push_back(base);
    sparse_prefix_.push_back(fnv1a64("=", base));
    component_prefix_.push_back(fnv1a64("[", base));
  }
  if (buckets_ > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "bucket count must fit in 32 bits");
  }
  const auto n = registry.size();
  sparse_buckets_.resize(n);
  component_buckets_.resize(n);
  dense_bucket_.resize(n);
  for (std::uint32_t f = 0; f < n; ++f) {
    const FeatureIndex index{f};
    dense_bucket_[f] = static_cast<std::uint32_t>(dense_hash_[f] % buckets_);
    switch (registry.at(index).kind) {
      case FeatureKind::kSparseId:
        sparse_buckets_[f].resize(kSparseBucketCache);
        for (std::size_t id = 0; id < kSparseBucketCache; ++id) {
          sparse_buckets_[f][id] = static_cast<std::uint32_t>(
              sparse_hash(index, static_cast<std::int64_t>(id)) % buckets_);
        }
        break;
      case FeatureKind::kEmbedding:
        component_buckets_[f].resize(registry.embedding_dim());
        for (std::size_t i = 0; i < registry.embedding_dim(); ++i) {
          component_buckets_[f][i] =
              static_cast<std::uint32_t>(component_hash(index, i) % buckets_);
        }
        break;
      case FeatureKind::kDense:
        break;
    }
  }
}

std::uint64_t Featurizer::sparse_hash(FeatureIndex feature, std::int64_t id) const {
  std::uint64_t h = sparse_prefix_[feature.value];
  if (id < 0) {
    h ^= static_cast<std::uint8_t>('-');
    h *= kFnvPrime;
    return hash_decimal(h, static_cast<std::uint64_t>(-(id + 1)) + 1);
  }
  return hash_decimal(h, static_cast<std::uint64_t>(id));
}

std::uint64_t Featurizer::component_hash(FeatureIndex feature, std::size_t component) const {
  return fnv1a64("]", hash_decimal(component_prefix_[feature.value], component));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double score(const ModelState& model, const Featurizer& featurizer,
             std::span<const FeatureEntry> features) {
  double z = model.bias;
  featurizer.for_each_term(features, [&](std::size_t bucket, double magnitude) {
    z += model.weights[bucket] * magnitude;
  });
  return z;
}

double predict(const ModelState& model, const Featurizer& featurizer,
               const LoggedExample& example) {
  return sigmoid(score(model, featurizer, example.features));
}

void train_day(ModelState& model, const Featurizer& featurizer,
               std::span<const LoggedExample> logged) {
  const int day = model.day_trained_through + 1;
  for (const auto& example : logged) {
    if (example.day != day) {
      throw Error(ErrorCode::kOutOfOrderDay,
                  "expected examples from day " + std::to_string(day) + ", got day " +
                      std::to_string(example.day));
    }
  }
  const double lr = model.learning_rate;
  for (const auto& example : logged) {
    const double g = predict(model, featurizer, example) - example.label;
    model.bias -= lr * g;
    featurizer.for_each_term(example.features, [&](std::size_t bucket, double magnitude) {
      model.weights[bucket] -= lr * g * magnitude;
    });
  }
  model.day_trained_through = day;
}

double normalized_entropy(std::span<const int> labels, std::span<const double> predictions) {
  if (labels.empty() || labels.size() != predictions.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "normalized_entropy needs equal-length, non-empty labels and predictions");
  }
  double positives = 0.0;
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(predictions[i], kPredictionClip, 1.0 - kPredictionClip);
    loss -= labels[i] != 0 ? std::log(p) : std::log1p(-p);
    positives += labels[i] != 0 ? 1.0 : 0.0;
  }
  const double n = static_cast<double>(labels.size());
  const double mean_label = positives / n;
  if (mean_label <= 0.0 || mean_label >= 1.0) {
    throw Error(ErrorCode::kDegenerateLabels,
                "normalized entropy is undefined when every label is identical");
  }
  const double background =
      -(mean_label * std::log(mean_label) + (1.0 - mean_label) * std::log1p(-mean_label));
  return (loss / n) / background;
}

double normalized_entropy(const ModelState& model, const Featurizer& featurizer,
                          std::span<const LoggedExample> holdout) {
  std::vector<int> labels;
  std::vector<double> predictions;
  labels.reserve(holdout.size());
  predictions.reserve(holdout.size());
  for (const auto& example : holdout) {
    labels.push_back(example.label);
    predictions.push_back(predict(model, featurizer, example));
  }
  return normalized_entropy(labels, predictions);
}

std::string save_checkpoint(const ModelState& model) {
  nlohmann::json j;
  j["format"] = "ieff-model";
  j["version"] = kCheckpointVersion;
  j["buckets"] = model.weights.size();
  j["bias"] = model.bias;
  j["learning_rate"] = model.learning_rate;
  j["day_trained_through"] = model.day_trained_through;
  auto& weights = j["weights"] = nlohmann::json::array();
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    if (model.weights[i] != 0.0) weights.push_back({i, model.weights[i]});
  }
  return j.dump();
}

ModelState load_checkpoint(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "ieff-model" || j.at("version") != kCheckpointVersion) {
      throw Error(ErrorCode::kParseError, "not an ieff-model v1 checkpoint");
    }
    ModelState model = ModelState::zeros(j.at("buckets").get<std::size_t>(),
                                         j.at("learning_rate").get<double>());
    model.bias = j.at("bias").get<double>();
    model.day_trained_through = j.at("day_trained_through").get<int>();
    for (const auto& w : j.at("weights")) {
      model.weights.at(w.at(0).get<std::size_t>()) = w.at(1).get<double>();
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("checkpoint: ") + e.what());
  } catch (const std::out_of_range&) {
    throw Error(ErrorCode::kParseError, "checkpoint: weight index out of range");
  }
}

}  // namespace ieff
