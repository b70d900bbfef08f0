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

#ifndef IEFF_TRAINER_H_
#define IEFF_TRAINER_H_

// Hashed logistic regression trained by one SGD pass per simulated day, and
// normalized entropy evaluation.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ieff/types.h"

namespace ieff {

inline constexpr std::size_t kDefaultBucketCount = std::size_t{1} << 16;
inline constexpr double kDefaultLearningRate = 0.05;
inline constexpr double kPredictionClip = 1e-6;

struct ModelState {
  std::vector<double> weights;
  double bias = 0.0;
  double learning_rate = kDefaultLearningRate;
  // -1 before any training day.
  int day_trained_through = -1;

  static ModelState zeros(std::size_t buckets = kDefaultBucketCount,
                          double learning_rate = kDefaultLearningRate);

  bool operator==(const ModelState&) const = default;
};

// Maps present features to (bucket, magnitude) terms. Buckets are
// FNV-1a("name=value") for sparse ids, FNV-1a("name[i]") for embedding
// components and FNV-1a("name") for dense features, modulo the bucket count.
class Featurizer {
 public:
  Featurizer(const FeatureRegistry& registry, std::size_t buckets = kDefaultBucketCount);

  std::size_t buckets() const { return buckets_; }

  std::uint64_t sparse_hash(FeatureIndex feature, std::int64_t id) const;
  std::uint64_t component_hash(FeatureIndex feature, std::size_t component) const;
  std::uint64_t dense_hash(FeatureIndex feature) const { return dense_hash_[feature.value]; }

  std::size_t sparse_bucket(FeatureIndex feature, std::int64_t id) const {
    const auto& table = sparse_buckets_[feature.value];
    if (id >= 0 && static_cast<std::uint64_t>(id) < table.size()) {
      return table[static_cast<std::size_t>(id)];
    }
    return sparse_hash(feature, id) % buckets_;
  }
  std::size_t component_bucket(FeatureIndex feature, std::size_t component) const {
    const auto& table = component_buckets_[feature.value];
    if (component < table.size()) return table[component];
    return component_hash(feature, component) % buckets_;
  }

  template <typename Fn>
  void for_each_term(std::span<const FeatureEntry> features, Fn&& fn) const {
    for (const auto& entry : features) {
      if (const auto* id = std::get_if<std::int64_t>(&entry.value)) {
        fn(sparse_bucket(entry.feature, *id), 1.0);
      } else if (const auto* dense = std::get_if<double>(&entry.value)) {
        fn(dense_bucket_[entry.feature.value], *dense);
      } else {
        const auto& vec = std::get<std::vector<double>>(entry.value);
        for (std::size_t i = 0; i < vec.size(); ++i) {
          fn(component_bucket(entry.feature, i), vec[i]);
        }
      }
    }
  }

 private:
  std::size_t buckets_;
  // Bucket caches for small non-negative ids and in-range components.
  std::vector<std::vector<std::uint32_t>> sparse_buckets_;
  std::vector<std::vector<std::uint32_t>> component_buckets_;
  std::vector<std::uint32_t> dense_bucket_;
  std::vector<std::uint64_t> sparse_prefix_;     // "name="
  std::vector<std::uint64_t> component_prefix_;  // "name["
  std::vector<std::uint64_t> dense_hash_;        // "name"
};

double sigmoid(double z);

double score(const ModelState& model, const Featurizer& featurizer,
             std::span<const FeatureEntry> features);
double predict(const ModelState& model, const Featurizer& featurizer,
               const LoggedExample& example);

// One SGD pass on log-loss in the given order. Examples must belong to day
// model.day_trained_through + 1 (kOutOfOrderDay otherwise). An empty batch only
// advances the day counter.
void train_day(ModelState& model, const Featurizer& featurizer,
               std::span<const LoggedExample> logged);

// Log-loss over the entropy of the mean label, predictions clipped to
// [1e-6, 1 - 1e-6]. Throws kDegenerateLabels when the mean label is 0 or 1.
double normalized_entropy(std::span<const int> labels, std::span<const double> predictions);
double normalized_entropy(const ModelState& model, const Featurizer& featurizer,
                          std::span<const LoggedExample> holdout);

// Text checkpoint (JSON) carrying weights, bias, hyperparameters and the day
// counter. Zero weights are omitted.
std::string save_checkpoint(const ModelState& model);
ModelState load_checkpoint(const std::string& text);

}  // namespace ieff

#endif  // IEFF_TRAINER_H_
