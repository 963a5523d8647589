// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DEPTHSWEEP_TRAIN_HPP
#define DEPTHSWEEP_TRAIN_HPP

#include "depthsweep/error.hpp"
#include "depthsweep/data.hpp"
#include "depthsweep/features.hpp"
#include "depthsweep/nn.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace depthsweep {

struct TrainConfig {
  std::size_t epochs = 150;
  std::size_t batch_size = 32;
  double learning_rate = 0.01;
  double validation_fraction = 0.10;
  std::uint64_t seed = 0;
  bool record_grad_norms = false;
  /// Featurize the split once up front. The streaming path featurizes each
  /// batch on demand and produces bitwise identical results.
  bool cache_features = true;

  bool operator==(const TrainConfig &) const = default;
};

void validate(const TrainConfig &config);

struct TrainReport {
  double final_train_accuracy = 0.0;      // percent
  double final_validation_accuracy = 0.0; // percent
  double wall_time_seconds = 0.0;
  std::vector<double> loss_curve;
  std::optional<std::vector<std::vector<double>>> grad_norm_history;
  bool diverged = false;
  std::optional<std::size_t> diverged_epoch;
  /// Floating-point operations executed by the epoch loop; a deterministic
  /// cost measure alongside the wall clock.
  double flop_count = 0.0;
  std::size_t train_examples = 0;
  std::size_t validation_examples = 0;

  bool operator==(const TrainReport &) const = default;
};

nlohmann::ordered_json to_json(const TrainReport &report);
TrainReport train_report_from_json(const nlohmann::json &j);

/// Stratified seeded split; |val| = round(fraction * |dataset|).
/// Returns (train, val).
std::pair<Dataset, Dataset> split_train_val(const Dataset &dataset,
                                            double fraction, std::uint64_t seed);

/// Derives max_words from the model input width and the table dimension.
std::size_t infer_max_words(const MlpModel &model, const EmbeddingTable &table);

/// Feature rows for a dataset, either precomputed or built per request.
class FeatureSource {
public:
  FeatureSource(const Dataset &dataset, const EmbeddingTable &table,
                std::size_t max_words, bool cache);

  std::size_t size() const noexcept { return dataset_->size(); }
  std::size_t dim() const noexcept { return dim_; }

  Matrix batch(std::span<const std::size_t> indices) const;
  Matrix labels(std::span<const std::size_t> indices) const;

private:
  const Dataset *dataset_;
  const EmbeddingTable *table_;
  std::size_t max_words_;
  std::size_t dim_;
  Matrix cache_;
};

struct TrainResult {
  MlpModel model;
  TrainReport report;
};

/// Splits off the validation set, then runs `epochs` passes of mini-batch
/// SGD with a seeded reshuffle per epoch. On a non-finite loss or gradient
/// the run stops, the model of the last completed epoch is returned and the
/// report is marked diverged.
TrainResult train(MlpModel model, const Dataset &train_set,
                  const TrainConfig &config, const EmbeddingTable &table);

/// Percentage of examples whose thresholded eval-mode prediction equals the
/// label. Throws InputError on an empty dataset.
double evaluate(const MlpModel &model, const Dataset &dataset,
                const EmbeddingTable &table);
double evaluate(const MlpModel &model, const FeatureSource &source);

/// Mean per-layer gradient norms at initialization over `repeats` fresh
/// models seeded config.seed + i, one eval-mode forward/backward each.
std::vector<double> initial_gradient_profile(const ModelConfig &config,
                                             const Matrix &sample,
                                             const Matrix &labels,
                                             std::size_t repeats);

} // namespace depthsweep

#endif // DEPTHSWEEP_TRAIN_HPP
