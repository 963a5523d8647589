// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "depthsweep/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace depthsweep {

void validate(const TrainConfig &config) {
  if (config.batch_size == 0) {
    throw ConfigError("batch_size must be positive");
  }
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    throw ConfigError("learning_rate must be a positive finite number");
  }
  if (!(config.validation_fraction > 0.0 && config.validation_fraction < 1.0)) {
    throw ConfigError("validation_fraction must lie in (0, 1)");
  }
}

nlohmann::ordered_json to_json(const TrainReport &report) {
  nlohmann::ordered_json j;
  j["final_train_accuracy"] = report.final_train_accuracy;
  j["final_validation_accuracy"] = report.final_validation_accuracy;
  j["wall_time_seconds"] = report.wall_time_seconds;
  j["loss_curve"] = report.loss_curve;
  if (report.grad_norm_history) {
    j["grad_norm_history"] = *report.grad_norm_history;
  } else {
    j["grad_norm_history"] = nullptr;
  }
  j["diverged"] = report.diverged;
  if (report.diverged_epoch) {
    j["diverged_epoch"] = *report.diverged_epoch;
  } else {
    j["diverged_epoch"] = nullptr;
  }
  j["flop_count"] = report.flop_count;
  j["train_examples"] = report.train_examples;
  j["validation_examples"] = report.validation_examples;
  return j;
}

TrainReport train_report_from_json(const nlohmann::json &j) {
  try {
    TrainReport r;
    r.final_train_accuracy = j.at("final_train_accuracy").get<double>();
    r.final_validation_accuracy = j.at("final_validation_accuracy").get<double>();
    r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
    r.loss_curve = j.at("loss_curve").get<std::vector<double>>();
    if (const auto it = j.find("grad_norm_history");
        it != j.end() && !it->is_null()) {
      r.grad_norm_history = it->get<std::vector<std::vector<double>>>();
    }
    r.diverged = j.at("diverged").get<bool>();
    if (const auto it = j.find("diverged_epoch");
        it != j.end() && !it->is_null()) {
      r.diverged_epoch = it->get<std::size_t>();
    }
    r.flop_count = j.value("flop_count", 0.0);
    r.train_examples = j.value("train_examples", std::size_t{0});
    r.validation_examples = j.value("validation_examples", std::size_t{0});
    return r;
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("train report: ") + e.what());
  }
}

std::pair<Dataset, Dataset> split_train_val(const Dataset &dataset,
                                            double fraction, std::uint64_t seed) {
  if (dataset.empty()) {
    throw InputError("cannot split an empty dataset");
  }
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("validation fraction must lie in (0, 1)");
  }
  const auto n = static_cast<double>(dataset.size());
  const auto val = static_cast<std::size_t>(std::llround(fraction * n));
  if (val >= dataset.size()) {
    throw ConfigError("validation fraction leaves no training examples");
  }
  return split_holdout(dataset, val, seed);
}

std::size_t infer_max_words(const MlpModel &model, const EmbeddingTable &table) {
  const std::size_t input = model.input_dim();
  if (input < 1 + table.dim() || (input - 1) % table.dim() != 0) {
    throw ShapeError("model input width " + std::to_string(input) +
                     " is not max_words * " + std::to_string(table.dim()) +
                     " + 1");
  }
  return (input - 1) / table.dim();
}

FeatureSource::FeatureSource(const Dataset &dataset, const EmbeddingTable &table,
                             std::size_t max_words, bool cache)
    : dataset_(&dataset), table_(&table), max_words_(max_words),
      dim_(feature_dim(max_words, table.dim())) {
  if (cache && !dataset.empty()) {
    cache_ = Matrix(dataset.size(), dim_);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const auto &q = dataset.questions[i];
      featurize_into(q.tokens, q.weak_annotation, table, max_words,
                     cache_.row(i));
    }
  }
}

Matrix FeatureSource::batch(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), dim_);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (!cache_.empty()) {
      const auto src = cache_.row(indices[r]);
      std::copy(src.begin(), src.end(), out.row(r).begin());
    } else {
      const auto &q = dataset_->questions.at(indices[r]);
      featurize_into(q.tokens, q.weak_annotation, *table_, max_words_,
                     out.row(r));
    }
  }
  return out;
}

Matrix FeatureSource::labels(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), 1);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    out(r, 0) = static_cast<double>(dataset_->questions.at(indices[r]).label);
  }
  return out;
}

double evaluate(const MlpModel &model, const FeatureSource &source) {
  if (source.size() == 0) {
    throw InputError("cannot evaluate on an empty dataset");
  }
  constexpr std::size_t chunk = 512;
  std::size_t correct = 0;
  std::vector<std::size_t> idx;
  for (std::size_t begin = 0; begin < source.size(); begin += chunk) {
    const std::size_t end = std::min(source.size(), begin + chunk);
    idx.resize(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    const Matrix p = predict(model, source.batch(idx));
    const Matrix y = source.labels(idx);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      if (classify(p(r, 0)) == static_cast<int>(y(r, 0))) {
        ++correct;
      }
    }
  }
  return 100.0 * static_cast<double>(correct) /
         static_cast<double>(source.size());
}

double evaluate(const MlpModel &model, const Dataset &dataset,
                const EmbeddingTable &table) {
  if (dataset.empty()) {
    throw InputError("cannot evaluate on an empty dataset");
  }
  const FeatureSource source(dataset, table, infer_max_words(model, table),
                             false);
  return evaluate(model, source);
}

namespace {

double batch_flops(const MlpModel &model, std::size_t batch) {
  double flops = 0.0;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const double mac = static_cast<double>(model.layers[l].in()) *
                       static_cast<double>(model.layers[l].out()) *
                       static_cast<double>(batch);
    // forward, weight gradient, and (past the first layer) input gradient
    flops += 2.0 * mac * (l == 0 ? 2.0 : 3.0);
  }
  return flops;
}

} // namespace

TrainResult train(MlpModel model, const Dataset &train_set,
                  const TrainConfig &config, const EmbeddingTable &table) {
  validate(config);
  check_invariants(model);
  const std::size_t max_words = infer_max_words(model, table);
  auto [fit_set, val_set] =
      split_train_val(train_set, config.validation_fraction, config.seed);

  const FeatureSource fit(fit_set, table, max_words, config.cache_features);
  const FeatureSource val(val_set, table, max_words, config.cache_features);

  TrainReport report;
  report.train_examples = fit_set.size();
  report.validation_examples = val_set.size();
  if (config.record_grad_norms) {
    report.grad_norm_history.emplace();
  }

  Rng shuffle_rng(derive_seed(config.seed, 11));
  Rng dropout_rng(derive_seed(config.seed, 12));
  std::vector<std::size_t> order(fit.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  const auto start = std::chrono::steady_clock::now();
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    MlpModel snapshot = model;
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    double flops = 0.0;
    std::vector<double> norm_sum(model.num_layers(), 0.0);
    std::size_t batches = 0;
    try {
      for (std::size_t begin = 0; begin < order.size();
           begin += config.batch_size) {
        const std::size_t end = std::min(order.size(), begin + config.batch_size);
        const std::span<const std::size_t> idx(order.data() + begin, end - begin);
        const Matrix x = fit.batch(idx);
        const Matrix y = fit.labels(idx);
        const ForwardResult fwd = forward(model, x, Mode::train, dropout_rng);
        loss_sum += bce_loss(fwd.predictions, y) * static_cast<double>(idx.size());
        const Gradients grads = backward(model, fwd.trace, y);
        if (config.record_grad_norms) {
          const auto norms = gradient_layer_norms(grads);
          for (std::size_t l = 0; l < norms.size(); ++l) {
            norm_sum[l] += norms[l];
          }
        }
        apply_sgd_step(model, grads, config.learning_rate);
        flops += batch_flops(model, idx.size());
        ++batches;
      }
    } catch (const NumericError &) {
      model = std::move(snapshot);
      report.diverged = true;
      report.diverged_epoch = epoch;
      break;
    }
    report.flop_count += flops;
    report.loss_curve.push_back(loss_sum / static_cast<double>(fit.size()));
    if (config.record_grad_norms) {
      for (double &v : norm_sum) {
        v /= static_cast<double>(batches);
      }
      report.grad_norm_history->push_back(std::move(norm_sum));
    }
  }
  const auto stop = std::chrono::steady_clock::now();
  report.wall_time_seconds = std::chrono::duration<double>(stop - start).count();

  report.final_train_accuracy = evaluate(model, fit);
  report.final_validation_accuracy = val.size() ? evaluate(model, val) : 0.0;
  return {std::move(model), std::move(report)};
}

std::vector<double> initial_gradient_profile(const ModelConfig &config,
                                             const Matrix &sample,
                                             const Matrix &labels,
                                             std::size_t repeats) {
  if (repeats == 0) {
    throw ConfigError("initial_gradient_profile needs repeats >= 1");
  }
  std::vector<double> mean;
  for (std::size_t i = 0; i < repeats; ++i) {
    ModelConfig c = config;
    c.seed = config.seed + i;
    const MlpModel model = build_model(c);
    Rng unused(0);
    const ForwardResult fwd = forward(model, sample, Mode::eval, unused);
    const auto norms = gradient_layer_norms(backward(model, fwd.trace, labels));
    if (mean.empty()) {
      mean.assign(norms.size(), 0.0);
    }
    for (std::size_t l = 0; l < norms.size(); ++l) {
      mean[l] += norms[l];
    }
  }
  for (double &v : mean) {
    v /= static_cast<double>(repeats);
  }
  return mean;
}

} // namespace depthsweep
