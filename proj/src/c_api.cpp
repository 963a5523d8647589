// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "depthsweep/depthsweep.h"

#include "depthsweep/data.hpp"
#include "depthsweep/experiment.hpp"
#include "depthsweep/features.hpp"
#include "depthsweep/nn.hpp"
#include "depthsweep/train.hpp"

#include <algorithm>
#include <fstream>
#include <new>
#include <string>

namespace ds = depthsweep;

struct dsw_embeddings {
  ds::EmbeddingTable table;
};

struct dsw_dataset {
  ds::Dataset dataset;
};

struct dsw_model {
  ds::Checkpoint checkpoint;
};

struct dsw_sweep_result {
  std::vector<ds::SweepRow> rows;
};

namespace {

thread_local std::string g_last_error;

dsw_status status_for(ds::ErrorKind kind) {
  switch (kind) {
  case ds::ErrorKind::io:
    return DSW_ERR_IO;
  case ds::ErrorKind::parse:
    return DSW_ERR_PARSE;
  case ds::ErrorKind::shape:
    return DSW_ERR_SHAPE;
  case ds::ErrorKind::config:
    return DSW_ERR_CONFIG;
  case ds::ErrorKind::numeric:
    return DSW_ERR_NUMERIC;
  case ds::ErrorKind::validation:
    return DSW_ERR_VALIDATION;
  case ds::ErrorKind::input:
    return DSW_ERR_INPUT;
  case ds::ErrorKind::internal:
    return DSW_ERR_INTERNAL;
  }
  return DSW_ERR_INTERNAL;
}

dsw_status fail(dsw_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

/// Runs `f`, translating exceptions into status codes. Nothing escapes.
template <class F> dsw_status guarded(F &&f) noexcept {
  try {
    f();
    return DSW_OK;
  } catch (const ds::Error &e) {
    return fail(status_for(e.kind()), e.what());
  } catch (const std::bad_alloc &) {
    return fail(DSW_ERR_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return fail(DSW_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DSW_ERR_INTERNAL, "unknown exception");
  }
}

#define DSW_REQUIRE(cond, what)                                                \
  do {                                                                         \
    if (!(cond)) {                                                             \
      return fail(DSW_ERR_INVALID_ARGUMENT, what);                             \
    }                                                                          \
  } while (0)

ds::TrainConfig to_cpp(const dsw_train_config &c) {
  ds::TrainConfig t;
  t.epochs = c.epochs;
  t.batch_size = c.batch_size;
  t.learning_rate = c.learning_rate;
  t.validation_fraction = c.validation_fraction;
  t.seed = c.seed;
  t.record_grad_norms = c.record_grad_norms != 0;
  t.cache_features = c.cache_features != 0;
  return t;
}

dsw_sweep_row to_c(const ds::SweepRow &r) {
  return {r.depth,
          r.train_time_seconds,
          r.train_accuracy_pct,
          r.validation_accuracy_pct,
          r.test_accuracy_pct,
          r.diverged_runs,
          r.first_layer_grad_norm_init};
}

const std::size_t kDefaultDepths[] = {1, 2, 3, 5, 10, 25, 50, 100};

} // namespace

extern "C" {

const char *dsw_version(void) { return DEPTHSWEEP_VERSION; }

const char *dsw_status_name(dsw_status status) {
  switch (status) {
  case DSW_OK:
    return "ok";
  case DSW_ERR_INVALID_ARGUMENT:
    return "invalid argument";
  case DSW_ERR_IO:
    return "I/O error";
  case DSW_ERR_PARSE:
    return "parse error";
  case DSW_ERR_SHAPE:
    return "shape error";
  case DSW_ERR_CONFIG:
    return "configuration error";
  case DSW_ERR_NUMERIC:
    return "numeric error";
  case DSW_ERR_VALIDATION:
    return "validation error";
  case DSW_ERR_INPUT:
    return "input error";
  case DSW_ERR_INTERNAL:
    return "internal error";
  }
  return "unknown status";
}

const char *dsw_last_error(void) { return g_last_error.c_str(); }

// ---- embeddings and features

dsw_status dsw_embeddings_load(const char *path, size_t expected_dim,
                               dsw_embeddings **out) {
  DSW_REQUIRE(path && out, "dsw_embeddings_load: NULL argument");
  *out = nullptr;
  return guarded([&] {
    const std::size_t dim =
        expected_dim ? expected_dim : ds::detect_embedding_dim(path);
    *out = new dsw_embeddings{ds::load_embeddings(path, dim)};
  });
}

dsw_status dsw_embeddings_save(const dsw_embeddings *table, const char *path) {
  DSW_REQUIRE(table && path, "dsw_embeddings_save: NULL argument");
  return guarded([&] { ds::save_embeddings(table->table, path); });
}

size_t dsw_embeddings_dim(const dsw_embeddings *table) {
  return table ? table->table.dim() : 0;
}

size_t dsw_embeddings_size(const dsw_embeddings *table) {
  return table ? table->table.size() : 0;
}

void dsw_embeddings_free(dsw_embeddings *table) { delete table; }

size_t dsw_feature_dim(size_t max_words, size_t dim) {
  return ds::feature_dim(max_words, dim);
}

dsw_status dsw_featurize_text(const dsw_embeddings *table, const char *text,
                              double weak_annotation, size_t max_words,
                              double *out, size_t out_len) {
  DSW_REQUIRE(table && text && out, "dsw_featurize_text: NULL argument");
  return guarded([&] {
    const ds::Question q = ds::make_question("", text, weak_annotation, 0);
    ds::featurize_into(q.tokens, q.weak_annotation, table->table, max_words,
                       std::span<double>(out, out_len));
  });
}

// ---- datasets

dsw_status dsw_dataset_load(const char *path, dsw_dataset **out) {
  DSW_REQUIRE(path && out, "dsw_dataset_load: NULL argument");
  *out = nullptr;
  return guarded([&] { *out = new dsw_dataset{ds::load_dataset(path)}; });
}

dsw_status dsw_dataset_save(const dsw_dataset *dataset, const char *path) {
  DSW_REQUIRE(dataset && path, "dsw_dataset_save: NULL argument");
  return guarded([&] { ds::save_dataset(dataset->dataset, path); });
}

size_t dsw_dataset_size(const dsw_dataset *dataset) {
  return dataset ? dataset->dataset.size() : 0;
}

dsw_status dsw_dataset_balance(const dsw_dataset *dataset, size_t *deleted,
                               size_t *kept, int *balanced) {
  DSW_REQUIRE(dataset, "dsw_dataset_balance: NULL dataset");
  const ds::Balance b = ds::check_balance(dataset->dataset);
  if (deleted) {
    *deleted = b.deleted;
  }
  if (kept) {
    *kept = b.kept;
  }
  if (balanced) {
    *balanced = b.balanced ? 1 : 0;
  }
  return DSW_OK;
}

dsw_status dsw_dataset_split(const dsw_dataset *dataset, size_t holdout_count,
                             uint64_t seed, dsw_dataset **rest,
                             dsw_dataset **holdout) {
  DSW_REQUIRE(dataset && rest && holdout, "dsw_dataset_split: NULL argument");
  *rest = nullptr;
  *holdout = nullptr;
  return guarded([&] {
    auto [r, h] = ds::split_holdout(dataset->dataset, holdout_count, seed);
    auto *rp = new dsw_dataset{std::move(r)};
    try {
      *holdout = new dsw_dataset{std::move(h)};
    } catch (...) {
      delete rp;
      throw;
    }
    *rest = rp;
  });
}

size_t dsw_dataset_max_tokens(const dsw_dataset *dataset) {
  std::size_t longest = 0;
  if (dataset) {
    for (const auto &q : dataset->dataset.questions) {
      longest = std::max(longest, q.tokens.size());
    }
  }
  return longest;
}

void dsw_dataset_free(dsw_dataset *dataset) { delete dataset; }

dsw_synth_params dsw_synth_params_default(void) {
  const ds::SyntheticParams p;
  return {p.n, p.vocab_size, p.dim, p.max_words, p.noise, p.seed};
}

dsw_status dsw_gen_synthetic(const dsw_synth_params *params,
                             dsw_dataset **dataset, dsw_embeddings **table) {
  DSW_REQUIRE(params && dataset && table, "dsw_gen_synthetic: NULL argument");
  *dataset = nullptr;
  *table = nullptr;
  return guarded([&] {
    ds::SyntheticParams p;
    p.n = params->n;
    p.vocab_size = params->vocab_size;
    p.dim = params->dim;
    p.max_words = params->max_words;
    p.noise = params->noise;
    p.seed = params->seed;
    auto corpus = ds::gen_synthetic(p);
    auto *d = new dsw_dataset{std::move(corpus.dataset)};
    try {
      *table = new dsw_embeddings{std::move(corpus.table)};
    } catch (...) {
      delete d;
      throw;
    }
    *dataset = d;
  });
}

// ---- models

dsw_train_config dsw_train_config_default(void) {
  const ds::TrainConfig t;
  return {t.epochs,
          t.batch_size,
          t.learning_rate,
          t.validation_fraction,
          t.seed,
          t.record_grad_norms ? 1 : 0,
          t.cache_features ? 1 : 0};
}

dsw_status dsw_taper_widths(size_t depth, size_t width_max, size_t width_min,
                            size_t *out, size_t out_len) {
  DSW_REQUIRE(out || depth == 0, "dsw_taper_widths: NULL output");
  DSW_REQUIRE(out_len >= depth, "dsw_taper_widths: output buffer too small");
  return guarded([&] {
    const auto widths = ds::taper_widths(depth, width_max, width_min);
    std::copy(widths.begin(), widths.end(), out);
  });
}

dsw_status dsw_model_build(size_t max_words, size_t embedding_dim,
                           const size_t *hidden_widths, size_t n_hidden,
                           double dropout_rate, dsw_init init, uint64_t seed,
                           dsw_model **out) {
  DSW_REQUIRE(out, "dsw_model_build: NULL output");
  DSW_REQUIRE(hidden_widths || n_hidden == 0, "dsw_model_build: NULL widths");
  *out = nullptr;
  return guarded([&] {
    if (max_words == 0 || embedding_dim == 0) {
      throw ds::ConfigError("max_words and embedding_dim must be positive");
    }
    ds::ModelConfig config;
    config.input_dim = ds::feature_dim(max_words, embedding_dim);
    config.hidden_widths.assign(hidden_widths, hidden_widths + n_hidden);
    config.dropout_rate = dropout_rate;
    config.seed = seed;
    config.init = init == DSW_INIT_HE ? ds::InitScheme::he : ds::InitScheme::glorot;
    *out = new dsw_model{ds::Checkpoint{ds::build_model(config), seed, max_words}};
  });
}

dsw_status dsw_model_load(const char *path, dsw_model **out) {
  DSW_REQUIRE(path && out, "dsw_model_load: NULL argument");
  *out = nullptr;
  return guarded([&] { *out = new dsw_model{ds::load_checkpoint(path)}; });
}

dsw_status dsw_model_save(const dsw_model *model, const char *path) {
  DSW_REQUIRE(model && path, "dsw_model_save: NULL argument");
  return guarded([&] { ds::save_checkpoint(model->checkpoint, path); });
}

size_t dsw_model_input_dim(const dsw_model *model) {
  return model ? model->checkpoint.model.input_dim() : 0;
}

size_t dsw_model_num_layers(const dsw_model *model) {
  return model ? model->checkpoint.model.num_layers() : 0;
}

size_t dsw_model_max_words(const dsw_model *model) {
  return model ? model->checkpoint.max_words : 0;
}

void dsw_model_free(dsw_model *model) { delete model; }

dsw_status dsw_model_train(dsw_model *model, const dsw_dataset *train,
                           const dsw_embeddings *table,
                           const dsw_train_config *config,
                           const char *report_json_path,
                           dsw_train_summary *summary) {
  DSW_REQUIRE(model && train && table && config,
              "dsw_model_train: NULL argument");
  return guarded([&] {
    auto result = ds::train(model->checkpoint.model, train->dataset,
                            to_cpp(*config), table->table);
    if (report_json_path) {
      std::ofstream out(report_json_path, std::ios::binary | std::ios::trunc);
      out << ds::to_json(result.report).dump(2) << '\n';
      if (!out) {
        throw ds::IoError(std::string("cannot write '") + report_json_path +
                          "'");
      }
    }
    model->checkpoint.model = std::move(result.model);
    if (summary) {
      const auto &r = result.report;
      summary->final_train_accuracy = r.final_train_accuracy;
      summary->final_validation_accuracy = r.final_validation_accuracy;
      summary->wall_time_seconds = r.wall_time_seconds;
      summary->final_loss = r.loss_curve.empty() ? 0.0 : r.loss_curve.back();
      summary->epochs_completed = r.loss_curve.size();
      summary->diverged = r.diverged ? 1 : 0;
    }
  });
}

dsw_status dsw_model_evaluate(const dsw_model *model, const dsw_dataset *dataset,
                              const dsw_embeddings *table, double *accuracy_pct) {
  DSW_REQUIRE(model && dataset && table && accuracy_pct,
              "dsw_model_evaluate: NULL argument");
  return guarded([&] {
    *accuracy_pct =
        ds::evaluate(model->checkpoint.model, dataset->dataset, table->table);
  });
}

dsw_status dsw_model_predict(const dsw_model *model, const dsw_dataset *dataset,
                             const dsw_embeddings *table, double *out,
                             size_t out_len) {
  DSW_REQUIRE(model && dataset && table && out,
              "dsw_model_predict: NULL argument");
  DSW_REQUIRE(out_len >= dataset->dataset.size(),
              "dsw_model_predict: output buffer too small");
  return guarded([&] {
    const auto &m = model->checkpoint.model;
    const ds::FeatureSource source(dataset->dataset, table->table,
                                   ds::infer_max_words(m, table->table), false);
    std::vector<std::size_t> idx(1);
    for (std::size_t i = 0; i < source.size(); ++i) {
      idx[0] = i;
      out[i] = ds::predict(m, source.batch(idx))(0, 0);
    }
  });
}

// ---- depth sweep

dsw_sweep_config dsw_sweep_config_default(void) {
  const ds::SweepConfig s;
  dsw_sweep_config c{};
  c.depths = kDefaultDepths;
  c.n_depths = sizeof kDefaultDepths / sizeof kDefaultDepths[0];
  c.repeats = s.repeats;
  c.train = dsw_train_config_default();
  c.width_max = s.width_max;
  c.width_min = s.width_min;
  c.dropout_rate = s.dropout_rate;
  c.init = DSW_INIT_GLOROT;
  c.seed = s.seed;
  c.workers = s.workers;
  c.clock = DSW_CLOCK_WALL;
  c.grad_flow_samples = s.grad_flow_samples;
  c.output_dir = nullptr;
  return c;
}

dsw_status dsw_sweep_run(const dsw_sweep_config *config,
                         const dsw_dataset *train, const dsw_dataset *test,
                         const dsw_embeddings *table, size_t max_words,
                         dsw_sweep_result **out) {
  DSW_REQUIRE(config && train && test && table && out,
              "dsw_sweep_run: NULL argument");
  DSW_REQUIRE(config->output_dir, "dsw_sweep_run: output_dir is NULL");
  DSW_REQUIRE(config->depths || config->n_depths == 0,
              "dsw_sweep_run: NULL depths");
  *out = nullptr;
  return guarded([&] {
    ds::SweepConfig s;
    s.depths.assign(config->depths, config->depths + config->n_depths);
    s.repeats = config->repeats;
    s.train = to_cpp(config->train);
    s.width_max = config->width_max;
    s.width_min = config->width_min;
    s.dropout_rate = config->dropout_rate;
    s.init = config->init == DSW_INIT_HE ? ds::InitScheme::he : ds::InitScheme::glorot;
    s.seed = config->seed;
    s.workers = config->workers;
    s.clock = config->clock == DSW_CLOCK_FLOPS ? ds::TimeSource::flops
                                               : ds::TimeSource::wall;
    s.grad_flow_samples = config->grad_flow_samples;
    s.output_dir = config->output_dir;
    if (max_words == 0) {
      throw ds::ConfigError("max_words must be positive");
    }
    const ds::SweepData data{train->dataset, test->dataset, table->table,
                             max_words};
    *out = new dsw_sweep_result{ds::run_depth_sweep(s, data)};
  });
}

dsw_status dsw_report_from_runs(const char *output_dir,
                                dsw_sweep_result **out) {
  DSW_REQUIRE(output_dir, "dsw_report_from_runs: NULL output_dir");
  if (out) {
    *out = nullptr;
  }
  return guarded([&] {
    auto rows = ds::report_from_runs(output_dir);
    if (out) {
      *out = new dsw_sweep_result{std::move(rows)};
    }
  });
}

size_t dsw_sweep_result_rows(const dsw_sweep_result *result) {
  return result ? result->rows.size() : 0;
}

dsw_status dsw_sweep_result_row(const dsw_sweep_result *result, size_t index,
                                dsw_sweep_row *row) {
  DSW_REQUIRE(result && row, "dsw_sweep_result_row: NULL argument");
  DSW_REQUIRE(index < result->rows.size(), "dsw_sweep_result_row: index out of range");
  *row = to_c(result->rows[index]);
  return DSW_OK;
}

void dsw_sweep_result_free(dsw_sweep_result *result) { delete result; }

} // extern "C"
