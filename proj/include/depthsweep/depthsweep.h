/*
 * SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEPTHSWEEP_H
#define DEPTHSWEEP_H

/* C interface to the depthsweep library. Every object is an opaque handle
 * released with its matching *_free function; *_free accepts NULL. Calls
 * return a dsw_status; on failure dsw_last_error() describes the problem
 * (per thread, valid until the next failing call on that thread). */

#include <stddef.h>
#include <stdint.h>

#ifndef DSW_API
#define DSW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dsw_status {
  DSW_OK = 0,
  DSW_ERR_INVALID_ARGUMENT = 1, /* NULL handle, zero-length buffer, ... */
  DSW_ERR_IO = 2,
  DSW_ERR_PARSE = 3,
  DSW_ERR_SHAPE = 4,
  DSW_ERR_CONFIG = 5,
  DSW_ERR_NUMERIC = 6,
  DSW_ERR_VALIDATION = 7,
  DSW_ERR_INPUT = 8,
  DSW_ERR_INTERNAL = 9
} dsw_status;

typedef struct dsw_embeddings dsw_embeddings;
typedef struct dsw_dataset dsw_dataset;
typedef struct dsw_model dsw_model;
typedef struct dsw_sweep_result dsw_sweep_result;

DSW_API const char *dsw_version(void);
DSW_API const char *dsw_status_name(dsw_status status);
DSW_API const char *dsw_last_error(void);

/* ---- embeddings and features ------------------------------------------ */

/* expected_dim == 0 detects the dimension from the file. */
DSW_API dsw_status dsw_embeddings_load(const char *path, size_t expected_dim,
                                       dsw_embeddings **out);
DSW_API dsw_status dsw_embeddings_save(const dsw_embeddings *table,
                                       const char *path);
DSW_API size_t dsw_embeddings_dim(const dsw_embeddings *table);
DSW_API size_t dsw_embeddings_size(const dsw_embeddings *table);
DSW_API void dsw_embeddings_free(dsw_embeddings *table);

DSW_API size_t dsw_feature_dim(size_t max_words, size_t dim);

/* Writes dsw_feature_dim(max_words, dim) values into out. */
DSW_API dsw_status dsw_featurize_text(const dsw_embeddings *table,
                                      const char *text, double weak_annotation,
                                      size_t max_words, double *out,
                                      size_t out_len);

/* ---- datasets ---------------------------------------------------------- */

DSW_API dsw_status dsw_dataset_load(const char *path, dsw_dataset **out);
DSW_API dsw_status dsw_dataset_save(const dsw_dataset *dataset,
                                    const char *path);
DSW_API size_t dsw_dataset_size(const dsw_dataset *dataset);
/* Token count of the longest question. */
DSW_API size_t dsw_dataset_max_tokens(const dsw_dataset *dataset);
DSW_API dsw_status dsw_dataset_balance(const dsw_dataset *dataset,
                                       size_t *deleted, size_t *kept,
                                       int *balanced);
/* Stratified seeded cut of holdout_count examples into *holdout. */
DSW_API dsw_status dsw_dataset_split(const dsw_dataset *dataset,
                                     size_t holdout_count, uint64_t seed,
                                     dsw_dataset **rest, dsw_dataset **holdout);
DSW_API void dsw_dataset_free(dsw_dataset *dataset);

typedef struct dsw_synth_params {
  size_t n;
  size_t vocab_size;
  size_t dim;
  size_t max_words;
  double noise;
  uint64_t seed;
} dsw_synth_params;

DSW_API dsw_synth_params dsw_synth_params_default(void);
DSW_API dsw_status dsw_gen_synthetic(const dsw_synth_params *params,
                                     dsw_dataset **dataset,
                                     dsw_embeddings **table);

/* ---- models ------------------------------------------------------------ */

typedef struct dsw_train_config {
  size_t epochs;
  size_t batch_size;
  double learning_rate;
  double validation_fraction;
  uint64_t seed;
  int record_grad_norms;
  int cache_features;
} dsw_train_config;

typedef struct dsw_train_summary {
  double final_train_accuracy;
  double final_validation_accuracy;
  double wall_time_seconds;
  double final_loss;
  size_t epochs_completed;
  int diverged;
} dsw_train_summary;

DSW_API dsw_train_config dsw_train_config_default(void);

/* Writes the geometric taper for `depth` hidden layers into out[0..depth). */
DSW_API dsw_status dsw_taper_widths(size_t depth, size_t width_max,
                                    size_t width_min, size_t *out,
                                    size_t out_len);

/* input_dim is dsw_feature_dim(max_words, embedding dim). */
typedef enum dsw_init { DSW_INIT_GLOROT = 0, DSW_INIT_HE = 1 } dsw_init;

DSW_API dsw_status dsw_model_build(size_t max_words, size_t embedding_dim,
                                   const size_t *hidden_widths,
                                   size_t n_hidden, double dropout_rate,
                                   dsw_init init, uint64_t seed,
                                   dsw_model **out);
DSW_API dsw_status dsw_model_load(const char *path, dsw_model **out);
DSW_API dsw_status dsw_model_save(const dsw_model *model, const char *path);
DSW_API size_t dsw_model_input_dim(const dsw_model *model);
DSW_API size_t dsw_model_num_layers(const dsw_model *model);
DSW_API size_t dsw_model_max_words(const dsw_model *model);
DSW_API void dsw_model_free(dsw_model *model);

/* Trains in place. When report_json_path is non-NULL the TrainReport is
 * written there as JSON. */
DSW_API dsw_status dsw_model_train(dsw_model *model, const dsw_dataset *train,
                                   const dsw_embeddings *table,
                                   const dsw_train_config *config,
                                   const char *report_json_path,
                                   dsw_train_summary *summary);
DSW_API dsw_status dsw_model_evaluate(const dsw_model *model,
                                      const dsw_dataset *dataset,
                                      const dsw_embeddings *table,
                                      double *accuracy_pct);
/* Eval-mode probability that each question is deleted. */
DSW_API dsw_status dsw_model_predict(const dsw_model *model,
                                     const dsw_dataset *dataset,
                                     const dsw_embeddings *table, double *out,
                                     size_t out_len);

/* ---- depth sweep ------------------------------------------------------- */

typedef enum dsw_clock { DSW_CLOCK_WALL = 0, DSW_CLOCK_FLOPS = 1 } dsw_clock;

typedef struct dsw_sweep_config {
  const size_t *depths;
  size_t n_depths;
  size_t repeats;
  dsw_train_config train;
  size_t width_max;
  size_t width_min;
  double dropout_rate;
  dsw_init init;
  uint64_t seed;
  size_t workers;
  dsw_clock clock;
  size_t grad_flow_samples;
  const char *output_dir;
} dsw_sweep_config;

typedef struct dsw_sweep_row {
  size_t depth;
  double train_time_seconds;
  double train_accuracy_pct;
  double validation_accuracy_pct;
  double test_accuracy_pct;
  size_t diverged_runs;
  double first_layer_grad_norm_init;
} dsw_sweep_row;

/* Defaults; depths points at the built-in list 1,2,3,5,10,25,50,100. */
DSW_API dsw_sweep_config dsw_sweep_config_default(void);

DSW_API dsw_status dsw_sweep_run(const dsw_sweep_config *config,
                                 const dsw_dataset *train,
                                 const dsw_dataset *test,
                                 const dsw_embeddings *table, size_t max_words,
                                 dsw_sweep_result **out);
/* Regenerates sweep.csv and the figures from output_dir/runs. */
DSW_API dsw_status dsw_report_from_runs(const char *output_dir,
                                        dsw_sweep_result **out);
DSW_API size_t dsw_sweep_result_rows(const dsw_sweep_result *result);
DSW_API dsw_status dsw_sweep_result_row(const dsw_sweep_result *result,
                                        size_t index, dsw_sweep_row *row);
DSW_API void dsw_sweep_result_free(dsw_sweep_result *result);

#ifdef __cplusplus
}
#endif

#endif /* DEPTHSWEEP_H */
