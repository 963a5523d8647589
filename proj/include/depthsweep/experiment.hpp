// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DEPTHSWEEP_EXPERIMENT_HPP
#define DEPTHSWEEP_EXPERIMENT_HPP

#include "depthsweep/error.hpp"
#include "depthsweep/data.hpp"
#include "depthsweep/features.hpp"
#include "depthsweep/train.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace depthsweep {

/// What the train_time_s column of a sweep holds: measured seconds of the
/// epoch loop, or its deterministic floating-point cost in GFLOP.
enum class TimeSource { wall, flops };

const char *time_source_name(TimeSource source) noexcept;
TimeSource parse_time_source(const std::string &name);

struct SweepConfig {
  std::vector<std::size_t> depths{1, 2, 3, 5, 10, 25, 50, 100};
  std::size_t repeats = 3;
  TrainConfig train;
  std::size_t width_max = kDefaultWidthMax;
  std::size_t width_min = kDefaultWidthMin;
  double dropout_rate = kDefaultDropoutRate;
  InitScheme init = InitScheme::glorot;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  TimeSource clock = TimeSource::wall;
  /// Leading training examples used for the initial gradient diagnostics.
  std::size_t grad_flow_samples = 256;
  std::filesystem::path output_dir;
};

void validate(const SweepConfig &config);

struct SweepData {
  Dataset train;
  Dataset test;
  EmbeddingTable table;
  std::size_t max_words;
};

struct SweepRow {
  std::size_t depth = 0;
  double train_time_seconds = 0.0;
  double train_accuracy_pct = 0.0;
  double validation_accuracy_pct = 0.0;
  double test_accuracy_pct = 0.0;
  std::size_t diverged_runs = 0;
  double first_layer_grad_norm_init = 0.0;

  bool operator==(const SweepRow &) const = default;
};

/// One train + evaluate cell of the sweep, as persisted under runs/.
struct RunRecord {
  std::size_t depth = 0;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden_widths;
  TimeSource time_source = TimeSource::wall;
  double test_accuracy = 0.0;
  double first_layer_grad_norm_init = 0.0;
  TrainReport report;

  /// Value reported in the time column under `time_source`.
  double reported_time() const;
};

nlohmann::ordered_json to_json(const RunRecord &record);
RunRecord run_record_from_json(const nlohmann::json &j);

using CellRunner = std::function<RunRecord(std::size_t depth, std::size_t repeat)>;

/// Runs every depth x repeat cell, up to `workers` at a time. The result is
/// ordered by depth then repeat regardless of completion order.
std::vector<RunRecord> run_cells(const std::vector<std::size_t> &depths,
                                 std::size_t repeats, std::size_t workers,
                                 const CellRunner &runner);

/// Arithmetic means over the non-diverged runs of each depth (over all runs
/// when every run diverged). Rows follow `depths`.
std::vector<SweepRow> aggregate_rows(const std::vector<RunRecord> &records,
                                     const std::vector<std::size_t> &depths);

/// Default cell: taper widths, build, train, evaluate on the test set.
RunRecord run_cell(const SweepConfig &config, const SweepData &data,
                   std::size_t depth, std::size_t repeat);

/// Full study: every cell, runs/<depth>_<repeat>.json, sweep.csv, the four
/// figures (when at least two depths) and grad_flow.csv under output_dir.
std::vector<SweepRow> run_depth_sweep(const SweepConfig &config,
                                      const SweepData &data);

/// Same aggregation and outputs with an injected cell runner; grad_flow.csv
/// is not produced.
std::vector<SweepRow> run_depth_sweep(const SweepConfig &config,
                                      const CellRunner &runner);

struct GradFlowEntry {
  std::size_t depth = 0;
  std::size_t layer_index = 0;
  double mean_norm = 0.0;
  bool operator==(const GradFlowEntry &) const = default;
};

/// initial_gradient_profile at every configured depth, on the first
/// grad_flow_samples training examples, with `repeats` seeds from config.seed.
std::vector<GradFlowEntry> grad_flow_report(const SweepConfig &config,
                                            const SweepData &data);
void write_grad_flow_csv(const std::vector<GradFlowEntry> &entries,
                         const std::filesystem::path &path);

void write_sweep_csv(const std::vector<SweepRow> &rows,
                     const std::filesystem::path &path);
std::string sweep_csv_string(const std::vector<SweepRow> &rows);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path &path);

/// Standalone SVG line charts with a log10 depth axis. The plot group
/// carries data-* attributes declaring the axis transform.
struct PlotSpec {
  std::string file_name;
  std::string title;
  std::string y_label;
  double SweepRow::*field;
};

const std::vector<PlotSpec> &figure_specs();

std::string render_plot_svg(const std::vector<SweepRow> &rows,
                            const PlotSpec &spec);
std::vector<std::filesystem::path>
render_plots(const std::vector<SweepRow> &rows,
             const std::filesystem::path &output_dir);

/// Rebuilds sweep.csv and the figures from runs/*.json without training.
std::vector<SweepRow> report_from_runs(const std::filesystem::path &output_dir);

} // namespace depthsweep

#endif // DEPTHSWEEP_EXPERIMENT_HPP
