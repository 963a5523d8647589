// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "depthsweep/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace depthsweep {

const char *time_source_name(TimeSource source) noexcept {
  return source == TimeSource::wall ? "wall" : "flops";
}

TimeSource parse_time_source(const std::string &name) {
  if (name == "wall") {
    return TimeSource::wall;
  }
  if (name == "flops") {
    return TimeSource::flops;
  }
  throw ConfigError("unknown clock '" + name + "' (expected wall or flops)");
}

void validate(const SweepConfig &config) {
  if (config.depths.empty()) {
    throw ConfigError("sweep needs at least one depth");
  }
  for (std::size_t i = 0; i < config.depths.size(); ++i) {
    if (config.depths[i] == 0) {
      throw ConfigError("sweep depths must be positive");
    }
    if (i > 0 && config.depths[i] <= config.depths[i - 1]) {
      throw ConfigError("sweep depths must be strictly increasing");
    }
  }
  if (config.repeats == 0) {
    throw ConfigError("sweep repeats must be at least 1");
  }
  if (config.workers == 0) {
    throw ConfigError("sweep workers must be at least 1");
  }
  if (config.grad_flow_samples == 0) {
    throw ConfigError("grad_flow_samples must be at least 1");
  }
  if (!(config.dropout_rate >= 0.0 && config.dropout_rate < 1.0)) {
    throw ConfigError("dropout_rate must lie in [0, 1)");
  }
  validate(config.train);
  taper_widths(1, config.width_max, config.width_min);
}

double RunRecord::reported_time() const {
  return time_source == TimeSource::wall ? report.wall_time_seconds
                                         : report.flop_count * 1e-9;
}

nlohmann::ordered_json to_json(const RunRecord &record) {
  nlohmann::ordered_json j;
  j["depth"] = record.depth;
  j["repeat"] = record.repeat;
  j["seed"] = record.seed;
  j["hidden_widths"] = record.hidden_widths;
  j["time_source"] = time_source_name(record.time_source);
  j["test_accuracy"] = record.test_accuracy;
  j["first_layer_grad_norm_init"] = record.first_layer_grad_norm_init;
  const auto report = to_json(record.report);
  for (const auto &[key, value] : report.items()) {
    j[key] = value;
  }
  return j;
}

RunRecord run_record_from_json(const nlohmann::json &j) {
  try {
    RunRecord r;
    r.depth = j.at("depth").get<std::size_t>();
    r.repeat = j.at("repeat").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.hidden_widths = j.at("hidden_widths").get<std::vector<std::size_t>>();
    r.time_source = parse_time_source(j.at("time_source").get<std::string>());
    r.test_accuracy = j.at("test_accuracy").get<double>();
    r.first_layer_grad_norm_init = j.at("first_layer_grad_norm_init").get<double>();
    r.report = train_report_from_json(j);
    return r;
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("run record: ") + e.what());
  }
}

std::vector<RunRecord> run_cells(const std::vector<std::size_t> &depths,
                                 std::size_t repeats, std::size_t workers,
                                 const CellRunner &runner) {
  const std::size_t cells = depths.size() * repeats;
  std::vector<RunRecord> records(cells);
  if (workers <= 1 || cells <= 1) {
    for (std::size_t c = 0; c < cells; ++c) {
      records[c] = runner(depths[c / repeats], c % repeats);
    }
    return records;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(cells);
  auto work = [&] {
    for (std::size_t c = next++; c < cells; c = next++) {
      try {
        records[c] = runner(depths[c / repeats], c % repeats);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n = std::min(workers, cells);
  pool.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pool.emplace_back(work);
  }
  for (auto &t : pool) {
    t.join();
  }
  for (const auto &e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return records;
}

std::vector<SweepRow> aggregate_rows(const std::vector<RunRecord> &records,
                                     const std::vector<std::size_t> &depths) {
  std::vector<SweepRow> rows;
  rows.reserve(depths.size());
  for (std::size_t depth : depths) {
    std::vector<const RunRecord *> all, valid;
    for (const auto &r : records) {
      if (r.depth == depth) {
        all.push_back(&r);
        if (!r.report.diverged) {
          valid.push_back(&r);
        }
      }
    }
    if (all.empty()) {
      throw InputError("no runs recorded for depth " + std::to_string(depth));
    }
    const auto &use = valid.empty() ? all : valid;
    SweepRow row;
    row.depth = depth;
    row.diverged_runs = all.size() - valid.size();
    for (const RunRecord *r : use) {
      row.train_time_seconds += r->reported_time();
      row.train_accuracy_pct += r->report.final_train_accuracy;
      row.validation_accuracy_pct += r->report.final_validation_accuracy;
      row.test_accuracy_pct += r->test_accuracy;
      row.first_layer_grad_norm_init += r->first_layer_grad_norm_init;
    }
    const auto n = static_cast<double>(use.size());
    row.train_time_seconds /= n;
    row.train_accuracy_pct /= n;
    row.validation_accuracy_pct /= n;
    row.test_accuracy_pct /= n;
    row.first_layer_grad_norm_init /= n;
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::pair<Matrix, Matrix> grad_flow_sample(const SweepConfig &config,
                                           const SweepData &data) {
  if (data.train.empty()) {
    throw InputError("sweep training set is empty");
  }
  const FeatureSource source(data.train, data.table, data.max_words, false);
  std::vector<std::size_t> idx(std::min(config.grad_flow_samples, source.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    idx[i] = i;
  }
  return {source.batch(idx), source.labels(idx)};
}

ModelConfig cell_model_config(const SweepConfig &config, const SweepData &data,
                              std::size_t depth, std::uint64_t seed) {
  ModelConfig mc;
  mc.input_dim = feature_dim(data.max_words, data.table.dim());
  mc.hidden_widths = taper_widths(depth, config.width_max, config.width_min);
  mc.dropout_rate = config.dropout_rate;
  mc.seed = seed;
  mc.init = config.init;
  return mc;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size()))) {
    throw IoError("cannot write '" + path.string() + "'");
  }
}

void ensure_dir(const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create directory '" + dir.string() +
                  "': " + ec.message());
  }
}

std::filesystem::path run_path(const std::filesystem::path &dir,
                               std::size_t depth, std::size_t repeat) {
  return dir / "runs" /
         (std::to_string(depth) + "_" + std::to_string(repeat) + ".json");
}

std::vector<SweepRow> finish_sweep(const SweepConfig &config,
                                   const std::vector<RunRecord> &records) {
  auto rows = aggregate_rows(records, config.depths);
  write_sweep_csv(rows, config.output_dir / "sweep.csv");
  if (rows.size() >= 2) {
    render_plots(rows, config.output_dir);
  }
  return rows;
}

} // namespace

RunRecord run_cell(const SweepConfig &config, const SweepData &data,
                   std::size_t depth, std::size_t repeat) {
  const std::uint64_t seed = config.seed + repeat;
  const ModelConfig mc = cell_model_config(config, data, depth, seed);

  RunRecord record;
  record.depth = depth;
  record.repeat = repeat;
  record.seed = seed;
  record.hidden_widths = mc.hidden_widths;
  record.time_source = config.clock;

  const auto [sample, labels] = grad_flow_sample(config, data);
  record.first_layer_grad_norm_init =
      initial_gradient_profile(mc, sample, labels, 1).front();

  TrainConfig tc = config.train;
  tc.seed = seed;
  auto result = train(build_model(mc), data.train, tc, data.table);
  record.test_accuracy = evaluate(result.model, data.test, data.table);
  record.report = std::move(result.report);
  return record;
}

std::vector<SweepRow> run_depth_sweep(const SweepConfig &config,
                                      const CellRunner &runner) {
  validate(config);
  ensure_dir(config.output_dir / "runs");
  std::mutex io;
  const auto records = run_cells(
      config.depths, config.repeats, config.workers,
      [&](std::size_t depth, std::size_t repeat) {
        RunRecord r = runner(depth, repeat);
        const std::string text = to_json(r).dump(2) + "\n";
        std::lock_guard lock(io);
        write_text(run_path(config.output_dir, depth, repeat), text);
        return r;
      });
  return finish_sweep(config, records);
}

std::vector<SweepRow> run_depth_sweep(const SweepConfig &config,
                                      const SweepData &data) {
  validate(config);
  if (data.test.empty()) {
    throw InputError("sweep test set is empty");
  }
  auto rows = run_depth_sweep(config, [&](std::size_t depth, std::size_t repeat) {
    return run_cell(config, data, depth, repeat);
  });
  write_grad_flow_csv(grad_flow_report(config, data),
                      config.output_dir / "grad_flow.csv");
  return rows;
}

std::vector<GradFlowEntry> grad_flow_report(const SweepConfig &config,
                                            const SweepData &data) {
  validate(config);
  const auto [sample, labels] = grad_flow_sample(config, data);
  std::vector<GradFlowEntry> entries;
  for (std::size_t depth : config.depths) {
    const ModelConfig mc = cell_model_config(config, data, depth, config.seed);
    const auto profile =
        initial_gradient_profile(mc, sample, labels, config.repeats);
    for (std::size_t l = 0; l < profile.size(); ++l) {
      entries.push_back({depth, l + 1, profile[l]});
    }
  }
  return entries;
}

void write_grad_flow_csv(const std::vector<GradFlowEntry> &entries,
                         const std::filesystem::path &path) {
  std::string text = "depth,layer_index,mean_norm\n";
  char buf[96];
  for (const auto &e : entries) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.9e\n", e.depth, e.layer_index,
                  e.mean_norm);
    text += buf;
  }
  write_text(path, text);
}

// ---------------------------------------------------------------------------
// sweep.csv

namespace {

constexpr const char *kSweepHeader =
    "depth,train_time_s,train_acc,val_acc,test_acc,diverged,grad_norm_l1";

std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

template <class T> T parse_field(const std::string &s, std::size_t line) {
  try {
    std::size_t used = 0;
    T value;
    if constexpr (std::is_floating_point_v<T>) {
      value = std::stod(s, &used);
    } else {
      if (!s.empty() && s[0] == '-') {
        throw std::invalid_argument("negative");
      }
      value = static_cast<T>(std::stoull(s, &used));
    }
    if (used != s.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return value;
  } catch (const std::exception &) {
    throw ParseError("bad CSV field '" + s + "'", line);
  }
}

} // namespace

std::string sweep_csv_string(const std::vector<SweepRow> &rows) {
  std::string text = std::string(kSweepHeader) + "\n";
  char buf[256];
  for (const auto &r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.1f,%.2f,%.2f,%.2f,%zu,%.6g\n", r.depth,
                  r.train_time_seconds, r.train_accuracy_pct,
                  r.validation_accuracy_pct, r.test_accuracy_pct,
                  r.diverged_runs, r.first_layer_grad_norm_init);
    text += buf;
  }
  return text;
}

void write_sweep_csv(const std::vector<SweepRow> &rows,
                     const std::filesystem::path &path) {
  if (rows.empty()) {
    throw InputError("write_sweep_csv needs at least one row");
  }
  write_text(path, sweep_csv_string(rows));
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) {
    throw ParseError("unexpected sweep CSV header", 1);
  }
  std::vector<SweepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 7) {
      throw ParseError("expected 7 fields", line_no);
    }
    SweepRow r;
    r.depth = parse_field<std::size_t>(f[0], line_no);
    r.train_time_seconds = parse_field<double>(f[1], line_no);
    r.train_accuracy_pct = parse_field<double>(f[2], line_no);
    r.validation_accuracy_pct = parse_field<double>(f[3], line_no);
    r.test_accuracy_pct = parse_field<double>(f[4], line_no);
    r.diverged_runs = parse_field<std::size_t>(f[5], line_no);
    r.first_layer_grad_norm_init = parse_field<double>(f[6], line_no);
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// SVG figures

namespace {

constexpr double kWidth = 640.0, kHeight = 400.0;
constexpr double kLeft = 80.0, kRight = 620.0, kTop = 50.0, kBottom = 330.0;

std::string fmt(const char *pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string xml_escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&':
      out += "&amp;";
      break;
    case '<':
      out += "&lt;";
      break;
    case '>':
      out += "&gt;";
      break;
    case '"':
      out += "&quot;";
      break;
    default:
      out += c;
    }
  }
  return out;
}

} // namespace

const std::vector<PlotSpec> &figure_specs() {
  static const std::vector<PlotSpec> specs{
      {"fig_time.svg", "Training Time vs Depth", "Training time (s)",
       &SweepRow::train_time_seconds},
      {"fig_train_acc.svg", "Training Accuracy vs Depth",
       "Training accuracy (%)", &SweepRow::train_accuracy_pct},
      {"fig_val_acc.svg", "Validation Accuracy vs Depth",
       "Validation accuracy (%)", &SweepRow::validation_accuracy_pct},
      {"fig_test_acc.svg", "Test Accuracy vs Depth", "Test accuracy (%)",
       &SweepRow::test_accuracy_pct},
  };
  return specs;
}

std::string render_plot_svg(const std::vector<SweepRow> &rows,
                            const PlotSpec &spec) {
  if (rows.size() < 2) {
    throw InputError("a plot needs at least two rows");
  }
  double x_lo = std::log10(static_cast<double>(rows.front().depth));
  double x_hi = x_lo;
  double y_min = rows.front().*spec.field;
  double y_max = y_min;
  for (const auto &r : rows) {
    const double lx = std::log10(static_cast<double>(r.depth));
    x_lo = std::min(x_lo, lx);
    x_hi = std::max(x_hi, lx);
    y_min = std::min(y_min, r.*spec.field);
    y_max = std::max(y_max, r.*spec.field);
  }
  if (x_hi == x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  double span = y_max - y_min;
  if (span == 0.0) {
    span = std::max(std::abs(y_max), 1.0) * 0.1;
  }
  const double y_lo = y_min - 0.05 * span;
  const double y_hi = y_max + 0.05 * span;

  auto px = [&](double depth) {
    return kLeft + (std::log10(depth) - x_lo) / (x_hi - x_lo) * (kRight - kLeft);
  };
  auto py = [&](double v) {
    return kBottom - (v - y_lo) / (y_hi - y_lo) * (kBottom - kTop);
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"28\" "
      << "text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << xml_escape(spec.title) << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
      << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";

  for (const auto &r : rows) {
    const std::string x = fmt("%.3f", px(static_cast<double>(r.depth)));
    svg << "<line x1=\"" << x << "\" y1=\"" << kBottom << "\" x2=\"" << x
        << "\" y2=\"" << kBottom + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << x << "\" y=\"" << kBottom + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << r.depth << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double v = y_lo + (y_hi - y_lo) * i / 4.0;
    const std::string y = fmt("%.3f", py(v));
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft
        << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << y
        << "\" text-anchor=\"end\" dominant-baseline=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"11\">"
        << fmt("%.4g", v) << "</text>\n";
  }
  svg << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 20
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">Number of hidden layers (log scale)</text>\n";
  svg << "<text x=\"20\" y=\"" << (kTop + kBottom) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 20 "
      << (kTop + kBottom) / 2 << ")\">" << xml_escape(spec.y_label)
      << "</text>\n";

  svg << "<g id=\"plot\" data-x-scale=\"log10\" data-x-domain=\""
      << fmt("%.17g", std::pow(10.0, x_lo)) << ' '
      << fmt("%.17g", std::pow(10.0, x_hi)) << "\" data-x-range=\"" << kLeft
      << ' ' << kRight << "\" data-y-scale=\"linear\" data-y-domain=\""
      << fmt("%.17g", y_lo) << ' ' << fmt("%.17g", y_hi) << "\" data-y-range=\""
      << kBottom << ' ' << kTop << "\">\n";
  svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" "
         "points=\"";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) {
      svg << ' ';
    }
    svg << fmt("%.3f", px(static_cast<double>(rows[i].depth))) << ','
        << fmt("%.3f", py(rows[i].*spec.field));
  }
  svg << "\"/>\n</g>\n</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path>
render_plots(const std::vector<SweepRow> &rows,
             const std::filesystem::path &output_dir) {
  if (rows.size() < 2) {
    throw InputError("render_plots needs at least two rows");
  }
  ensure_dir(output_dir);
  std::vector<std::filesystem::path> paths;
  for (const auto &spec : figure_specs()) {
    const auto path = output_dir / spec.file_name;
    write_text(path, render_plot_svg(rows, spec));
    paths.push_back(path);
  }
  return paths;
}

std::vector<SweepRow> report_from_runs(const std::filesystem::path &output_dir) {
  const auto runs_dir = output_dir / "runs";
  std::error_code ec;
  if (!std::filesystem::is_directory(runs_dir, ec)) {
    throw IoError("no runs directory under '" + output_dir.string() + "'");
  }
  std::vector<std::filesystem::path> files;
  for (const auto &entry : std::filesystem::directory_iterator(runs_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw InputError("no run records under '" + runs_dir.string() + "'");
  }
  std::vector<RunRecord> records;
  std::vector<std::size_t> depths;
  for (const auto &file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      throw IoError("cannot open '" + file.string() + "'");
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
      throw ParseError(file.string() + ": " + e.what());
    }
    records.push_back(run_record_from_json(j));
    depths.push_back(records.back().depth);
  }
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  std::sort(records.begin(), records.end(), [](const auto &a, const auto &b) {
    return std::pair(a.depth, a.repeat) < std::pair(b.depth, b.repeat);
  });

  auto rows = aggregate_rows(records, depths);
  write_sweep_csv(rows, output_dir / "sweep.csv");
  if (rows.size() >= 2) {
    render_plots(rows, output_dir);
  }
  return rows;
}

} // namespace depthsweep
