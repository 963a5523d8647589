// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Talks to the library only through depthsweep.h.

#include <depthsweep/depthsweep.h>

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  ApiError(dsw_status s, const std::string &what)
      : std::runtime_error(what), status(s) {}
  dsw_status status;
};

void check(dsw_status status) {
  if (status != DSW_OK) {
    throw ApiError(status, std::string(dsw_status_name(status)) + ": " +
                               dsw_last_error());
  }
}

template <class T, void (*Free)(T *)> struct Deleter {
  void operator()(T *p) const noexcept { Free(p); }
};
using Embeddings =
    std::unique_ptr<dsw_embeddings, Deleter<dsw_embeddings, dsw_embeddings_free>>;
using Dataset =
    std::unique_ptr<dsw_dataset, Deleter<dsw_dataset, dsw_dataset_free>>;
using Model = std::unique_ptr<dsw_model, Deleter<dsw_model, dsw_model_free>>;
using SweepResult =
    std::unique_ptr<dsw_sweep_result,
                    Deleter<dsw_sweep_result, dsw_sweep_result_free>>;

std::string format_value(const std::string &v) { return v; }
std::string format_value(bool v) { return v ? "true" : "false"; }
std::string format_value(std::size_t v) { return std::to_string(v); }
std::string format_value(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}
std::string format_value(const std::vector<std::size_t> &v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += (i ? "," : "") + std::to_string(v[i]);
  }
  return out;
}

/// A subcommand plus a record of every option it owns, so the resolved
/// values can be written back out as a flat key=value file.
class Command {
public:
  Command(CLI::App &parent, const std::string &name, const std::string &desc)
      : app_(parent.add_subcommand(name, desc)) {
    app_->add_option("--config", config_path_,
                     "Flat key=value file; explicit flags take precedence");
  }

  CLI::App *app() const { return app_; }
  const std::string &config_path() const { return config_path_; }

  template <class T>
  CLI::Option *option(const std::string &name, T &var, const std::string &desc) {
    auto *opt = app_->add_option("--" + name, var, desc)->capture_default_str();
    if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
      opt->delimiter(',');
    }
    entries_.push_back({name, [&var] { return format_value(var); }});
    return opt;
  }

  CLI::Option *flag(const std::string &name, bool &var, const std::string &desc) {
    entries_.push_back({name, [&var] { return format_value(var); }});
    return app_->add_flag("--" + name, var, desc);
  }

  /// Fills every option not given on the command line from the config file.
  void merge_config() {
    if (config_path_.empty()) {
      return;
    }
    std::ifstream in(config_path_);
    if (!in) {
      throw UsageError("cannot read config file '" + config_path_ + "'");
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) {
        line.erase(hash);
      }
      const std::string where =
          config_path_ + ":" + std::to_string(line_no) + ": ";
      if (trim(line).empty()) {
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw UsageError(where + "expected key=value");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      CLI::Option *opt = key == "config" || key == "help"
                             ? nullptr
                             : app_->get_option_no_throw("--" + key);
      if (!opt) {
        throw UsageError(where + "unknown key '" + key + "'");
      }
      if (opt->count() > 0) {
        continue;
      }
      try {
        if (opt->get_type_size_max() > 1) {
          std::vector<std::string> parts;
          std::stringstream ss(value);
          for (std::string part; std::getline(ss, part, ',');) {
            parts.push_back(trim(part));
          }
          opt->add_result(parts);
        } else {
          opt->add_result(value);
        }
        opt->run_callback();
      } catch (const CLI::Error &e) {
        throw UsageError(where + "bad value for '" + key + "': " + e.what());
      }
    }
  }

  std::string resolved() const {
    std::string out = "# depthsweep " + app_->get_name() + "\n";
    for (const auto &[name, get] : entries_) {
      out += name + "=" + get() + "\n";
    }
    return out;
  }

private:
  static std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
      return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  struct Entry {
    std::string name;
    std::function<std::string()> get;
  };
  CLI::App *app_;
  std::string config_path_;
  std::vector<Entry> entries_;
};

void write_file(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    throw ApiError(DSW_ERR_IO, "cannot write '" + path.string() + "'");
  }
}

void ensure_dir(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ApiError(DSW_ERR_IO,
                   "cannot create '" + dir.string() + "': " + ec.message());
  }
}

// ---- shared option groups

struct SynthOptions {
  bool synthetic = false;
  std::size_t n = 2000;
  std::size_t vocab = 200;
  std::size_t dim = 16;
  std::size_t synth_max_words = 12;
  double noise = 0.15;
  std::size_t test_count = 0;

  void add(Command &cmd, bool with_switch, bool with_max_words) {
    if (with_switch) {
      cmd.flag("synthetic", synthetic, "Generate a synthetic corpus");
    }
    if (with_max_words) {
      cmd.option("max-words", synth_max_words,
                 "Longest synthetic question in tokens");
    }
    cmd.option("n", n, "Synthetic corpus size (even)");
    cmd.option("vocab", vocab, "Synthetic vocabulary size");
    cmd.option("dim", dim, "Synthetic embedding dimension");
    cmd.option("noise", noise, "Synthetic label noise in [0, 1]");
    cmd.option("test-count", test_count,
               "Held-out test questions; 0 means n/6");
  }

  void resolve() {
    if (test_count == 0) {
      test_count = n / 6;
    }
  }
};

struct TrainOptions {
  std::size_t epochs = 0;
  std::size_t batch_size = 0;
  double lr = 0.0;
  double val_fraction = 0.0;
  bool cache_features = true;
  bool record_grad_norms = false;

  TrainOptions() {
    const dsw_train_config d = dsw_train_config_default();
    epochs = d.epochs;
    batch_size = d.batch_size;
    lr = d.learning_rate;
    val_fraction = d.validation_fraction;
  }

  void add(Command &cmd, bool with_grad_norms) {
    cmd.option("epochs", epochs, "Training epochs");
    cmd.option("batch-size", batch_size, "Mini-batch size");
    cmd.option("lr", lr, "SGD learning rate");
    cmd.option("val-fraction", val_fraction,
               "Fraction of training data held out for validation");
    cmd.option("cache-features", cache_features,
               "Featurize the training set once up front (true/false)");
    if (with_grad_norms) {
      cmd.option("record-grad-norms", record_grad_norms,
                 "Record per-layer gradient norms each epoch (true/false)");
    }
  }

  dsw_train_config to_c(std::size_t seed) const {
    dsw_train_config c = dsw_train_config_default();
    c.epochs = epochs;
    c.batch_size = batch_size;
    c.learning_rate = lr;
    c.validation_fraction = val_fraction;
    c.seed = seed;
    c.record_grad_norms = record_grad_norms ? 1 : 0;
    c.cache_features = cache_features ? 1 : 0;
    return c;
  }
};

struct ModelOptions {
  std::size_t width_max = 256;
  std::size_t width_min = 16;
  double dropout = 0.05;
  std::string init = "glorot";

  void add(Command &cmd) {
    cmd.option("width-max", width_max, "Widest hidden layer");
    cmd.option("width-min", width_min, "Narrowest hidden layer");
    cmd.option("dropout", dropout, "Dropout rate on hidden layers");
    cmd.option("init", init, "Weight init scheme")
        ->check(CLI::IsMember({"glorot", "he"}));
  }

  dsw_init init_c() const { return init == "he" ? DSW_INIT_HE : DSW_INIT_GLOROT; }
};

struct Corpus {
  Dataset train;
  Dataset test;
  Embeddings table;
};

Corpus synthesize(const SynthOptions &s, std::size_t seed) {
  dsw_synth_params p = dsw_synth_params_default();
  p.n = s.n;
  p.vocab_size = s.vocab;
  p.dim = s.dim;
  p.max_words = s.synth_max_words;
  p.noise = s.noise;
  p.seed = seed;
  dsw_dataset *all = nullptr;
  dsw_embeddings *table = nullptr;
  check(dsw_gen_synthetic(&p, &all, &table));
  Dataset all_owned(all);
  Corpus c;
  c.table.reset(table);
  dsw_dataset *rest = nullptr;
  dsw_dataset *held = nullptr;
  check(dsw_dataset_split(all_owned.get(), s.test_count, seed, &rest, &held));
  c.train.reset(rest);
  c.test.reset(held);
  return c;
}

Dataset load_dataset(const std::string &path) {
  dsw_dataset *d = nullptr;
  check(dsw_dataset_load(path.c_str(), &d));
  return Dataset(d);
}

Embeddings load_embeddings(const std::string &path) {
  dsw_embeddings *e = nullptr;
  check(dsw_embeddings_load(path.c_str(), 0, &e));
  return Embeddings(e);
}

void require(bool cond, const std::string &message) {
  if (!cond) {
    throw UsageError(message);
  }
}

void print_row(const dsw_sweep_row &r) {
  std::printf("%6zu %12.1f %9.2f %9.2f %9.2f %8zu %12.6g\n", r.depth,
              r.train_time_seconds, r.train_accuracy_pct,
              r.validation_accuracy_pct, r.test_accuracy_pct, r.diverged_runs,
              r.first_layer_grad_norm_init);
}

void print_rows(const dsw_sweep_result *result) {
  std::printf("%6s %12s %9s %9s %9s %8s %12s\n", "depth", "time", "train%",
              "val%", "test%", "diverged", "grad_l1");
  for (std::size_t i = 0; i < dsw_sweep_result_rows(result); ++i) {
    dsw_sweep_row row;
    check(dsw_sweep_result_row(result, i, &row));
    print_row(row);
  }
}

// ---- subcommands

struct GenSynth {
  Command cmd;
  SynthOptions synth;
  std::size_t seed = 0;
  std::string out;

  explicit GenSynth(CLI::App &app)
      : cmd(app, "gen-synth",
            "Generate a synthetic corpus split into train/test plus embeddings") {
    synth.add(cmd, false, true);
    cmd.option("seed", seed, "Root seed");
    cmd.option("out", out, "Output directory")->required();
  }

  void run() {
    synth.resolve();
    Corpus c = synthesize(synth, seed);
    ensure_dir(out);
    const fs::path dir(out);
    check(dsw_dataset_save(c.train.get(), (dir / "train.jsonl").c_str()));
    check(dsw_dataset_save(c.test.get(), (dir / "test.jsonl").c_str()));
    check(dsw_embeddings_save(c.table.get(), (dir / "embeddings.txt").c_str()));
    write_file(dir / "config.ini", cmd.resolved());
    std::printf("wrote %zu train and %zu test questions to %s\n",
                dsw_dataset_size(c.train.get()), dsw_dataset_size(c.test.get()),
                out.c_str());
  }
};

struct DataOptions {
  SynthOptions synth;
  std::string train_path;
  std::string test_path;
  std::string embeddings_path;
  std::size_t max_words = 0;

  void add(Command &cmd, bool with_test) {
    synth.add(cmd, true, false);
    cmd.option("train", train_path, "Training JSONL");
    if (with_test) {
      cmd.option("test", test_path, "Test JSONL");
    }
    cmd.option("embeddings", embeddings_path, "Embedding table (text format)");
    cmd.option("max-words", max_words,
               "Word slots per question; 0 means 12 for --synthetic and the "
               "longest question otherwise");
  }

  Corpus load(std::size_t seed, bool with_test) {
    Corpus c;
    if (synth.synthetic) {
      require(train_path.empty() && test_path.empty() && embeddings_path.empty(),
              "--synthetic cannot be combined with --train/--test/--embeddings");
      if (max_words == 0) {
        max_words = synth.synth_max_words;
      }
      synth.synth_max_words = max_words;
      synth.resolve();
      return synthesize(synth, seed);
    }
    require(!train_path.empty() && !embeddings_path.empty(),
            "need --synthetic or both --train and --embeddings");
    if (with_test) {
      require(!test_path.empty(), "need --test with --train");
    }
    c.table = load_embeddings(embeddings_path);
    c.train = load_dataset(train_path);
    if (with_test) {
      c.test = load_dataset(test_path);
    }
    if (max_words == 0) {
      max_words = dsw_dataset_max_tokens(c.train.get());
      if (c.test) {
        max_words = std::max(max_words, dsw_dataset_max_tokens(c.test.get()));
      }
      max_words = std::max<std::size_t>(max_words, 1);
    }
    return c;
  }
};

struct Train {
  Command cmd;
  DataOptions data;
  TrainOptions training;
  ModelOptions model;
  std::size_t depth = 10;
  std::size_t seed = 0;
  std::string out;

  explicit Train(CLI::App &app)
      : cmd(app, "train", "Train one model and save a checkpoint") {
    data.add(cmd, false);
    training.add(cmd, true);
    model.add(cmd);
    cmd.option("depth", depth, "Number of hidden layers");
    cmd.option("seed", seed, "Root seed");
    cmd.option("out", out, "Output directory")->required();
  }

  void run() {
    Corpus c = data.load(seed, false);
    std::vector<std::size_t> widths(depth);
    check(dsw_taper_widths(depth, model.width_max, model.width_min,
                           widths.data(), widths.size()));
    dsw_model *m = nullptr;
    check(dsw_model_build(data.max_words, dsw_embeddings_dim(c.table.get()),
                          widths.data(), widths.size(), model.dropout,
                          model.init_c(), seed, &m));
    Model owned(m);
    ensure_dir(out);
    const fs::path dir(out);
    write_file(dir / "config.ini", cmd.resolved());
    const dsw_train_config tc = training.to_c(seed);
    dsw_train_summary summary{};
    check(dsw_model_train(owned.get(), c.train.get(), c.table.get(), &tc,
                          (dir / "train_report.json").c_str(), &summary));
    check(dsw_model_save(owned.get(), (dir / "model.ckpt").c_str()));
    std::printf("epochs=%zu train_acc=%.2f val_acc=%.2f final_loss=%.6g "
                "time_s=%.1f%s\n",
                summary.epochs_completed, summary.final_train_accuracy,
                summary.final_validation_accuracy, summary.final_loss,
                summary.wall_time_seconds, summary.diverged ? " diverged" : "");
    if (c.test) {
      double acc = 0.0;
      check(dsw_model_evaluate(owned.get(), c.test.get(), c.table.get(), &acc));
      std::printf("test_acc=%.2f\n", acc);
    }
  }
};

struct Evaluate {
  Command cmd;
  SynthOptions synth;
  std::string model_path;
  std::string data_path;
  std::string embeddings_path;
  std::size_t seed = 0;

  explicit Evaluate(CLI::App &app)
      : cmd(app, "evaluate", "Report a checkpoint's accuracy on a dataset") {
    cmd.option("model", model_path, "Checkpoint file")->required();
    cmd.option("data", data_path, "JSONL to evaluate on");
    cmd.option("embeddings", embeddings_path, "Embedding table (text format)");
    synth.add(cmd, true, true);
    cmd.option("seed", seed, "Root seed for --synthetic");
  }

  void run() {
    dsw_model *m = nullptr;
    check(dsw_model_load(model_path.c_str(), &m));
    Model model(m);
    Corpus c;
    if (synth.synthetic) {
      require(data_path.empty() && embeddings_path.empty(),
              "--synthetic cannot be combined with --data/--embeddings");
      synth.resolve();
      c = synthesize(synth, seed);
    } else {
      require(!data_path.empty() && !embeddings_path.empty(),
              "need --synthetic or both --data and --embeddings");
      c.table = load_embeddings(embeddings_path);
      c.test = load_dataset(data_path);
    }
    double acc = 0.0;
    check(dsw_model_evaluate(model.get(), c.test.get(), c.table.get(), &acc));
    std::printf("accuracy=%.2f questions=%zu\n", acc,
                dsw_dataset_size(c.test.get()));
  }
};

struct Sweep {
  Command cmd;
  DataOptions data;
  TrainOptions training;
  ModelOptions model;
  std::vector<std::size_t> depths;
  std::size_t repeats = 0;
  std::size_t seed = 0;
  std::size_t workers = 1;
  std::string clock = "wall";
  std::size_t grad_flow_samples = 0;
  std::string out;

  explicit Sweep(CLI::App &app)
      : cmd(app, "sweep", "Run the depth sweep and write CSV, plots and run logs") {
    const dsw_sweep_config d = dsw_sweep_config_default();
    depths.assign(d.depths, d.depths + d.n_depths);
    repeats = d.repeats;
    grad_flow_samples = d.grad_flow_samples;
    data.add(cmd, true);
    training.add(cmd, false);
    model.add(cmd);
    cmd.option("depths", depths, "Comma-separated hidden-layer counts");
    cmd.option("repeats", repeats, "Runs per depth");
    cmd.option("seed", seed, "Root seed");
    cmd.option("workers", workers, "Concurrent runs");
    cmd.option("clock", clock, "Time column source")
        ->check(CLI::IsMember({"wall", "flops"}));
    cmd.option("grad-flow-samples", grad_flow_samples,
               "Training examples used for the initial gradient profile");
    cmd.option("out", out, "Output directory")->required();
  }

  void run() {
    if (workers > 1 && clock == "wall") {
      std::fprintf(stderr, "warning: --workers %zu with --clock wall makes the "
                           "timing column contend for cores\n",
                   workers);
    }
    Corpus c = data.load(seed, true);
    dsw_sweep_config sc = dsw_sweep_config_default();
    sc.depths = depths.data();
    sc.n_depths = depths.size();
    sc.repeats = repeats;
    sc.train = training.to_c(seed);
    sc.width_max = model.width_max;
    sc.width_min = model.width_min;
    sc.dropout_rate = model.dropout;
    sc.init = model.init_c();
    sc.seed = seed;
    sc.workers = workers;
    sc.clock = clock == "flops" ? DSW_CLOCK_FLOPS : DSW_CLOCK_WALL;
    sc.grad_flow_samples = grad_flow_samples;
    sc.output_dir = out.c_str();
    ensure_dir(out);
    write_file(fs::path(out) / "config.ini", cmd.resolved());
    dsw_sweep_result *r = nullptr;
    check(dsw_sweep_run(&sc, c.train.get(), c.test.get(), c.table.get(),
                        data.max_words, &r));
    SweepResult result(r);
    print_rows(result.get());
  }
};

struct Report {
  Command cmd;
  std::string out;

  explicit Report(CLI::App &app)
      : cmd(app, "report", "Rebuild sweep.csv and plots from saved run logs") {
    cmd.option("out", out, "Sweep output directory holding runs/")->required();
  }

  void run() {
    dsw_sweep_result *r = nullptr;
    check(dsw_report_from_runs(out.c_str(), &r));
    SweepResult result(r);
    print_rows(result.get());
  }
};

const char *kFooter =
    "Precedence: explicit flags, then values from --config, then built-in "
    "defaults.\nExit codes: 0 success, 1 usage error, 2 runtime error.";

} // namespace

int main(int argc, char **argv) {
  CLI::App app("Depth sweep experiments for MLP question-deletion classifiers",
               "depthsweep");
  app.footer(kFooter);
  app.set_version_flag("--version", dsw_version());
  app.require_subcommand(1);

  GenSynth gen(app);
  Train train(app);
  Evaluate evaluate(app);
  Sweep sweep(app);
  Report report(app);

  if (argc <= 1) {
    std::cerr << app.help();
    return kExitUsage;
  }

  Command *chosen = nullptr;
  std::function<void()> action;
  try {
    app.parse(argc, argv);
    for (auto [cmd, fn] :
         {std::pair<Command *, std::function<void()>>{&gen.cmd, [&] { gen.run(); }},
          {&train.cmd, [&] { train.run(); }},
          {&evaluate.cmd, [&] { evaluate.run(); }},
          {&sweep.cmd, [&] { sweep.run(); }},
          {&report.cmd, [&] { report.run(); }}}) {
      if (cmd->app()->parsed()) {
        chosen = cmd;
        action = fn;
      }
    }
    chosen->merge_config();
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: " << e.what() << "\n\n"
              << (chosen ? chosen->app()->help() : app.help());
    return kExitUsage;
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << "\n\n" << chosen->app()->help();
    return kExitUsage;
  }

  try {
    action();
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << "\n\n" << chosen->app()->help();
    return kExitUsage;
  } catch (const ApiError &e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.status == DSW_ERR_CONFIG || e.status == DSW_ERR_INVALID_ARGUMENT) {
      std::cerr << "\n" << chosen->app()->help();
      return kExitUsage;
    }
    return kExitRuntime;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
