// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

// Runs every acceptance criterion and prints one PASS/FAIL line each.

#include "depthsweep/experiment.hpp"
#include "gradcheck.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace depthsweep;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool ok, const std::string &name, const std::string &detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void gradient_correctness() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t params = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = testing_support::gradient_check(1000 + seed);
    worst = std::max(worst, r.max_relative_error);
    params += r.parameters;
  }
  const double secs = seconds_since(t0);
  report(worst < 1e-4 && secs < 30.0, "gradient_correctness",
         fmt("20 configs, %zu parameters, max rel err %.3g (< 1e-4), %.2f s (< 30 s)",
             params, worst, secs));
}

void loss_baseline() {
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SyntheticParams p;
    p.seed = seed;
    const auto corpus = gen_synthetic(p);
    ModelConfig mc;
    mc.input_dim = feature_dim(p.max_words, p.dim);
    mc.hidden_widths = taper_widths(3);
    mc.seed = seed;
    const MlpModel model = build_model(mc);
    const FeatureSource src(corpus.dataset, corpus.table, p.max_words, true);
    std::vector<std::size_t> all(src.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
      all[i] = i;
    }
    sum += bce_loss(predict(model, src.batch(all)), src.labels(all));
  }
  const double mean = sum / 10.0;
  const double ln2 = std::numbers::ln2;
  report(std::abs(mean - ln2) <= 0.05, "loss_baseline",
         fmt("mean untrained bce over 10 seeds %.4f, |diff from ln 2| %.4f (<= 0.05)", mean,
             std::abs(mean - ln2)));
}

void featurizer_dimension() {
  bool ok = feature_dim(240, 300) == 72001;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> dims(1, 512);
  std::uniform_int_distribution<std::size_t> words(1, 400);
  std::size_t checked = 0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t d = dims(rng);
    const std::size_t w = words(rng);
    ok = ok && feature_dim(w, d) == w * d + 1;
    checked += feature_dim(w, d) == w * d + 1 ? 1 : 0;
  }
  EmbeddingTable table(300);
  const std::vector<double> vec(300, 0.5);
  table.insert("a", vec);
  const Question q = make_question("q", "a a a", 0.3, 0);
  const std::size_t built = featurize(q, table, 240).size();
  ok = ok && built == 72001;
  report(ok, "featurizer_dimension",
         fmt("dim 300 x 240 words -> %zu features (72001), %zu/50 random pairs match", built,
             checked));
}

SweepData trend_data(std::uint64_t seed) {
  SyntheticParams p;
  p.n = 2000;
  p.vocab_size = 200;
  p.dim = 16;
  p.max_words = 12;
  p.noise = 0.15;
  p.seed = seed;
  auto corpus = gen_synthetic(p);
  auto [train, test] = split_holdout(corpus.dataset, 400, seed);
  return {std::move(train), std::move(test), std::move(corpus.table), p.max_words};
}

SweepConfig trend_config(const std::filesystem::path &out) {
  SweepConfig c;
  c.depths = {1, 3, 5, 10, 50};
  c.repeats = 3;
  c.train.epochs = 50;
  c.output_dir = out;
  return c;
}

void trend(const SweepData &data) {
  testing_support::TempDir dir;
  const auto t0 = Clock::now();
  const auto rows = run_depth_sweep(trend_config(dir.path()), data);
  const double secs = seconds_since(t0);
  for (const auto &r : rows) {
    std::printf("  depth %3zu: time %.2f s, train %.2f, val %.2f, test %.2f, diverged %zu\n",
                r.depth, r.train_time_seconds, r.train_accuracy_pct,
                r.validation_accuracy_pct, r.test_accuracy_pct, r.diverged_runs);
  }
  const double best_mid = std::max({rows[1].test_accuracy_pct, rows[2].test_accuracy_pct,
                                    rows[3].test_accuracy_pct});
  const double gap = best_mid - rows[0].test_accuracy_pct;
  report(gap >= 3.0, "trend_depth_advantage",
         fmt("best of depths 3/5/10 %.2f vs depth 1 %.2f, gap %.2f points (>= 3)", best_mid,
             rows[0].test_accuracy_pct, gap));
  const double deep = rows[4].test_accuracy_pct;
  report(deep >= 45.0 && deep <= 55.0, "trend_deep_chance",
         fmt("depth 50 test accuracy %.2f (in [45, 55])", deep));
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    monotone = monotone && rows[i].train_time_seconds >= 0.95 * rows[i - 1].train_time_seconds;
  }
  report(monotone, "trend_time_monotone",
         fmt("wall times %.2f %.2f %.2f %.2f %.2f s non-decreasing within 5%%",
             rows[0].train_time_seconds, rows[1].train_time_seconds,
             rows[2].train_time_seconds, rows[3].train_time_seconds,
             rows[4].train_time_seconds));
  report(secs < 900.0, "trend_runtime", fmt("sweep took %.1f s (< 900 s)", secs));
}

void vanishing_gradients(const SweepData &data) {
  testing_support::TempDir dir;
  std::size_t holds = 0;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SweepConfig c = trend_config(dir.path());
    c.depths = {5, 50};
    c.seed = seed;
    double n5 = 0.0;
    double n50 = 0.0;
    for (const auto &e : grad_flow_report(c, data)) {
      if (e.layer_index == 1) {
        (e.depth == 5 ? n5 : n50) = e.mean_norm;
      }
    }
    holds += n50 < n5 ? 1 : 0;
    detail += fmt(" seed %llu: %.3e < %.3e;", static_cast<unsigned long long>(seed), n50, n5);
  }
  report(holds == 5, "vanishing_gradients",
         fmt("first-layer init grad norm depth 50 < depth 5 in %zu/5 seeds.", holds) + detail);
}

void determinism(const SweepData &data) {
  testing_support::TempDir a;
  testing_support::TempDir b;
  SweepConfig ca = trend_config(a.path());
  ca.clock = TimeSource::flops;
  SweepConfig cb = ca;
  cb.output_dir = b.path();
  run_depth_sweep(ca, data);
  run_depth_sweep(cb, data);
  std::size_t same = 0;
  const char *files[] = {"sweep.csv",         "grad_flow.csv",   "fig_time.svg",
                         "fig_train_acc.svg", "fig_val_acc.svg", "fig_test_acc.svg"};
  for (const char *f : files) {
    same += testing_support::read_file(a / f) == testing_support::read_file(b / f) ? 1 : 0;
  }
  report(same == 6, "determinism",
         fmt("%zu/6 artifacts byte-identical across two same-seed sweeps (flops clock)", same));
}

void report_fidelity() {
  testing_support::TempDir dir;
  const auto fixture = std::filesystem::path(DEPTHSWEEP_FIXTURE_DIR) / "reference_sweep.csv";
  const auto rows = read_sweep_csv(fixture);
  write_sweep_csv(rows, dir / "sweep.csv");
  const bool csv_exact = rows.size() == 8 && testing_support::read_file(dir / "sweep.csv") ==
                                                 testing_support::read_file(fixture);
  const auto paths = render_plots(rows, dir.path());
  double worst = 0.0;
  bool shape_ok = paths.size() == 4;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto points = testing_support::recover_points(testing_support::read_file(paths[i]));
    shape_ok = shape_ok && points.size() == rows.size();
    for (std::size_t k = 0; k < std::min(points.size(), rows.size()); ++k) {
      const double x = static_cast<double>(rows[k].depth);
      const double y = rows[k].*figure_specs()[i].field;
      worst = std::max({worst, std::abs(points[k].first - x) / x,
                        std::abs(points[k].second - y) / std::abs(y)});
    }
  }
  report(csv_exact && shape_ok && worst <= 0.005, "report_fidelity",
         fmt("csv %s, 4 figures x 8 points, max recovered rel err %.2e (<= 5e-3)",
             csv_exact ? "byte-exact" : "differs", worst));
}

} // namespace

int main() {
  const auto t0 = Clock::now();
  gradient_correctness();
  loss_baseline();
  featurizer_dimension();
  report_fidelity();
  const SweepData data = trend_data(0);
  trend(data);
  vanishing_gradients(data);
  determinism(data);
  std::printf("%d criteria failed, total %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
