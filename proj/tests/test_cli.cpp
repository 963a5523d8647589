// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <string>

using testing_support::read_file;
using testing_support::TempDir;

namespace {

struct Result {
  int code = -1;
  std::string output;
};

Result run(const TempDir &dir, const std::string &args) {
  const auto log = dir / "cli.log";
  const std::string cmd = std::string("'") + DEPTHSWEEP_CLI + "' " + args + " > '" +
                          log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = read_file(log);
  return r;
}

std::string quoted(const std::filesystem::path &p) { return "'" + p.string() + "'"; }

} // namespace

TEST(Cli, NoArgumentsPrintsUsageAndFails) {
  TempDir dir;
  const auto r = run(dir, "");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("sweep"), std::string::npos);
  EXPECT_EQ(run(dir, "--help").code, 0);
}

TEST(Cli, UsageErrorsExitOne) {
  TempDir dir;
  EXPECT_EQ(run(dir, "train --bogus 3 --out " + quoted(dir.path())).code, 1);
  EXPECT_EQ(run(dir, "frobnicate").code, 1);
  EXPECT_EQ(run(dir, "sweep --synthetic --depths 3,1 --out " + quoted(dir / "s")).code, 1);
  testing_support::write_file(dir / "bad.ini", "epochs = 3\nwizard = 1\n");
  const auto r = run(dir, "train --synthetic --config " + quoted(dir / "bad.ini") +
                              " --out " + quoted(dir / "t"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("wizard"), std::string::npos);
}

TEST(Cli, RuntimeErrorsExitTwo) {
  TempDir dir;
  const auto r = run(dir, "evaluate --synthetic --model " + quoted(dir / "missing.ckpt"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("missing.ckpt"), std::string::npos);
  EXPECT_EQ(run(dir, "report --out " + quoted(dir.path())).code, 2);
}

TEST(Cli, TrainPersistsResolvedConfigAndEvaluates) {
  TempDir dir;
  const auto out = dir / "train";
  const auto r = run(dir, "train --synthetic --n 400 --depth 2 --epochs 150 "
                          "--val-fraction 0.10 --seed 5 --out " + quoted(out));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("test_acc="), std::string::npos);
  const std::string ini = read_file(out / "config.ini");
  for (const char *line : {"epochs=150\n", "val-fraction=0.1\n", "batch-size=32\n",
                           "lr=0.01\n", "depth=2\n", "seed=5\n", "dropout=0.05\n",
                           "init=glorot\n"}) {
    EXPECT_NE(ini.find(line), std::string::npos) << line << " in\n" << ini;
  }
  EXPECT_TRUE(std::filesystem::exists(out / "model.ckpt"));
  EXPECT_TRUE(std::filesystem::exists(out / "train_report.json"));

  const auto again = dir / "again";
  const auto r2 = run(dir, "train --config " + quoted(out / "config.ini") + " --out " +
                               quoted(again));
  ASSERT_EQ(r2.code, 0) << r2.output;
  EXPECT_FALSE(read_file(again / "train_report.json").empty());
  EXPECT_EQ(read_file(again / "model.ckpt"), read_file(out / "model.ckpt"));

  const auto ev = run(dir, "evaluate --synthetic --n 400 --seed 5 --model " +
                               quoted(out / "model.ckpt"));
  ASSERT_EQ(ev.code, 0) << ev.output;
  EXPECT_NE(ev.output.find("accuracy="), std::string::npos);
}

TEST(Cli, CommandLineOverridesConfig) {
  TempDir dir;
  testing_support::write_file(dir / "c.ini", "# comment\nepochs = 4\nlr = 0.02\n");
  const auto out = dir / "t";
  ASSERT_EQ(run(dir, "train --synthetic --n 200 --depth 1 --config " +
                         quoted(dir / "c.ini") + " --epochs 2 --out " + quoted(out))
                .code,
            0);
  const std::string ini = read_file(out / "config.ini");
  EXPECT_NE(ini.find("epochs=2\n"), std::string::npos);
  EXPECT_NE(ini.find("lr=0.02\n"), std::string::npos);
}

TEST(Cli, GenSynthThenTrainFromFiles) {
  TempDir dir;
  const auto data = dir / "data";
  ASSERT_EQ(run(dir, "gen-synth --n 300 --seed 2 --out " + quoted(data)).code, 0);
  for (const char *f : {"train.jsonl", "test.jsonl", "embeddings.txt", "config.ini"}) {
    EXPECT_TRUE(std::filesystem::exists(data / f)) << f;
  }
  const auto out = dir / "model";
  const auto r = run(dir, "train --train " + quoted(data / "train.jsonl") +
                              " --embeddings " + quoted(data / "embeddings.txt") +
                              " --depth 1 --epochs 3 --out " + quoted(out));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto ev = run(dir, "evaluate --model " + quoted(out / "model.ckpt") + " --data " +
                               quoted(data / "test.jsonl") + " --embeddings " +
                               quoted(data / "embeddings.txt"));
  ASSERT_EQ(ev.code, 0) << ev.output;
  EXPECT_NE(ev.output.find("questions=50"), std::string::npos) << ev.output;
}

TEST(Cli, SweepWritesFixedOutputsAndReportRegenerates) {
  TempDir dir;
  const auto out = dir / "sweep";
  const auto r = run(dir, "sweep --synthetic --n 240 --depths 1,2,3 --repeats 1 "
                          "--epochs 2 --clock flops --out " + quoted(out));
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char *f : {"sweep.csv", "grad_flow.csv", "config.ini", "fig_time.svg",
                        "fig_train_acc.svg", "fig_val_acc.svg", "fig_test_acc.svg",
                        "runs/1_0.json", "runs/3_0.json"}) {
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  }
  const std::string csv = read_file(out / "sweep.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "depth,train_time_s,train_acc,val_acc,test_acc,diverged,grad_norm_l1");
  EXPECT_EQ(testing_support::count_occurrences(csv, "\n"), 4u);
  std::filesystem::remove(out / "sweep.csv");
  std::filesystem::remove(out / "fig_val_acc.svg");
  ASSERT_EQ(run(dir, "report --out " + quoted(out)).code, 0);
  EXPECT_EQ(read_file(out / "sweep.csv"), csv);
  EXPECT_TRUE(std::filesystem::exists(out / "fig_val_acc.svg"));
}
