// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "depthsweep/data.hpp"
#include "depthsweep/features.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace depthsweep;
using testing_support::TempDir;
using testing_support::write_file;

namespace {

const std::filesystem::path kFixtures = DEPTHSWEEP_FIXTURE_DIR;

Dataset with_counts(std::size_t deleted, std::size_t kept) {
  Dataset d;
  for (std::size_t i = 0; i < deleted + kept; ++i) {
    d.questions.push_back(make_question("q" + std::to_string(i), "x", 0.0,
                                        i < deleted ? kLabelDeleted : kLabelKept));
  }
  return d;
}

} // namespace

TEST(MakeQuestion, ClampsAnnotationAndChecksLabel) {
  bool clamped = false;
  const Question q = make_question("a", "Hi there", 1.7, 1, &clamped);
  EXPECT_TRUE(clamped);
  EXPECT_EQ(q.weak_annotation, 1.0);
  EXPECT_EQ(q.tokens, (std::vector<std::string>{"hi", "there"}));
  make_question("b", "", 0.3, 0, &clamped);
  EXPECT_FALSE(clamped);
  EXPECT_THROW(make_question("c", "", 0.0, 2), ValidationError);
}

TEST(LoadDataset, AppendixExampleIsDeleted) {
  const Dataset d = load_dataset(kFixtures / "two_questions.jsonl");
  ASSERT_EQ(d.size(), 2u);
  const Question &q = d.questions[0];
  EXPECT_EQ(q.id, "q1");
  EXPECT_EQ(q.label, kLabelDeleted);
  EXPECT_EQ(q.weak_annotation, 0.9);
  EXPECT_EQ(q.tokens, (std::vector<std::string>{"hello", "emo", "family", "3", "wassup"}));
  EXPECT_EQ(d.questions[1].label, kLabelKept);
}

TEST(LoadDataset, EmptyFileIsEmptyDataset) {
  TempDir dir;
  write_file(dir / "e.jsonl", "");
  EXPECT_TRUE(load_dataset(dir / "e.jsonl").empty());
}

TEST(LoadDataset, MissingLabelIsParseErrorAtLine) {
  TempDir dir;
  write_file(dir / "m.jsonl", "{\"id\":\"a\",\"text\":\"t\",\"label\":0}\n"
                              "{\"id\":\"b\",\"text\":\"t\"}\n");
  try {
    load_dataset(dir / "m.jsonl");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadDataset, OtherMalformedInput) {
  TempDir dir;
  write_file(dir / "a.jsonl", "{not json\n");
  EXPECT_THROW(load_dataset(dir / "a.jsonl"), ParseError);
  write_file(dir / "b.jsonl", "{\"id\":1,\"text\":\"t\",\"label\":0}\n");
  EXPECT_THROW(load_dataset(dir / "b.jsonl"), ParseError);
  write_file(dir / "c.jsonl", "{\"id\":\"a\",\"text\":\"t\",\"label\":3}\n");
  EXPECT_THROW(load_dataset(dir / "c.jsonl"), ValidationError);
  write_file(dir / "d.jsonl", "{\"id\":\"a\",\"text\":\"t\",\"label\":0}\n"
                              "{\"id\":\"a\",\"text\":\"u\",\"label\":1}\n");
  EXPECT_THROW(load_dataset(dir / "d.jsonl"), ValidationError);
  EXPECT_THROW(load_dataset(dir / "missing.jsonl"), IoError);
}

TEST(LoadDataset, DefaultsAndClampWarning) {
  TempDir dir;
  write_file(dir / "w.jsonl", "{\"id\":\"a\",\"text\":\"t\",\"label\":0}\n"
                              "{\"id\":\"b\",\"text\":\"t\",\"weak_annotation\":-2,\"label\":1}\n");
  std::vector<std::string> warnings;
  const Dataset d = load_dataset(dir / "w.jsonl", &warnings);
  EXPECT_EQ(d.questions[0].weak_annotation, 0.0);
  EXPECT_EQ(d.questions[1].weak_annotation, 0.0);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("line 2"), std::string::npos);
}

TEST(SaveDataset, KeyOrderAndRoundTrip) {
  TempDir dir;
  Dataset d;
  d.questions.push_back(make_question("x", "Text, with \"quotes\"\nand newline", 0.25, 1));
  save_dataset(d, dir / "o.jsonl");
  const std::string text = testing_support::read_file(dir / "o.jsonl");
  EXPECT_LT(text.find("\"id\""), text.find("\"text\""));
  EXPECT_LT(text.find("\"text\""), text.find("\"weak_annotation\""));
  EXPECT_LT(text.find("\"weak_annotation\""), text.find("\"label\""));
  EXPECT_EQ(load_dataset(dir / "o.jsonl").questions, d.questions);
}

TEST(CheckBalance, Cases) {
  Balance b = check_balance(with_counts(3000, 3000));
  EXPECT_TRUE(b.balanced);
  EXPECT_EQ(b.deleted, 3000u);
  b = check_balance(Dataset{});
  EXPECT_TRUE(b.balanced);
  EXPECT_EQ(b.deleted + b.kept, 0u);
  b = check_balance(with_counts(10, 7));
  EXPECT_FALSE(b.balanced);
  EXPECT_EQ(b.kept, 7u);
}

TEST(SplitHoldout, StratifiedAndSeeded) {
  const Dataset all = with_counts(3000, 3000);
  const auto [train, test] = split_holdout(all, 1000, 5);
  EXPECT_EQ(train.size(), 5000u);
  EXPECT_EQ(test.size(), 1000u);
  EXPECT_TRUE(check_balance(train).balanced);
  EXPECT_TRUE(check_balance(test).balanced);
  const auto again = split_holdout(all, 1000, 5);
  EXPECT_EQ(again.second, test);
  EXPECT_NE(split_holdout(all, 1000, 6).second, test);
  std::set<std::string> ids;
  for (const auto &q : train.questions) {
    ids.insert(q.id);
  }
  for (const auto &q : test.questions) {
    EXPECT_EQ(ids.count(q.id), 0u);
  }
}

TEST(GenSynthetic, BalancedDeterministicAndClosedVocabulary) {
  SyntheticParams p;
  p.seed = 3;
  const auto a = gen_synthetic(p);
  const auto b = gen_synthetic(p);
  EXPECT_EQ(a.dataset, b.dataset);
  EXPECT_EQ(a.table, b.table);
  EXPECT_EQ(a.dataset.size(), 2000u);
  const Balance bal = check_balance(a.dataset);
  EXPECT_EQ(bal.deleted, 1000u);
  EXPECT_EQ(bal.kept, 1000u);
  EXPECT_EQ(a.table.size(), p.vocab_size);
  EXPECT_EQ(a.table.dim(), p.dim);
  for (const auto &word : a.table.words()) {
    double norm = 0.0;
    for (double v : a.table.lookup(word)) {
      norm += v * v;
    }
    EXPECT_NEAR(norm, 1.0, 1e-12);
  }
  std::set<std::string> ids;
  for (const auto &q : a.dataset.questions) {
    EXPECT_TRUE(ids.insert(q.id).second);
    EXPECT_GE(q.tokens.size(), 1u);
    EXPECT_LE(q.tokens.size(), p.max_words);
    EXPECT_GE(q.weak_annotation, 0.0);
    EXPECT_LE(q.weak_annotation, 1.0);
    for (const auto &t : q.tokens) {
      EXPECT_TRUE(a.table.contains(t)) << t;
    }
  }
  p.seed = 4;
  EXPECT_NE(gen_synthetic(p).dataset, a.dataset);
}

TEST(GenSynthetic, BalancedForManySizes) {
  for (std::size_t n : {2u, 10u, 64u, 250u}) {
    SyntheticParams p;
    p.n = n;
    p.seed = n;
    const Balance b = check_balance(gen_synthetic(p).dataset);
    EXPECT_EQ(b.deleted, n / 2);
    EXPECT_EQ(b.kept, n / 2);
  }
}

TEST(GenSynthetic, NoiseFreeClassesUseDisjointVocabulary) {
  SyntheticParams p;
  p.noise = 0.0;
  p.n = 400;
  const auto c = gen_synthetic(p);
  std::set<std::string> deleted_words;
  std::set<std::string> kept_words;
  for (const auto &q : c.dataset.questions) {
    auto &bucket = q.label == kLabelDeleted ? deleted_words : kept_words;
    bucket.insert(q.tokens.begin(), q.tokens.end());
    EXPECT_EQ(q.weak_annotation, static_cast<double>(q.label));
  }
  for (const auto &w : deleted_words) {
    EXPECT_EQ(kept_words.count(w), 0u) << w;
  }
  // One-token rule: the first token alone decides the class.
  std::size_t correct = 0;
  for (const auto &q : c.dataset.questions) {
    correct += (deleted_words.count(q.tokens[0]) ? kLabelDeleted : kLabelKept) == q.label;
  }
  EXPECT_EQ(correct, c.dataset.size());
}

TEST(GenSynthetic, RejectsBadParameters) {
  SyntheticParams p;
  p.n = 11;
  EXPECT_THROW(gen_synthetic(p), ConfigError);
  p = SyntheticParams{};
  p.vocab_size = 1;
  EXPECT_THROW(gen_synthetic(p), ConfigError);
  p = SyntheticParams{};
  p.noise = 1.5;
  EXPECT_THROW(gen_synthetic(p), ConfigError);
}

TEST(GenSynthetic, SaveLoadRoundTrip) {
  TempDir dir;
  SyntheticParams p;
  p.n = 300;
  const auto c = gen_synthetic(p);
  save_dataset(c.dataset, dir / "s.jsonl");
  save_embeddings(c.table, dir / "e.txt");
  EXPECT_EQ(load_dataset(dir / "s.jsonl").questions, c.dataset.questions);
  EXPECT_EQ(load_embeddings(dir / "e.txt", p.dim), c.table);
}

namespace {

// Token-vote classifier fitted on the first half, scored on the second.
double token_vote_accuracy(const Dataset &d) {
  std::map<std::string, long> score;
  const std::size_t half = d.size() / 2;
  for (std::size_t i = 0; i < half; ++i) {
    for (const auto &t : d.questions[i].tokens) {
      score[t] += d.questions[i].label == kLabelDeleted ? 1 : -1;
    }
  }
  std::size_t correct = 0;
  for (std::size_t i = half; i < d.size(); ++i) {
    long s = 0;
    for (const auto &t : d.questions[i].tokens) {
      const auto it = score.find(t);
      s += it == score.end() ? 0 : (it->second > 0) - (it->second < 0);
    }
    s += d.questions[i].weak_annotation >= 0.5 ? 1 : -1;
    correct += (s >= 0 ? kLabelDeleted : kLabelKept) == d.questions[i].label;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(d.size() - half);
}

} // namespace

TEST(GenSynthetic, HalfNoiseIsUninformative) {
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SyntheticParams p;
    p.noise = 0.5;
    p.seed = seed;
    total += token_vote_accuracy(gen_synthetic(p).dataset);
  }
  EXPECT_NEAR(total / 5.0, 50.0, 3.0);

  SyntheticParams clean;
  clean.noise = 0.0;
  EXPECT_GT(token_vote_accuracy(gen_synthetic(clean).dataset), 99.0);
}
