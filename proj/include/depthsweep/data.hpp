// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DEPTHSWEEP_DATA_HPP
#define DEPTHSWEEP_DATA_HPP

#include "depthsweep/error.hpp"
#include "depthsweep/features.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace depthsweep {

inline constexpr int kLabelKept = 0;
inline constexpr int kLabelDeleted = 1;

struct Question {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
  double weak_annotation = 0.0;
  int label = kLabelKept;

  bool operator==(const Question &) const = default;
};

/// Tokenizes `text`. A weak annotation outside [0, 1] is clamped and, when
/// `clamped` is given, reported through it.
Question make_question(std::string id, std::string text, double weak_annotation,
                       int label, bool *clamped = nullptr);

struct Dataset {
  std::string name;
  std::vector<Question> questions;

  std::size_t size() const noexcept { return questions.size(); }
  bool empty() const noexcept { return questions.empty(); }
  bool operator==(const Dataset &) const = default;
};

/// JSONL ingestion, one question object per line. Clamping of out-of-range
/// weak annotations is reported through `warnings` (stderr when null).
Dataset load_dataset(const std::filesystem::path &path,
                     std::vector<std::string> *warnings = nullptr);

/// Writes keys in the order id, text, weak_annotation, label.
void save_dataset(const Dataset &dataset, const std::filesystem::path &path);

struct Balance {
  std::size_t deleted = 0;
  std::size_t kept = 0;
  bool balanced = true;
};

/// Balanced iff the class counts differ by at most one.
Balance check_balance(const Dataset &dataset);

/// Seeded stratified holdout. The holdout takes round(holdout * n_c / n)
/// examples of the deleted class and the rest from the kept class; both
/// parts keep the source's relative order. Returns (rest, holdout).
std::pair<Dataset, Dataset> split_holdout(const Dataset &dataset,
                                          std::size_t holdout_count,
                                          std::uint64_t seed);

struct SyntheticParams {
  std::size_t n = 2000;
  std::size_t vocab_size = 200;
  std::size_t dim = 16;
  std::size_t max_words = 12;
  double noise = 0.15;
  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  Dataset dataset;
  EmbeddingTable table;
};

/// Desk-scale stand-in corpus: random unit embeddings, one vocabulary half
/// per class, tokens crossing over with probability `noise`, and a weak
/// annotation equal to the label flipped with probability `noise`.
SyntheticCorpus gen_synthetic(const SyntheticParams &params);

} // namespace depthsweep

#endif // DEPTHSWEEP_DATA_HPP
