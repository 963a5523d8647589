// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DEPTHSWEEP_FEATURES_HPP
#define DEPTHSWEEP_FEATURES_HPP

#include "depthsweep/error.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace depthsweep {

struct Question;

/// Word -> fixed-length vector map. Absent words resolve to the zero vector.
/// Insertion order is kept so saving is deterministic.
class EmbeddingTable {
public:
  explicit EmbeddingTable(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return words_.size(); }

  /// Returns false (and keeps the existing vector) when `word` is already
  /// present. Throws ShapeError when `vector.size() != dim()`.
  bool insert(std::string word, std::span<const double> vector);

  bool contains(std::string_view word) const;
  std::span<const double> lookup(std::string_view word) const;

  const std::vector<std::string> &words() const noexcept { return words_; }

  bool operator==(const EmbeddingTable &other) const;

private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::size_t dim_;
  std::vector<std::string> words_;
  std::vector<double> values_;
  std::vector<double> zero_;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> index_;
};

/// Lowercases ASCII, splits on whitespace and strips punctuation from both
/// ends of each token. Tokens that are pure punctuation are dropped.
std::vector<std::string> tokenize(std::string_view text);

/// Reads the word2vec text format. An optional `count dim` first line is
/// skipped. Blank lines are ignored. Duplicate words keep the first vector.
EmbeddingTable load_embeddings(const std::filesystem::path &path,
                               std::size_t expected_dim);

/// Dimension of the first entry in a word2vec text file (from the header
/// when present). Throws ParseError for a file with no entries.
std::size_t detect_embedding_dim(const std::filesystem::path &path);

void save_embeddings(const EmbeddingTable &table,
                     const std::filesystem::path &path);

/// max_words * dim + 1.
std::size_t feature_dim(std::size_t max_words, std::size_t dim);

/// Concatenates the embeddings of the first `max_words` tokens, zero-pads
/// the remaining word slots and writes the weak annotation into the final
/// element. `out.size()` must equal feature_dim(max_words, table.dim()).
void featurize_into(std::span<const std::string> tokens, double weak_annotation,
                    const EmbeddingTable &table, std::size_t max_words,
                    std::span<double> out);

std::vector<double> featurize(const Question &q, const EmbeddingTable &table,
                              std::size_t max_words);

} // namespace depthsweep

#endif // DEPTHSWEEP_FEATURES_HPP
