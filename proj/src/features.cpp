// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "depthsweep/features.hpp"

#include "depthsweep/data.hpp"
#include "depthsweep/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace depthsweep {

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim), zero_(dim, 0.0) {
  if (dim == 0) {
    throw ConfigError("embedding dimension must be positive");
  }
}

bool EmbeddingTable::insert(std::string word, std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw ShapeError("embedding for '" + word + "' has length " +
                     std::to_string(vector.size()) + ", expected " +
                     std::to_string(dim_));
  }
  if (index_.contains(word)) {
    return false;
  }
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  values_.insert(values_.end(), vector.begin(), vector.end());
  return true;
}

bool EmbeddingTable::contains(std::string_view word) const {
  return index_.find(word) != index_.end();
}

std::span<const double> EmbeddingTable::lookup(std::string_view word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) {
    return zero_;
  }
  return {values_.data() + it->second * dim_, dim_};
}

bool EmbeddingTable::operator==(const EmbeddingTable &other) const {
  return dim_ == other.dim_ && words_ == other.words_ &&
         values_ == other.values_;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  auto is_space = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
  };
  auto is_punct = [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
  };
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) {
      ++i;
    }
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) {
      ++j;
    }
    std::size_t begin = i, end = j;
    while (begin < end && is_punct(text[begin])) {
      ++begin;
    }
    while (end > begin && is_punct(text[end - 1])) {
      --end;
    }
    if (begin < end) {
      std::string token(text.substr(begin, end - begin));
      for (char &c : token) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      tokens.push_back(std::move(token));
    }
    i = j;
  }
  return tokens;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() &&
           std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    std::size_t j = i;
    while (j < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[j]))) {
      ++j;
    }
    if (j > i) {
      fields.push_back(line.substr(i, j - i));
    }
    i = j;
  }
  return fields;
}

bool is_integer_field(std::string_view field) {
  long long value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  return ec == std::errc() && ptr == field.data() + field.size();
}

double parse_real(std::string_view field, std::size_t line) {
  double value = 0.0;
  const char *first = field.data();
  const char *last = field.data() + field.size();
  if (first != last && *first == '+') {
    ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError("non-numeric vector component '" + std::string(field) +
                     "'",
                     line);
  }
  return value;
}

std::ifstream open_input(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  return in;
}

} // namespace

EmbeddingTable load_embeddings(const std::filesystem::path &path,
                               std::size_t expected_dim) {
  std::ifstream in = open_input(path);
  EmbeddingTable table(expected_dim);
  std::string line;
  std::vector<double> vector(expected_dim);
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    const auto fields = split_fields(line);
    if (fields.empty()) {
      continue;
    }
    if (line_no == 1 && fields.size() == 2 && is_integer_field(fields[0]) &&
        is_integer_field(fields[1])) {
      continue;
    }
    if (fields.size() != expected_dim + 1) {
      throw ParseError("expected " + std::to_string(expected_dim) +
                           " vector components for '" +
                           std::string(fields[0]) + "', found " +
                           std::to_string(fields.size() - 1),
                       line_no);
    }
    for (std::size_t d = 0; d < expected_dim; ++d) {
      vector[d] = parse_real(fields[d + 1], line_no);
    }
    table.insert(std::string(fields[0]), vector);
  }
  if (in.bad()) {
    throw IoError("read failure on '" + path.string() + "'");
  }
  return table;
}

std::size_t detect_embedding_dim(const std::filesystem::path &path) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) {
      continue;
    }
    if (line_no == 1 && fields.size() == 2 && is_integer_field(fields[0]) &&
        is_integer_field(fields[1])) {
      std::size_t dim = 0;
      std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(),
                      dim);
      if (dim > 0) {
        return dim;
      }
      continue;
    }
    if (fields.size() < 2) {
      throw ParseError("entry without vector components", line_no);
    }
    return fields.size() - 1;
  }
  throw ParseError("'" + path.string() + "' contains no embeddings");
}

void save_embeddings(const EmbeddingTable &table,
                     const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out << table.size() << ' ' << table.dim() << '\n';
  char buf[32];
  for (const auto &word : table.words()) {
    out << word;
    for (double v : table.lookup(word)) {
      // Shortest representation that reads back to the same double.
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out << ' ' << std::string_view(buf, res.ptr - buf);
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write failure on '" + path.string() + "'");
  }
}

std::size_t feature_dim(std::size_t max_words, std::size_t dim) {
  return max_words * dim + 1;
}

void featurize_into(std::span<const std::string> tokens, double weak_annotation,
                    const EmbeddingTable &table, std::size_t max_words,
                    std::span<double> out) {
  const std::size_t dim = table.dim();
  if (max_words == 0) {
    throw ConfigError("max_words must be at least 1");
  }
  if (out.size() != feature_dim(max_words, dim)) {
    throw ShapeError("feature buffer has length " + std::to_string(out.size()) +
                     ", expected " +
                     std::to_string(feature_dim(max_words, dim)));
  }
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t used = std::min(tokens.size(), max_words);
  for (std::size_t w = 0; w < used; ++w) {
    const auto vec = table.lookup(tokens[w]);
    std::copy(vec.begin(), vec.end(), out.begin() + w * dim);
  }
  out.back() = weak_annotation;
}

std::vector<double> featurize(const Question &q, const EmbeddingTable &table,
                              std::size_t max_words) {
  if (max_words == 0) {
    throw ConfigError("max_words must be at least 1");
  }
  std::vector<double> values(feature_dim(max_words, table.dim()));
  featurize_into(q.tokens, q.weak_annotation, table, max_words, values);
  return values;
}

} // namespace depthsweep
