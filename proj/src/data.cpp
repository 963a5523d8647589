// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "depthsweep/data.hpp"

#include "depthsweep/error.hpp"
#include "depthsweep/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <unordered_set>

namespace depthsweep {

Question make_question(std::string id, std::string text, double weak_annotation,
                       int label, bool *clamped) {
  if (label != kLabelKept && label != kLabelDeleted) {
    throw ValidationError("label must be 0 or 1, got " + std::to_string(label));
  }
  if (!std::isfinite(weak_annotation)) {
    throw ValidationError("weak_annotation must be finite");
  }
  const double bounded = std::clamp(weak_annotation, 0.0, 1.0);
  if (clamped) {
    *clamped = bounded != weak_annotation;
  }
  Question q;
  q.id = std::move(id);
  q.tokens = tokenize(text);
  q.text = std::move(text);
  q.weak_annotation = bounded;
  q.label = label;
  return q;
}

Dataset load_dataset(const std::filesystem::path &path,
                     std::vector<std::string> *warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  Dataset dataset;
  dataset.name = path.stem().string();
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error &e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) {
      throw ParseError("expected a JSON object", line_no);
    }
    auto require_string = [&](const char *key) -> std::string {
      const auto it = obj.find(key);
      if (it == obj.end()) {
        throw ParseError(std::string("missing required field '") + key + "'",
                         line_no);
      }
      if (!it->is_string()) {
        throw ParseError(std::string("field '") + key + "' must be a string",
                         line_no);
      }
      return it->get<std::string>();
    };
    std::string id = require_string("id");
    std::string text = require_string("text");

    double weak = 0.0;
    if (const auto it = obj.find("weak_annotation"); it != obj.end()) {
      if (!it->is_number()) {
        throw ParseError("field 'weak_annotation' must be a number", line_no);
      }
      weak = it->get<double>();
    }

    const auto label_it = obj.find("label");
    if (label_it == obj.end()) {
      throw ParseError("missing required field 'label'", line_no);
    }
    if (!label_it->is_number()) {
      throw ParseError("field 'label' must be a number", line_no);
    }
    const double raw_label = label_it->get<double>();
    if (raw_label != 0.0 && raw_label != 1.0) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": label must be 0 or 1");
    }

    if (!ids.insert(id).second) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate id '" + id + "'");
    }

    bool clamped = false;
    Question q;
    try {
      q = make_question(std::move(id), std::move(text), weak,
                        static_cast<int>(raw_label), &clamped);
    } catch (const ValidationError &e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " +
                            e.what());
    }
    if (clamped) {
      std::string msg = "line " + std::to_string(line_no) +
                        ": weak_annotation clamped into [0, 1]";
      if (warnings) {
        warnings->push_back(std::move(msg));
      } else {
        std::cerr << "warning: " << path.string() << ": " << msg << '\n';
      }
    }
    dataset.questions.push_back(std::move(q));
  }
  if (in.bad()) {
    throw IoError("read failure on '" + path.string() + "'");
  }
  return dataset;
}

void save_dataset(const Dataset &dataset, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  for (const auto &q : dataset.questions) {
    nlohmann::ordered_json obj;
    obj["id"] = q.id;
    obj["text"] = q.text;
    obj["weak_annotation"] = q.weak_annotation;
    obj["label"] = q.label;
    out << obj.dump() << '\n';
  }
  if (!out) {
    throw IoError("write failure on '" + path.string() + "'");
  }
}

Balance check_balance(const Dataset &dataset) {
  Balance b;
  for (const auto &q : dataset.questions) {
    (q.label == kLabelDeleted ? b.deleted : b.kept) += 1;
  }
  const std::size_t diff =
      b.deleted > b.kept ? b.deleted - b.kept : b.kept - b.deleted;
  b.balanced = diff <= 1;
  return b;
}

std::pair<Dataset, Dataset> split_holdout(const Dataset &dataset,
                                          std::size_t holdout_count,
                                          std::uint64_t seed) {
  const std::size_t n = dataset.size();
  if (holdout_count > n) {
    throw ConfigError("holdout of " + std::to_string(holdout_count) +
                      " exceeds dataset size " + std::to_string(n));
  }
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < n; ++i) {
    by_class[dataset.questions[i].label].push_back(i);
  }
  std::size_t take[2];
  if (n == 0) {
    take[0] = take[1] = 0;
  } else {
    take[1] = static_cast<std::size_t>(std::llround(
        static_cast<double>(holdout_count) *
        static_cast<double>(by_class[1].size()) / static_cast<double>(n)));
    take[1] = std::min(take[1], by_class[1].size());
    take[0] = holdout_count - take[1];
    if (take[0] > by_class[0].size()) {
      take[1] += take[0] - by_class[0].size();
      take[0] = by_class[0].size();
    }
  }

  Rng rng(seed);
  std::vector<char> in_holdout(n, 0);
  for (int c = 0; c < 2; ++c) {
    auto members = by_class[c];
    rng.shuffle(members);
    for (std::size_t i = 0; i < take[c]; ++i) {
      in_holdout[members[i]] = 1;
    }
  }

  Dataset rest, holdout;
  rest.name = dataset.name;
  holdout.name = dataset.name;
  for (std::size_t i = 0; i < n; ++i) {
    (in_holdout[i] ? holdout : rest).questions.push_back(dataset.questions[i]);
  }
  return {std::move(rest), std::move(holdout)};
}

SyntheticCorpus gen_synthetic(const SyntheticParams &params) {
  if (params.n % 2 != 0) {
    throw ConfigError("synthetic corpus size must be even, got " +
                      std::to_string(params.n));
  }
  if (params.vocab_size < 2) {
    throw ConfigError("synthetic vocabulary needs at least 2 words");
  }
  if (params.dim == 0 || params.max_words == 0) {
    throw ConfigError("synthetic dim and max_words must be positive");
  }
  if (!(params.noise >= 0.0 && params.noise <= 1.0)) {
    throw ConfigError("synthetic noise must lie in [0, 1]");
  }

  Rng table_rng(derive_seed(params.seed, 0));
  EmbeddingTable table(params.dim);
  std::vector<std::string> vocab;
  vocab.reserve(params.vocab_size);
  std::vector<double> vec(params.dim);
  for (std::size_t w = 0; w < params.vocab_size; ++w) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double &v : vec) {
        v = table_rng.normal();
        norm += v * v;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (double &v : vec) {
      v /= norm;
    }
    char name[32];
    std::snprintf(name, sizeof name, "w%zu", w);
    vocab.emplace_back(name);
    table.insert(vocab.back(), vec);
  }

  // Deleted questions draw from the first half of the vocabulary, kept ones
  // from the second half.
  const std::size_t half = params.vocab_size / 2;
  const std::size_t pool_begin[2] = {half, 0};
  const std::size_t pool_size[2] = {params.vocab_size - half, half};

  Rng rng(derive_seed(params.seed, 1));
  std::vector<int> labels(params.n);
  for (std::size_t i = 0; i < params.n; ++i) {
    labels[i] = i < params.n / 2 ? kLabelDeleted : kLabelKept;
  }
  rng.shuffle(labels);

  SyntheticCorpus corpus{Dataset{}, std::move(table)};
  corpus.dataset.name = "synthetic";
  corpus.dataset.questions.reserve(params.n);
  for (std::size_t i = 0; i < params.n; ++i) {
    const int label = labels[i];
    const std::size_t length = 1 + rng.below(params.max_words);
    std::string text;
    for (std::size_t t = 0; t < length; ++t) {
      const int source = rng.uniform() < params.noise ? 1 - label : label;
      const std::size_t word =
          pool_begin[source] + rng.below(pool_size[source]);
      if (!text.empty()) {
        text += ' ';
      }
      text += vocab[word];
    }
    const int indicator = rng.uniform() < params.noise ? 1 - label : label;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%06zu", i);
    corpus.dataset.questions.push_back(make_question(
        id, std::move(text), static_cast<double>(indicator), label));
  }
  return corpus;
}

} // namespace depthsweep
