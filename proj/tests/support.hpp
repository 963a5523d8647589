// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace testing_support {

class TempDir {
public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "depthsweep-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) {
      throw std::runtime_error("mkdtemp failed");
    }
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const {
    return path_ / name;
  }

private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path &path,
                       const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

/// Minimal XML well-formedness check: one root element, balanced tags,
/// quoted attributes, known entities. Enough for generated SVG.
class XmlChecker {
public:
  explicit XmlChecker(const std::string &text) : s_(text) {}

  bool check(std::string *error) {
    try {
      skip_ws();
      if (starts("<?xml")) {
        const auto end = s_.find("?>", pos_);
        if (end == std::string::npos) {
          fail("unterminated declaration");
        }
        pos_ = end + 2;
      }
      skip_misc();
      element();
      skip_misc();
      if (pos_ != s_.size()) {
        fail("content after root element");
      }
      return true;
    } catch (const std::runtime_error &e) {
      if (error) {
        *error = e.what();
      }
      return false;
    }
  }

  std::size_t element_count() const { return elements_; }

private:
  [[noreturn]] void fail(const std::string &what) const {
    throw std::runtime_error(what + " at offset " + std::to_string(pos_));
  }
  bool starts(const char *lit) const { return s_.compare(pos_, std::strlen(lit), lit) == 0; }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
  }
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts("<!--")) {
        const auto end = s_.find("-->", pos_);
        if (end == std::string::npos) {
          fail("unterminated comment");
        }
        pos_ = end + 3;
      } else {
        return;
      }
    }
  }
  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
           c == ':' || c == '.';
  }
  std::string name() {
    const auto start = pos_;
    while (pos_ < s_.size() && name_char(s_[pos_])) {
      ++pos_;
    }
    if (start == pos_) {
      fail("expected a name");
    }
    return s_.substr(start, pos_ - start);
  }
  void entity() {
    const auto end = s_.find(';', pos_);
    if (end == std::string::npos) {
      fail("unterminated entity");
    }
    const std::string ent = s_.substr(pos_, end - pos_ + 1);
    static const char *known[] = {"&amp;", "&lt;", "&gt;", "&quot;", "&apos;"};
    bool ok = ent.size() > 3 && ent[1] == '#';
    for (const char *k : known) {
      ok = ok || ent == k;
    }
    if (!ok) {
      fail("unknown entity " + ent);
    }
    pos_ = end + 1;
  }
  void element() {
    if (pos_ >= s_.size() || s_[pos_] != '<') {
      fail("expected '<'");
    }
    ++pos_;
    const std::string tag = name();
    ++elements_;
    std::map<std::string, bool> seen;
    for (;;) {
      skip_ws();
      if (starts("/>")) {
        pos_ += 2;
        return;
      }
      if (starts(">")) {
        ++pos_;
        break;
      }
      const std::string attr = name();
      if (seen[attr]) {
        fail("duplicate attribute " + attr);
      }
      seen[attr] = true;
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != '=') {
        fail("expected '=' after " + attr);
      }
      ++pos_;
      skip_ws();
      const char quote = pos_ < s_.size() ? s_[pos_] : '\0';
      if (quote != '"' && quote != '\'') {
        fail("unquoted attribute " + attr);
      }
      ++pos_;
      while (pos_ < s_.size() && s_[pos_] != quote) {
        if (s_[pos_] == '<') {
          fail("'<' in attribute value");
        }
        if (s_[pos_] == '&') {
          entity();
        } else {
          ++pos_;
        }
      }
      if (pos_ >= s_.size()) {
        fail("unterminated attribute");
      }
      ++pos_;
    }
    for (;;) {
      if (pos_ >= s_.size()) {
        fail("unclosed <" + tag + ">");
      }
      if (starts("</")) {
        pos_ += 2;
        const std::string closing = name();
        if (closing != tag) {
          fail("mismatched </" + closing + "> for <" + tag + ">");
        }
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '>') {
          fail("expected '>'");
        }
        ++pos_;
        return;
      }
      if (starts("<!--")) {
        skip_misc();
      } else if (s_[pos_] == '<') {
        element();
      } else if (s_[pos_] == '&') {
        entity();
      } else {
        ++pos_;
      }
    }
  }

  const std::string &s_;
  std::size_t pos_ = 0;
  std::size_t elements_ = 0;
};

inline bool xml_well_formed(const std::string &text, std::string *error = nullptr) {
  XmlChecker checker(text);
  return checker.check(error);
}

inline std::size_t count_occurrences(const std::string &text,
                                     const std::string &needle) {
  std::size_t count = 0;
  for (auto at = text.find(needle); at != std::string::npos;
       at = text.find(needle, at + needle.size())) {
    ++count;
  }
  return count;
}

inline std::string attribute(const std::string &svg, const std::string &tag_start,
                             const std::string &attr) {
  const auto tag = svg.find(tag_start);
  if (tag == std::string::npos) {
    throw std::runtime_error("missing " + tag_start);
  }
  const auto close = svg.find('>', tag);
  const auto key = svg.find(" " + attr + "=\"", tag);
  if (key == std::string::npos || key > close) {
    throw std::runtime_error("missing attribute " + attr);
  }
  const auto begin = key + attr.size() + 3;
  return svg.substr(begin, svg.find('"', begin) - begin);
}

inline std::pair<double, double> number_pair(const std::string &text) {
  std::istringstream ss(text);
  double a = 0.0;
  double b = 0.0;
  ss >> a >> b;
  return {a, b};
}

/// Reads the polyline back through the axis transform declared on the
/// plot group and returns (depth, value) pairs.
inline std::vector<std::pair<double, double>> recover_points(const std::string &svg) {
  const std::string g = "<g id=\"plot\"";
  if (attribute(svg, g, "data-x-scale") != "log10" ||
      attribute(svg, g, "data-y-scale") != "linear") {
    throw std::runtime_error("unexpected axis scales");
  }
  const auto [xd0, xd1] = number_pair(attribute(svg, g, "data-x-domain"));
  const auto [xr0, xr1] = number_pair(attribute(svg, g, "data-x-range"));
  const auto [yd0, yd1] = number_pair(attribute(svg, g, "data-y-domain"));
  const auto [yr0, yr1] = number_pair(attribute(svg, g, "data-y-range"));
  std::istringstream pts(attribute(svg, "<polyline", "points"));
  std::vector<std::pair<double, double>> out;
  for (std::string pair; pts >> pair;) {
    const auto comma = pair.find(',');
    const double px = std::stod(pair.substr(0, comma));
    const double py = std::stod(pair.substr(comma + 1));
    const double lx = std::log10(xd0) +
                      (px - xr0) / (xr1 - xr0) * (std::log10(xd1) - std::log10(xd0));
    const double vy = yd0 + (py - yr0) / (yr1 - yr0) * (yd1 - yd0);
    out.emplace_back(std::pow(10.0, lx), vy);
  }
  return out;
}

} // namespace testing_support
