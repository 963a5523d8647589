// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DEPTHSWEEP_ERROR_HPP
#define DEPTHSWEEP_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace depthsweep {

enum class ErrorKind {
  io,
  parse,
  shape,
  config,
  numeric,
  validation,
  input,
  internal,
};

const char *error_kind_name(ErrorKind kind) noexcept;

/// Base of every exception thrown by the library. The C API maps `kind()`
/// onto its status codes.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class IoError : public Error {
public:
  explicit IoError(const std::string &message) : Error(ErrorKind::io, message) {}
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
  ParseError(const std::string &message, std::size_t line = 0)
      : Error(ErrorKind::parse,
              line ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ShapeError : public Error {
public:
  explicit ShapeError(const std::string &message)
      : Error(ErrorKind::shape, message) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string &message)
      : Error(ErrorKind::config, message) {}
};

class NumericError : public Error {
public:
  explicit NumericError(const std::string &message)
      : Error(ErrorKind::numeric, message) {}
};

class ValidationError : public Error {
public:
  explicit ValidationError(const std::string &message)
      : Error(ErrorKind::validation, message) {}
};

class InputError : public Error {
public:
  explicit InputError(const std::string &message)
      : Error(ErrorKind::input, message) {}
};

class InternalError : public Error {
public:
  explicit InternalError(const std::string &message)
      : Error(ErrorKind::internal, message) {}
};

} // namespace depthsweep

#endif // DEPTHSWEEP_ERROR_HPP
