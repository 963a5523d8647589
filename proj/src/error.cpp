// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "depthsweep/error.hpp"

namespace depthsweep {

const char *error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::io:
    return "io";
  case ErrorKind::parse:
    return "parse";
  case ErrorKind::shape:
    return "shape";
  case ErrorKind::config:
    return "config";
  case ErrorKind::numeric:
    return "numeric";
  case ErrorKind::validation:
    return "validation";
  case ErrorKind::input:
    return "input";
  case ErrorKind::internal:
    return "internal";
  }
  return "unknown";
}

} // namespace depthsweep
