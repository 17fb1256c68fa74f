#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace idxpar {

// A single user-facing problem report, printed as "file:line:col: message".
struct Diagnostic {
  int line = 0;
  int col = 0;
  std::string message;
};

inline std::string format_diagnostic(const std::string& file, const Diagnostic& d) {
  return file + ":" + std::to_string(d.line) + ":" + std::to_string(d.col) + ": " + d.message;
}

// Internal failures (bad loop ids, trapped interpreter errors, ...).
struct InternalError : std::runtime_error {
  explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace idxpar
