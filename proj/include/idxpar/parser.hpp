#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idxpar/ast.hpp"
#include "idxpar/diag.hpp"

namespace idxpar {

struct ParseResult {
  std::optional<Program> program;  // set iff diagnostics is empty
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }
};

// Parse and validate kernel-language source. Deterministic; every
// violation of the kernel subset is reported with its source position.
ParseResult parse(std::string_view source);

}  // namespace idxpar
