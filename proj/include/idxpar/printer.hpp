#pragma once

#include <map>
#include <string>
#include <vector>

#include "idxpar/ast.hpp"

namespace idxpar {

// Canonical source form. parse(pretty_print(parse(s))) is structurally
// equal to parse(s).
std::string pretty_print(const Program& prog);

std::string expr_to_source(const Expr& e);

struct LoopAnnotation {
  bool parallel = false;
  std::vector<std::string> private_scalars;  // sorted
};

// Pretty-printed source with `#pragma omp parallel for` lines inserted
// above each loop annotated parallel. All other text is identical to
// pretty_print(prog). Throws InternalError on an unknown loop id.
std::string annotate(const Program& prog, const std::map<std::string, LoopAnnotation>& verdicts);

}  // namespace idxpar
