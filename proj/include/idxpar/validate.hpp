#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "idxpar/oracle.hpp"
#include "idxpar/report.hpp"

namespace idxpar {

struct ValidationIssue {
  std::string file;
  uint64_t trial = 0;
  uint64_t seed = 0;
  std::string what;
};

struct ValidationSummary {
  uint64_t trials = 0;
  uint64_t facts_checked = 0;
  uint64_t verdicts_checked = 0;
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
};

// Confirm every fact in the final store (value containment / exhaustive
// property check) and every parallel verdict (output-independence replay)
// on `trials` generated inputs; serial witnesses must reproduce on at
// least one input.
ValidationSummary validate_analysis(const std::string& file, const Program& prog,
                                    const AnalysisOutput& out, const ShapeSpec& shape,
                                    uint64_t trials, uint64_t seed,
                                    std::ostream* log = nullptr);

}  // namespace idxpar
