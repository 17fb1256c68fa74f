#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "idxpar/ast.hpp"
#include "idxpar/deptest.hpp"
#include "idxpar/phase2.hpp"
#include "idxpar/printer.hpp"

namespace idxpar {

struct AnalysisOutput {
  PipelineResult pipeline;
  std::vector<Verdict> verdicts;  // aligned with pipeline.loops
};

AnalysisOutput analyze_program(const Program& prog);

// Deterministic report with stable key ordering (schema_version 1; see
// docs/report-schema.json).
nlohmann::ordered_json build_report(const std::string& file, const AnalysisOutput& out);

// Proof trace of one loop, human-readable.
std::string render_explain(const AnalysisOutput& out, const std::string& loop_id);

std::map<std::string, LoopAnnotation> annotations_from_verdicts(
    const std::vector<Verdict>& verdicts);

}  // namespace idxpar
