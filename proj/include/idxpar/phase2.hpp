#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "idxpar/ast.hpp"
#include "idxpar/facts.hpp"
#include "idxpar/phase1.hpp"

namespace idxpar {

// Whole-loop effect: Phase 1 summary aggregated across the iteration
// space, plus the facts the loop establishes.
struct LoopRecord {
  std::string id;
  int line = 0;
  std::string index_var;
  SymRange iter_range;  // [lower : upper-1]
  SymExpr trip;         // upper - lower
  BodySummary body;
  std::map<std::string, SymRange> scalar_effects;  // over Λ; ⊥ when not derivable
  std::vector<FactEntry> facts;
  // per-array written range; nullopt = whole array (unknown subscripts)
  std::map<std::string, std::optional<SymRange>> write_set;
  // store view the loop was analyzed against (facts valid at its entry,
  // minus arrays the nest itself writes); used by the dependence test
  ProgramFacts facts_at_entry;
};

struct PipelineResult {
  ProgramFacts facts;  // final store at program end
  std::vector<LoopRecord> loops;             // processing order (inside out)
  std::map<std::string, SymRange> top_scalars;
};

// Recurrence view of an array write: value = base[i + offset-1] + addend.
struct RecurrenceView {
  SymExpr prior_elem;  // the referenced atom's index expression
  SymRange addend;
};
std::optional<RecurrenceView> detect_recurrence(const std::string& array, long long offset,
                                                const SymRange& value,
                                                const std::string& index);

// Phase 2 for one loop whose body summary is already computed.
LoopRecord aggregate(const Stmt& loop, BodySummary body, const SymRange& iter_range,
                     const SymExpr& trip, const Assumptions& asms);

// Analyze a loop nest from the enclosing context (bounds are evaluated in
// `encl`); appends the record for every loop of the nest, innermost first.
LoopRecord analyze_loop(const Stmt& loop, BodyCtx& encl);

// Insert a collapsed loop's facts into the store at its program point,
// killing overwritten facts, and update the straight-line scalar state.
void collapse(const LoopRecord& rec, ProgramFacts& facts,
              std::map<std::string, SymRange>& top_scalars, const Assumptions& asms);

// Program-order driver: straight-line facts, then per nest Phase 1,
// Phase 2, collapse, inside out.
PipelineResult run_pipeline(const Program& prog);

// Aggregation trace in the two-line-per-loop listing format.
std::string render_trace(const PipelineResult& res);

Assumptions base_assumptions(const Program& prog, const ProgramFacts* facts);

// Arrays written anywhere inside the loop's nest.
std::set<std::string> nest_written_arrays(const Stmt& loop);

}  // namespace idxpar
