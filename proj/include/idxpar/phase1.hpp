#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "idxpar/ast.hpp"
#include "idxpar/compare.hpp"
#include "idxpar/facts.hpp"
#include "idxpar/symexpr.hpp"

namespace idxpar {

struct LoopRecord;

// Where one iteration writes an array: a simple offset i+k of the loop
// index, a whole subscript range (from a collapsed inner loop), or an
// unanalyzable subscript.
struct WriteSub {
  enum class Kind { Simple, Range, NonSimple };
  Kind kind = Kind::NonSimple;
  long long offset = 0;  // Simple
  SymRange range;        // Range

  static WriteSub simple(long long k) { return {Kind::Simple, k, SymRange::bottom()}; }
  static WriteSub whole_range(SymRange r) { return {Kind::Range, 0, std::move(r)}; }
  static WriteSub non_simple() { return {Kind::NonSimple, 0, SymRange::bottom()}; }
};

struct ArrayWrite {
  WriteSub sub;
  SymRange value;  // may-range of the stored value; ⊥ when unknown
  bool conditional = false;
  int line = 0;
};

// Effect of one loop iteration on scalars and arrays (Phase 1 result).
struct BodySummary {
  std::string loop_index;
  std::map<std::string, SymRange> scalar_exit;  // written scalars, λ-relative
  std::map<std::string, std::vector<ArrayWrite>> array_writes;
  std::set<std::string> poisoned_here;       // arrays hit by NonSimple writes in this body
  std::set<std::string> poisoned_inherited;  // poisons propagated from collapsed loops
  std::set<std::string> arrays_read;
  std::set<std::string> hidden_scalars;  // omitted from the trace (indirection
                                         // counters, inner loop indexes)

  bool poisoned(const std::string& a) const {
    return poisoned_here.count(a) || poisoned_inherited.count(a);
  }
};

// Evaluation / analysis context for one loop body (or the top-level
// straight-line region when `index` is empty).
struct BodyCtx {
  const Program* prog = nullptr;
  std::shared_ptr<const ProgramFacts> facts;  // nest-filtered view
  ProgramFacts* store = nullptr;              // mutable store; top level only
  Assumptions asms;
  std::string index;                    // this loop's index var; empty at top level
  std::set<std::string> outer_indexes;  // enclosing loop index vars
  bool zero_init_scalars = false;       // top level: unwritten scalars read as 0

  // mutable interpretation state
  std::map<std::string, SymRange> scalars;
  std::set<std::string> written_scalars;
  std::map<std::string, std::map<long long, ArrayWrite>> simple_writes;
  std::map<std::string, std::vector<ArrayWrite>> range_writes;
  std::set<std::string> poisoned_here;
  std::set<std::string> poisoned_inherited;
  std::set<std::string> arrays_read;
  std::set<std::string> hidden_scalars;

  std::vector<LoopRecord>* records = nullptr;  // processing-order sink

  SymRange scalar_value(const std::string& name) const;
  bool array_poisoned(const std::string& a) const {
    return poisoned_here.count(a) || poisoned_inherited.count(a);
  }
};

// May-range of an expression's value in the current body state. Unknown
// constructs degrade to ⊥, never abort.
SymRange eval_expr(const Expr& e, BodyCtx& ctx);

// Interpret every statement of `loop`'s body (collapsing inner loops as
// they are encountered) and package the per-iteration effects.
BodySummary analyze_body(const Stmt& loop, BodyCtx& ctx);

// Program-order handling of one top-level statement (ctx.store set):
// straight-line point facts, kills, and per-nest analyze + collapse.
void interpret_top_stmt(const Stmt& s, BodyCtx& ctx);

}  // namespace idxpar
