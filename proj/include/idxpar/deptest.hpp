#pragma once

#include <optional>
#include <string>
#include <vector>

#include "idxpar/ast.hpp"
#include "idxpar/compare.hpp"
#include "idxpar/phase2.hpp"
#include "idxpar/symexpr.hpp"

namespace idxpar {

// Per-iteration index range of one static array reference, as a function
// of the candidate loop's index. A loop whose first iteration takes a
// distinct branch carries two cases.
struct BoundCase {
  enum class Guard { Uniform, FirstIter, Rest };
  Guard guard = Guard::Uniform;
  SymExpr lo, hi;  // inclusive; ⊥ when unresolvable

  bool resolved() const { return !lo.is_bottom() && !hi.is_bottom(); }
};

// Subscript of the shape scale*base[index_expr] + addend.
struct IndirectSub {
  std::string base;
  SymExpr index_expr;
  long long scale = 1;
  SymExpr addend;                          // literal for a pure injective map
  bool index_is_candidate_affine = false;  // index_expr ≡ i + k
  bool multi_level = false;                // base's subscript reads another array
};

struct AccessDescriptor {
  std::string array;
  bool is_write = false;
  std::vector<BoundCase> cases;
  std::optional<IndirectSub> indirect;
  int line = 0;
  bool guarded = false;               // under a data-dependent condition
  bool direct = false;                // in the candidate body, outside guards/inner loops
  bool inner_index_indirect = false;  // subscript varies with an inner loop via an array read
  bool branch_defined = false;        // subscript depends on a data-dependent branch
};

struct ProofStep {
  std::string query;
  std::string result;
  std::vector<std::string> facts_used;
};

enum class Decision { Parallel, Serial, Unknown };
enum class DepRule { None, InjectiveWrite, MonotonicRanges };

std::string to_string(Decision d);
std::string to_string(DepRule r);

struct SerialWitness {
  long long iter1 = 0, iter2 = 1;  // iteration ordinals within the loop
  std::string array;
  std::string location;
};

struct Verdict {
  std::string loop_id;
  int line = 0;
  Decision decision = Decision::Unknown;
  DepRule rule = DepRule::None;
  bool peeled_first_iteration = false;
  std::vector<std::string> private_scalars;
  std::vector<ProofStep> proof;
  std::string reason;  // set for unknown verdicts
  std::optional<SerialWitness> witness;
};

std::vector<AccessDescriptor> collect_accesses(const Stmt& loop, const Program& prog,
                                               const SymRange& iter_range);

struct TestOutcome {
  bool proved = false;
  bool peeled = false;
  std::string reason;
  std::vector<ProofStep> steps;
};

// Non-overlap of adjacent iteration ranges: hi(i) < lo(i+1) plus the
// lower-bound monotonicity side condition lo(i) <= lo(i+1); distinct
// first-iteration bounds are proven empty/below, or peeled.
TestOutcome test_monotonic_ranges(const AccessDescriptor& d, const std::string& index,
                                  const SymRange& iter_range, const Assumptions& asms);

// A write a[c*b[i+k]+d] lands on pairwise-distinct elements when an
// injectivity fact on b covers the accessed subscript range and c != 0.
TestOutcome test_injective_write(const AccessDescriptor& d, const std::string& index,
                                 const SymRange& iter_range, const Assumptions& asms);

Verdict classify_loop(const Stmt& loop, const Program& prog, const LoopRecord& rec);

}  // namespace idxpar
