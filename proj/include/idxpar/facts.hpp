#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "idxpar/symexpr.hpp"

namespace idxpar {

struct Assumptions;

enum class ArrayProperty {
  MonotonicInc,
  MonotonicDec,
  StrictMonotonicInc,
  StrictMonotonicDec,
  Injective,
  Identity,
};

std::string to_string(ArrayProperty p);

// A derived fact about an array over a subscript must-range: either every
// element holds a value in `value`, or the tagged property holds.
//
// Range conventions:
//   ValueRange over [a:b]      y[i] ∈ value for all i in [a:b]
//   Monotonic_* over [a:b]     y[i-1] ≤ y[i] (resp. <, ≥, >) for all i in [a:b]
//   Injective over [a:b]       y[i] ≠ y[j] for all i ≠ j in [a:b]
//   Identity over [a:b]        y[i] = i for all i in [a:b]
struct FactEntry {
  std::string array;
  SymRange index_range;
  bool is_property = false;
  SymRange value;                                      // when !is_property
  ArrayProperty property = ArrayProperty::MonotonicInc;  // when is_property
  std::string origin;  // producing loop id or "line@N" for straight-line code
  std::string rule;
  bool derived = false;  // secondary fact (strict monotonicity ⇒ injective)

  static FactEntry value_range(std::string array, SymRange idx, SymRange value);
  static FactEntry prop(std::string array, SymRange idx, ArrayProperty p);

  std::string str() const;  // "rowptr: [1:ROWLEN], Monotonic_inc"
};

// Ordered store of facts, program order. Later facts shadow earlier ones
// for value lookups; a write into an array kills overlapping facts.
class ProgramFacts {
 public:
  void add(FactEntry f) { entries_.push_back(std::move(f)); }
  const std::vector<FactEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  std::vector<const FactEntry*> for_array(const std::string& name) const;

  void kill_array(const std::string& name);
  // Remove facts about `name` whose index range is not provably disjoint
  // from `written`. A ⊥ written range kills the whole array.
  void kill_overlapping(const std::string& name, const SymRange& written,
                        const Assumptions& asms);

  // Most recent value fact whose index range covers `idx`.
  const FactEntry* value_range_covering(const std::string& array, const SymRange& idx,
                                        const Assumptions& asms,
                                        std::vector<std::string>* used = nullptr) const;

 private:
  std::vector<FactEntry> entries_;
};

}  // namespace idxpar
