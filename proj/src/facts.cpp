#include "idxpar/facts.hpp"

#include <algorithm>

#include "idxpar/compare.hpp"

namespace idxpar {

std::string to_string(ArrayProperty p) {
  switch (p) {
    case ArrayProperty::MonotonicInc: return "Monotonic_inc";
    case ArrayProperty::MonotonicDec: return "Monotonic_dec";
    case ArrayProperty::StrictMonotonicInc: return "StrictMonotonic_inc";
    case ArrayProperty::StrictMonotonicDec: return "StrictMonotonic_dec";
    case ArrayProperty::Injective: return "Injective";
    case ArrayProperty::Identity: return "Identity";
  }
  return "?";
}

FactEntry FactEntry::value_range(std::string array, SymRange idx, SymRange value) {
  FactEntry f;
  f.array = std::move(array);
  f.index_range = std::move(idx);
  f.is_property = false;
  f.value = std::move(value);
  return f;
}

FactEntry FactEntry::prop(std::string array, SymRange idx, ArrayProperty p) {
  FactEntry f;
  f.array = std::move(array);
  f.index_range = std::move(idx);
  f.is_property = true;
  f.property = p;
  return f;
}

std::string FactEntry::str() const {
  std::string s = array + ": " + index_range.str() + ", ";
  s += is_property ? to_string(property) : value.str();
  return s;
}

std::vector<const FactEntry*> ProgramFacts::for_array(const std::string& name) const {
  std::vector<const FactEntry*> out;
  for (const auto& f : entries_)
    if (f.array == name) out.push_back(&f);
  return out;
}

void ProgramFacts::kill_array(const std::string& name) {
  entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                [&](const FactEntry& f) { return f.array == name; }),
                 entries_.end());
}

void ProgramFacts::kill_overlapping(const std::string& name, const SymRange& written,
                                    const Assumptions& asms) {
  if (written.is_bottom()) {
    kill_array(name);
    return;
  }
  entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                [&](const FactEntry& f) {
                                  if (f.array != name) return false;
                                  if (f.index_range.is_bottom()) return true;
                                  bool disjoint =
                                      prove_lt(written.hi(), f.index_range.lo(), asms) ||
                                      prove_lt(f.index_range.hi(), written.lo(), asms);
                                  return !disjoint;
                                }),
                 entries_.end());
}

namespace {
// Coverage checks can consult the store again (an index range may itself
// contain array elements); cap that mutual recursion.
thread_local int g_cover_depth = 0;
struct CoverGuard {
  CoverGuard() { ++g_cover_depth; }
  ~CoverGuard() { --g_cover_depth; }
};
}  // namespace

const FactEntry* ProgramFacts::value_range_covering(const std::string& array,
                                                    const SymRange& idx,
                                                    const Assumptions& asms,
                                                    std::vector<std::string>* used) const {
  if (idx.is_bottom() || g_cover_depth > 4) return nullptr;
  CoverGuard guard;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->array != array || it->is_property) continue;
    std::vector<std::string> local;
    if (range_covered(idx, it->index_range, asms, &local)) {
      if (used) used->insert(used->end(), local.begin(), local.end());
      return &*it;
    }
  }
  return nullptr;
}

}  // namespace idxpar
