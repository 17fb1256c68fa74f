#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "idxpar/facts.hpp"
#include "idxpar/symexpr.hpp"

namespace idxpar {

// Context a symbolic comparison may rely on: size parameters known to be
// >= 1, value domains of in-scope loop indexes, and the fact store.
struct Assumptions {
  const ProgramFacts* facts = nullptr;
  std::set<std::string> positive_params;
  std::map<std::string, SymRange> index_domains;

  Assumptions with_domain(const std::string& idx, const SymRange& r) const {
    Assumptions a = *this;
    a.index_domains[idx] = r;
    return a;
  }
};

enum class CmpResult { ProvablyLT, ProvablyLE, ProvablyEQ, ProvablyGE, ProvablyGT, Unknown };

std::string to_string(CmpResult r);

enum class SignFact { NonNegative, NonPositive, StrictlyPositive, StrictlyNegative, Unknown };

std::string to_string(SignFact s);

// Sound constant bounds of a symbolic expression under the assumptions;
// nullopt when no bound can be derived. `used` collects descriptions of
// the facts a successful derivation relied on.
std::optional<long long> const_upper_bound(const SymExpr& e, const Assumptions& asms,
                                           std::vector<std::string>* used = nullptr);
std::optional<long long> const_lower_bound(const SymExpr& e, const Assumptions& asms,
                                           std::vector<std::string>* used = nullptr);

// Sound, incomplete ordering proof for a vs b. Never claims an ordering
// that can fail under the assumptions; Unknown is always allowed.
CmpResult compare(const SymExpr& a, const SymExpr& b, const Assumptions& asms,
                  std::vector<std::string>* used = nullptr);

bool prove_le(const SymExpr& a, const SymExpr& b, const Assumptions& asms,
              std::vector<std::string>* used = nullptr);
bool prove_lt(const SymExpr& a, const SymExpr& b, const Assumptions& asms,
              std::vector<std::string>* used = nullptr);

SignFact sign_of(const SymExpr& e, const Assumptions& asms,
                 std::vector<std::string>* used = nullptr);
// Sign that holds for every value in the range.
SignFact sign_of_range(const SymRange& r, const Assumptions& asms,
                       std::vector<std::string>* used = nullptr);

// [min(lo):max(hi)] when the orderings are symbolically decidable,
// otherwise ⊥ (sound widening). One ⊥ operand yields ⊥.
SymRange range_union(const SymRange& a, const SymRange& b, const Assumptions& asms);

// outer.lo <= inner.lo && inner.hi <= outer.hi, proven.
bool range_covered(const SymRange& inner, const SymRange& outer, const Assumptions& asms,
                   std::vector<std::string>* used = nullptr);

}  // namespace idxpar
