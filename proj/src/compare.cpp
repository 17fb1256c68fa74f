#include "idxpar/compare.hpp"

namespace idxpar {

namespace {

constexpr int kMaxDepth = 16;

std::optional<long long> bound_impl(const SymExpr& e, bool want_upper, const Assumptions& asms,
                                    std::vector<std::string>* used, int depth);

bool prove_le_impl(const SymExpr& a, const SymExpr& b, const Assumptions& asms,
                   std::vector<std::string>* used, int depth) {
  auto ub = bound_impl(a - b, /*want_upper=*/true, asms, used, depth);
  return ub && *ub <= 0;
}

bool covered_impl(const SymRange& inner, const SymRange& outer, const Assumptions& asms,
                  std::vector<std::string>* used, int depth) {
  if (inner.is_bottom() || outer.is_bottom()) return false;
  return prove_le_impl(outer.lo(), inner.lo(), asms, used, depth) &&
         prove_le_impl(inner.hi(), outer.hi(), asms, used, depth);
}

// Replace the pair c*y[low] - c*y[high] (high = low + s, s > 0) by a sound
// constant contribution derived from a monotonicity fact on y.
struct PairElim {
  SymExpr rest;
  bool ok = false;
};

PairElim try_monotonic_pair(const SymExpr& e, bool want_upper, const Assumptions& asms,
                            std::vector<std::string>* used, int depth) {
  PairElim out;
  if (asms.facts == nullptr) return out;
  std::vector<std::pair<Atom, long long>> elems;
  for (const auto& [a, c] : e.terms())
    if (a.kind == Atom::Kind::ArrayElem) elems.emplace_back(a, c);

  for (size_t i = 0; i < elems.size(); ++i) {
    for (size_t j = i + 1; j < elems.size(); ++j) {
      const auto& [a1, c1] = elems[i];
      const auto& [a2, c2] = elems[j];
      if (a1.name != a2.name || c1 != -c2) continue;
      SymExpr diff = *a2.arg - *a1.arg;
      auto s = diff.as_literal();
      if (!s || *s == 0) continue;
      // orient: low + steps = high
      const Atom& low = *s > 0 ? a1 : a2;
      const Atom& high = *s > 0 ? a2 : a1;
      long long steps = *s > 0 ? *s : -*s;
      long long c = *s > 0 ? c1 : c2;  // coefficient of y[low]

      // pair = c*(y[low] - y[high]); pick a fact that bounds it
      bool need_inc = (c > 0) == want_upper;
      for (const FactEntry* f : asms.facts->for_array(low.name)) {
        if (!f->is_property) continue;
        bool inc = f->property == ArrayProperty::MonotonicInc ||
                   f->property == ArrayProperty::StrictMonotonicInc;
        bool dec = f->property == ArrayProperty::MonotonicDec ||
                   f->property == ArrayProperty::StrictMonotonicDec;
        if (!(inc || dec)) continue;
        if (inc != need_inc) continue;
        bool strict = f->property == ArrayProperty::StrictMonotonicInc ||
                      f->property == ArrayProperty::StrictMonotonicDec;
        // adjacent pairs (m-1, m) for m in [lowIdx+1 : highIdx] must lie
        // within the fact's index range
        SymRange needed(*low.arg + 1, *high.arg);
        std::vector<std::string> local;
        if (!covered_impl(needed, f->index_range, asms, &local, depth - 1)) continue;
        long long contrib = strict ? -(c > 0 ? c : -c) * steps : 0;
        if (!want_upper) contrib = -contrib;
        SymExpr rest = e + SymExpr::atom(low).scaled(-c) + SymExpr::atom(high).scaled(c) +
                       SymExpr::literal(contrib);
        if (used) {
          used->insert(used->end(), local.begin(), local.end());
          used->push_back(f->str());
        }
        out.rest = std::move(rest);
        out.ok = true;
        return out;
      }
    }
  }
  return out;
}

std::optional<long long> bound_impl(const SymExpr& e, bool want_upper, const Assumptions& asms,
                                    std::vector<std::string>* used, int depth) {
  if (depth <= 0 || e.is_bottom()) return std::nullopt;
  if (e.is_literal()) return e.constant();

  // 1. cancel monotonic array-element pairs
  if (PairElim pe = try_monotonic_pair(e, want_upper, asms, used, depth); pe.ok)
    return bound_impl(pe.rest, want_upper, asms, used, depth - 1);

  // 2..4. eliminate one atom; first applicable in term order
  for (const auto& [a, c] : e.terms()) {
    auto replace_with = [&](const SymExpr& repl) {
      return e + SymExpr::atom(a).scaled(-c) + repl.scaled(c);
    };
    bool pick_hi = (c > 0) == want_upper;

    if (a.kind == Atom::Kind::ArrayElem && asms.facts != nullptr) {
      // widen the element's index over the in-scope loop domains, so
      // coverage of i-1 under i ∈ [1:N] checks [0:N-1]
      std::vector<std::string> local;
      SymRange widened = SymRange::point(*a.arg);
      for (const auto& [iname, dom] : asms.index_domains)
        widened = widened.substitute_range(Atom::loop_index(iname), dom);
      const FactEntry* f =
          asms.facts->value_range_covering(a.name, widened, asms, &local);
      if (f != nullptr) {
        const SymExpr& repl = pick_hi ? f->value.hi() : f->value.lo();
        if (used) {
          used->insert(used->end(), local.begin(), local.end());
          used->push_back(f->str());
        }
        if (auto r = bound_impl(replace_with(repl), want_upper, asms, used, depth - 1)) return r;
      }
    }
    if (a.kind == Atom::Kind::LoopIndex) {
      auto it = asms.index_domains.find(a.name);
      if (it != asms.index_domains.end() && !it->second.is_bottom()) {
        const SymExpr& repl = pick_hi ? it->second.hi() : it->second.lo();
        if (auto r = bound_impl(replace_with(repl), want_upper, asms, used, depth - 1)) return r;
      }
    }
    if (a.kind == Atom::Kind::Var && asms.positive_params.count(a.name) && !pick_hi) {
      // p >= 1 bounds the term on the side where the coefficient shrinks it
      if (auto r = bound_impl(replace_with(SymExpr::literal(1)), want_upper, asms, used,
                              depth - 1))
        return r;
    }
    if (a.kind == Atom::Kind::TriSum && !pick_hi) {
      // n*(n-1)/2 >= 0 for integer n
      if (auto r = bound_impl(replace_with(SymExpr::literal(0)), want_upper, asms, used,
                              depth - 1))
        return r;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<long long> const_upper_bound(const SymExpr& e, const Assumptions& asms,
                                           std::vector<std::string>* used) {
  return bound_impl(e, true, asms, used, kMaxDepth);
}

std::optional<long long> const_lower_bound(const SymExpr& e, const Assumptions& asms,
                                           std::vector<std::string>* used) {
  return bound_impl(e, false, asms, used, kMaxDepth);
}

CmpResult compare(const SymExpr& a, const SymExpr& b, const Assumptions& asms,
                  std::vector<std::string>* used) {
  if (a.is_bottom() || b.is_bottom()) return CmpResult::Unknown;
  SymExpr d = a - b;
  if (auto v = d.as_literal()) {
    if (*v == 0) return CmpResult::ProvablyEQ;
    return *v < 0 ? CmpResult::ProvablyLT : CmpResult::ProvablyGT;
  }
  if (auto ub = const_upper_bound(d, asms, used)) {
    if (*ub < 0) return CmpResult::ProvablyLT;
    if (*ub == 0) {
      if (auto lb = const_lower_bound(d, asms, used); lb && *lb == 0)
        return CmpResult::ProvablyEQ;
      return CmpResult::ProvablyLE;
    }
  }
  if (auto lb = const_lower_bound(d, asms, used)) {
    if (*lb > 0) return CmpResult::ProvablyGT;
    if (*lb == 0) return CmpResult::ProvablyGE;
  }
  return CmpResult::Unknown;
}

bool prove_le(const SymExpr& a, const SymExpr& b, const Assumptions& asms,
              std::vector<std::string>* used) {
  auto ub = const_upper_bound(a - b, asms, used);
  return ub && *ub <= 0;
}

bool prove_lt(const SymExpr& a, const SymExpr& b, const Assumptions& asms,
              std::vector<std::string>* used) {
  auto ub = const_upper_bound(a - b, asms, used);
  return ub && *ub < 0;
}

SignFact sign_of(const SymExpr& e, const Assumptions& asms, std::vector<std::string>* used) {
  if (e.is_bottom()) return SignFact::Unknown;
  if (auto lb = const_lower_bound(e, asms, used)) {
    if (*lb >= 1) return SignFact::StrictlyPositive;
    if (*lb >= 0) return SignFact::NonNegative;
  }
  if (auto ub = const_upper_bound(e, asms, used)) {
    if (*ub <= -1) return SignFact::StrictlyNegative;
    if (*ub <= 0) return SignFact::NonPositive;
  }
  return SignFact::Unknown;
}

SignFact sign_of_range(const SymRange& r, const Assumptions& asms,
                       std::vector<std::string>* used) {
  if (r.is_bottom()) return SignFact::Unknown;
  if (auto lb = const_lower_bound(r.lo(), asms, used)) {
    if (*lb >= 1) return SignFact::StrictlyPositive;
    if (*lb >= 0) return SignFact::NonNegative;
  }
  if (auto ub = const_upper_bound(r.hi(), asms, used)) {
    if (*ub <= -1) return SignFact::StrictlyNegative;
    if (*ub <= 0) return SignFact::NonPositive;
  }
  return SignFact::Unknown;
}

SymRange range_union(const SymRange& a, const SymRange& b, const Assumptions& asms) {
  if (a.is_bottom() || b.is_bottom()) return SymRange::bottom();
  SymExpr lo, hi;
  if (prove_le(a.lo(), b.lo(), asms))
    lo = a.lo();
  else if (prove_le(b.lo(), a.lo(), asms))
    lo = b.lo();
  else
    return SymRange::bottom();
  if (prove_le(a.hi(), b.hi(), asms))
    hi = b.hi();
  else if (prove_le(b.hi(), a.hi(), asms))
    hi = a.hi();
  else
    return SymRange::bottom();
  return SymRange(std::move(lo), std::move(hi));
}

bool range_covered(const SymRange& inner, const SymRange& outer, const Assumptions& asms,
                   std::vector<std::string>* used) {
  return covered_impl(inner, outer, asms, used, kMaxDepth);
}

std::string to_string(CmpResult r) {
  switch (r) {
    case CmpResult::ProvablyLT: return "ProvablyLT";
    case CmpResult::ProvablyLE: return "ProvablyLE";
    case CmpResult::ProvablyEQ: return "ProvablyEQ";
    case CmpResult::ProvablyGE: return "ProvablyGE";
    case CmpResult::ProvablyGT: return "ProvablyGT";
    case CmpResult::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::string to_string(SignFact s) {
  switch (s) {
    case SignFact::NonNegative: return "NonNegative";
    case SignFact::NonPositive: return "NonPositive";
    case SignFact::StrictlyPositive: return "StrictlyPositive";
    case SignFact::StrictlyNegative: return "StrictlyNegative";
    case SignFact::Unknown: return "Unknown";
  }
  return "Unknown";
}

}  // namespace idxpar
