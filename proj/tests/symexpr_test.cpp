#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "idxpar/compare.hpp"
#include "idxpar/facts.hpp"
#include "idxpar/symexpr.hpp"

using namespace idxpar;

namespace {

SymExpr V(const std::string& n) { return SymExpr::var(n); }
SymExpr L(long long v) { return SymExpr::literal(v); }

Assumptions params_ge_1(std::initializer_list<std::string> ps) {
  Assumptions a;
  for (const auto& p : ps) a.positive_params.insert(p);
  return a;
}

}  // namespace

TEST_CASE("canonical linear form folds constants and merges terms") {
  SymExpr e = V("n") + L(2) + V("n") - L(1);
  CHECK(e.str() == "2*n+1");
  CHECK((V("n") - V("n")).as_literal() == 0);
  CHECK((L(3) + L(4)).as_literal() == 7);
  // 2*i - i folds to i
  SymExpr i = SymExpr::loop_index("i");
  CHECK((i.scaled(2) - i).str() == "i");
}

TEST_CASE("bottom is absorbing") {
  SymExpr b = SymExpr::bottom();
  CHECK((b + L(1)).is_bottom());
  CHECK((V("x") - b).is_bottom());
  CHECK(b.scaled(5).is_bottom());
  CHECK(SymExpr::array_elem("a", b).is_bottom());
  CHECK(SymRange(b, L(3)).is_bottom());
  SymRange r = SymRange::lit(0, 1);
  CHECK(SymRange::add(r, SymRange::bottom()).is_bottom());
}

TEST_CASE("substitution is simultaneous and simplifies") {
  // λ+1 with λ -> Λ+3 gives Λ+4
  SymExpr e = SymExpr::lambda("count") + 1;
  SymExpr s =
      e.substitute(subst_one(Atom::Kind::Lambda, "count", SymExpr::big_lambda("count") + 3));
  CHECK(s.str("count") == "Λ+4");
  // substituting ⊥ poisons
  SymExpr t = V("x").substitute(subst_one(Atom::Kind::Var, "x", SymExpr::bottom()));
  CHECK(t.is_bottom());
  // substitution reaches into array-element subscripts
  SymExpr a = SymExpr::array_elem("rowptr", SymExpr::loop_index("i") - 1);
  SymExpr a2 = a.substitute(subst_one(Atom::Kind::LoopIndex, "i", SymExpr::loop_index("i") + 1));
  CHECK(a2.str() == "rowptr[i]");
}

TEST_CASE("rendering matches the range notation") {
  CHECK(SymRange(SymExpr::lambda("count"), SymExpr::lambda("count") + 1).str("count") ==
        "[λ:λ+1]");
  CHECK(SymRange::bottom().str() == "⊥");
  CHECK((SymExpr::big_lambda("count") + V("COLUMNLEN")).str("count") == "Λ+COLUMNLEN");
  CHECK((V("ROWLEN") - 1).str() == "ROWLEN-1");
  CHECK(SymExpr::array_elem("rowptr", SymExpr::loop_index("i") - 1).str() == "rowptr[i-1]");
  CHECK(SymExpr::tri_sum(V("n")).str() == "n*(n-1)/2");
}

TEST_CASE("range arithmetic") {
  CHECK(SymRange::add(SymRange::lit(1, 2), SymRange::lit(3, 4)) == SymRange::lit(4, 6));
  // [λ:λ] + [0:1] = [λ:λ+1]
  SymRange lam = SymRange::point(SymExpr::lambda("count"));
  CHECK(SymRange::add(lam, SymRange::lit(0, 1)).str("count") == "[λ:λ+1]");
  // rowptr[i-1] + [0:COLUMNLEN-1]
  SymRange atom = SymRange::point(SymExpr::array_elem("rowptr", SymExpr::loop_index("i") - 1));
  SymRange sum = SymRange::add(atom, SymRange(L(0), V("COLUMNLEN") - 1));
  CHECK(sum.str() == "[rowptr[i-1]:rowptr[i-1]+COLUMNLEN-1]");
  // scaling by a negative literal swaps bounds
  CHECK(SymRange::scaled(SymRange::lit(1, 2), -3) == SymRange::lit(-6, -3));
  // only literal factors multiply
  CHECK(SymRange::mul(SymRange::point(V("n")), SymRange::point(V("m"))).is_bottom());
  CHECK(SymRange::mul(SymRange::lit(7, 7), SymRange::lit(1, 2)) == SymRange::lit(7, 14));
}

TEST_CASE("range union widens to ⊥ when undecidable") {
  Assumptions asms = params_ge_1({"n", "m"});
  CHECK(range_union(SymRange::lit(0, 1), SymRange::lit(0, 1), asms) == SymRange::lit(0, 1));
  // [λ:λ] ∪ [λ+1:λ+1] = [λ:λ+1]
  SymRange a = SymRange::point(SymExpr::lambda("count"));
  SymRange b = SymRange::point(SymExpr::lambda("count") + 1);
  CHECK(range_union(a, b, asms).str("count") == "[λ:λ+1]");
  // unrelated params do not order
  SymRange c(L(0), V("n"));
  SymRange d = SymRange::point(V("m"));
  CHECK(range_union(c, d, asms).is_bottom());
  CHECK(range_union(SymRange::bottom(), a, asms).is_bottom());
}

TEST_CASE("compare decides literal and param-positivity queries") {
  Assumptions asms = params_ge_1({"COLUMNLEN", "n", "m"});
  CHECK(compare(L(0), V("COLUMNLEN") - 1, asms) == CmpResult::ProvablyLE);
  CHECK(compare(L(1), V("COLUMNLEN") + 1, asms) == CmpResult::ProvablyLT);
  CHECK(compare(V("n"), V("m"), asms) == CmpResult::Unknown);
  CHECK(compare(V("n"), V("n"), asms) == CmpResult::ProvablyEQ);
  CHECK(compare(L(3), L(3), asms) == CmpResult::ProvablyEQ);
  CHECK(compare(V("n") + 1, L(1), asms) == CmpResult::ProvablyGT);
}

TEST_CASE("compare uses monotonicity facts for same-base element pairs") {
  ProgramFacts facts;
  facts.add(FactEntry::prop("rowptr", SymRange(L(1), V("ROWLEN")), ArrayProperty::MonotonicInc));
  Assumptions asms = params_ge_1({"ROWLEN"});
  asms.facts = &facts;
  asms.index_domains["i"] = SymRange(L(1), V("ROWLEN") - 1);

  SymExpr ri = SymExpr::array_elem("rowptr", SymExpr::loop_index("i"));
  SymExpr ri1 = SymExpr::array_elem("rowptr", SymExpr::loop_index("i") + 1);
  std::vector<std::string> used;
  CHECK(compare(ri, ri1, asms, &used) == CmpResult::ProvablyLE);
  bool cited = false;
  for (const auto& u : used) cited = cited || u.find("Monotonic_inc") != std::string::npos;
  CHECK(cited);

  // outside the covered index range nothing is claimed
  Assumptions far = asms;
  far.index_domains["i"] = SymRange(V("ROWLEN") + 5, V("ROWLEN") + 9);
  CHECK(compare(ri, ri1, far) == CmpResult::Unknown);

  // strict monotonicity counts one per step
  ProgramFacts strict;
  strict.add(FactEntry::prop("p", SymRange(L(1), V("n")), ArrayProperty::StrictMonotonicInc));
  Assumptions s2 = params_ge_1({"n"});
  s2.facts = &strict;
  s2.index_domains["i"] = SymRange(L(1), V("n") - 3);
  SymExpr pi = SymExpr::array_elem("p", SymExpr::loop_index("i"));
  SymExpr pi3 = SymExpr::array_elem("p", SymExpr::loop_index("i") + 3);
  CHECK(compare(pi + 2, pi3, s2) == CmpResult::ProvablyLT);
}

TEST_CASE("compare uses point and value-range facts") {
  ProgramFacts facts;
  facts.add(FactEntry::value_range("rowptr", SymRange::lit(0, 0), SymRange::lit(0, 0)));
  facts.add(FactEntry::value_range("rowsize", SymRange(L(0), V("ROWLEN") - 1),
                                   SymRange(L(0), V("COLUMNLEN"))));
  Assumptions asms = params_ge_1({"ROWLEN", "COLUMNLEN"});
  asms.facts = &facts;

  SymExpr r0 = SymExpr::array_elem("rowptr", L(0));
  CHECK(compare(r0 - 1, L(0), asms) == CmpResult::ProvablyLT);
  CHECK(compare(r0, L(0), asms) == CmpResult::ProvablyEQ);

  asms.index_domains["i"] = SymRange(L(1), V("ROWLEN"));
  SymExpr rs = SymExpr::array_elem("rowsize", SymExpr::loop_index("i") - 1);
  CHECK(sign_of(rs, asms) == SignFact::NonNegative);
}

TEST_CASE("sign_of") {
  Assumptions asms = params_ge_1({"n"});
  CHECK(sign_of(L(7), asms) == SignFact::StrictlyPositive);
  CHECK(sign_of(L(0), asms) == SignFact::NonNegative);
  CHECK(sign_of(L(-2), asms) == SignFact::StrictlyNegative);
  CHECK(sign_of(V("m"), asms) == SignFact::Unknown);
  CHECK(sign_of(V("n"), asms) == SignFact::StrictlyPositive);
  CHECK(sign_of(V("n").negated(), asms) == SignFact::StrictlyNegative);
  CHECK(sign_of_range(SymRange(L(0), V("n")), asms) == SignFact::NonNegative);
  CHECK(sign_of_range(SymRange(L(1), L(2)), asms) == SignFact::StrictlyPositive);
  CHECK(sign_of_range(SymRange::bottom(), asms) == SignFact::Unknown);
}

TEST_CASE("canonicalization is idempotent under rebuilds") {
  std::mt19937_64 rng(42);
  std::vector<SymExpr> pool = {L(0),
                               L(1),
                               L(-3),
                               V("n"),
                               V("m"),
                               SymExpr::loop_index("i"),
                               SymExpr::lambda("x"),
                               SymExpr::big_lambda("x"),
                               SymExpr::array_elem("a", SymExpr::loop_index("i") - 1)};
  for (int trial = 0; trial < 500; ++trial) {
    SymExpr e = pool[rng() % pool.size()];
    for (int step = 0; step < 6; ++step) {
      switch (rng() % 4) {
        case 0: e = e + pool[rng() % pool.size()]; break;
        case 1: e = e - pool[rng() % pool.size()]; break;
        case 2: e = e.scaled(static_cast<long long>(rng() % 7) - 3); break;
        case 3: e = e + L(static_cast<long long>(rng() % 11) - 5); break;
      }
    }
    // rebuilding from the canonical parts yields the identical expression
    SymExpr rebuilt = e.is_bottom() ? SymExpr::bottom() : L(e.constant());
    for (const auto& [a, c] : e.terms()) rebuilt = rebuilt + SymExpr::atom(a).scaled(c);
    CHECK(e == rebuilt);
    CHECK(e.str() == rebuilt.str());
  }
}

TEST_CASE("compare soundness against random valuations") {
  // random monotonic arrays; every Provably* answer on element pairs must
  // agree with the concrete values
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    long long n = 2 + static_cast<long long>(rng() % 40);
    bool strict = rng() % 2 == 0;
    std::vector<long long> data(n);
    data[0] = static_cast<long long>(rng() % 5);
    for (long long i = 1; i < n; ++i)
      data[i] = data[i - 1] + (strict ? 1 : 0) + static_cast<long long>(rng() % 3);

    ProgramFacts facts;
    facts.add(FactEntry::prop("y", SymRange(L(1), L(n - 1)),
                              strict ? ArrayProperty::StrictMonotonicInc
                                     : ArrayProperty::MonotonicInc));
    Assumptions asms;
    asms.facts = &facts;
    long long lo_dom = 0, hi_dom = n - 2;
    asms.index_domains["i"] = SymRange(L(lo_dom), L(hi_dom));

    SymExpr yi = SymExpr::array_elem("y", SymExpr::loop_index("i"));
    SymExpr yi1 = SymExpr::array_elem("y", SymExpr::loop_index("i") + 1);
    long long off = static_cast<long long>(rng() % 3) - 1;
    CmpResult res = compare(yi + off, yi1, asms);

    long long iv = lo_dom + static_cast<long long>(rng() % (hi_dom - lo_dom + 1));
    Valuation v;
    v.index = [&](const std::string&) -> std::optional<long long> { return iv; };
    v.array = [&](const std::string&, long long idx) -> std::optional<long long> {
      if (idx < 0 || idx >= n) return std::nullopt;
      return data[idx];
    };
    auto lhs = (yi + off).eval(v);
    auto rhs = yi1.eval(v);
    REQUIRE(lhs.has_value());
    REQUIRE(rhs.has_value());
    switch (res) {
      case CmpResult::ProvablyLT: CHECK(*lhs < *rhs); break;
      case CmpResult::ProvablyLE: CHECK(*lhs <= *rhs); break;
      case CmpResult::ProvablyEQ: CHECK(*lhs == *rhs); break;
      case CmpResult::ProvablyGE: CHECK(*lhs >= *rhs); break;
      case CmpResult::ProvablyGT: CHECK(*lhs > *rhs); break;
      case CmpResult::Unknown: break;
    }
  }
}

TEST_CASE("range union soundness against random valuations") {
  std::mt19937_64 rng(11);
  Assumptions asms;
  for (int trial = 0; trial < 1000; ++trial) {
    long long a = static_cast<long long>(rng() % 21) - 10;
    long long b = a + static_cast<long long>(rng() % 10);
    long long c = static_cast<long long>(rng() % 21) - 10;
    long long d = c + static_cast<long long>(rng() % 10);
    SymRange u = range_union(SymRange::lit(a, b), SymRange::lit(c, d), asms);
    REQUIRE(!u.is_bottom());
    long long v = a + static_cast<long long>(rng() % (b - a + 1));
    CHECK(*u.lo().as_literal() <= v);
    CHECK(v <= *u.hi().as_literal());
  }
}

TEST_CASE("substitute_range respects coefficient signs") {
  // [Λ-i : Λ+2i] over i in [0:9]
  SymRange r(SymExpr::big_lambda("x") - SymExpr::loop_index("i"),
             SymExpr::big_lambda("x") + SymExpr::loop_index("i").scaled(2));
  SymRange s = r.substitute_range(Atom::loop_index("i"), SymRange::lit(0, 9));
  CHECK(s.lo().str("x") == "Λ-9");
  CHECK(s.hi().str("x") == "Λ+18");
  // nested occurrences only accept point replacements
  SymRange nested = SymRange::point(SymExpr::array_elem("a", SymExpr::loop_index("k")));
  CHECK(nested.substitute_range(Atom::loop_index("k"), SymRange::lit(0, 5)).is_bottom());
  CHECK(nested.substitute_range(Atom::loop_index("k"), SymRange::lit(3, 3)).str() ==
        "[a[3]:a[3]]");
}

TEST_CASE("concrete evaluation binds every atom kind") {
  Valuation v;
  v.var = [](const std::string& n) -> std::optional<long long> {
    return n == "N" ? std::optional<long long>(10) : std::nullopt;
  };
  v.index = [](const std::string&) -> std::optional<long long> { return 3; };
  v.lambda = [](const std::string&) -> std::optional<long long> { return 5; };
  v.array = [](const std::string&, long long i) -> std::optional<long long> { return 100 + i; };
  SymExpr e = V("N") + SymExpr::loop_index("i").scaled(2) + SymExpr::lambda("x") +
              SymExpr::array_elem("a", SymExpr::loop_index("i") - 1);
  CHECK(e.eval(v) == 10 + 6 + 5 + 102);
  CHECK(SymExpr::tri_sum(V("N")).eval(v) == 45);
  CHECK(!V("M").eval(v).has_value());
  CHECK(!SymExpr::bottom().eval(v).has_value());
}
