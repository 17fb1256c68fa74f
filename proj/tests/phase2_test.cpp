#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "idxpar/oracle.hpp"
#include "idxpar/parser.hpp"
#include "idxpar/phase2.hpp"
#include "idxpar/report.hpp"
#include "idxpar/validate.hpp"

using namespace idxpar;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string corpus_path(const char* rel) { return std::string(IDXPAR_SOURCE_DIR "/") + rel; }

Program parse_ok(const std::string& src) {
  ParseResult r = parse(src);
  for (const auto& d : r.diagnostics) INFO(d.line, ":", d.col, ": ", d.message);
  REQUIRE(r.ok());
  return std::move(*r.program);
}

std::vector<const FactEntry*> facts_on(const PipelineResult& res, const std::string& arr) {
  std::vector<const FactEntry*> out;
  for (const auto& f : res.facts.entries())
    if (f.array == arr) out.push_back(&f);
  return out;
}

}  // namespace

TEST_CASE("cg aggregation: the paper's fact set, with the sound wider bound") {
  Program p = parse_ok(read_file(corpus_path("corpus/cg.knl")));
  PipelineResult res = run_pipeline(p);

  auto rowsize = facts_on(res, "rowsize");
  REQUIRE(rowsize.size() == 1);
  CHECK(rowsize[0]->str() == "rowsize: [0:ROWLEN-1], [0:COLUMNLEN]");

  auto rowptr = facts_on(res, "rowptr");
  REQUIRE(rowptr.size() == 2);
  CHECK(rowptr[0]->str() == "rowptr: [0:0], [0:0]");
  CHECK(rowptr[0]->rule == "point-assign");
  CHECK(rowptr[1]->str() == "rowptr: [1:ROWLEN], Monotonic_inc");
  CHECK(rowptr[1]->rule == "recurrence");
  // the non-strict recurrence must not claim injectivity
  for (const FactEntry* f : rowptr) {
    CHECK(!(f->is_property && f->property == ArrayProperty::Injective));
    CHECK(!(f->is_property && f->property == ArrayProperty::StrictMonotonicInc));
  }
  // nothing about the packing arrays
  CHECK(facts_on(res, "column_number").empty());
  CHECK(facts_on(res, "value").empty());

  // scalar closed form of the packing loop: count over Λ
  for (const auto& rec : res.loops) {
    if (rec.index_var != "j" || !rec.scalar_effects.count("count")) continue;
    CHECK(rec.scalar_effects.at("count").str("count") == "[Λ:Λ+COLUMNLEN]");
  }
}

TEST_CASE("closed forms equal iterated application for literal trip counts") {
  for (long long n : {1, 2, 3, 5, 8, 13, 21, 34, 55, 64}) {
    // x advances by [0:1] per iteration (conditional increment)
    std::string src =
        "param q;\nint c[" + std::to_string(n) + "];\nint x, i;\n"
        "for (i = 0; i < " + std::to_string(n) + "; i++) {\n"
        "    if (c[i] != 0) {\n        x = x + 1;\n    }\n}\n";
    Program p = parse_ok(src);
    PipelineResult res = run_pipeline(p);
    const SymRange& eff = res.loops.at(0).scalar_effects.at("x");
    Valuation v;
    long long big_lambda = 17;
    v.big_lambda = [&](const std::string&) -> std::optional<long long> { return big_lambda; };
    REQUIRE(!eff.is_bottom());
    CHECK(eff.lo().eval(v) == big_lambda);       // all-zero path
    CHECK(eff.hi().eval(v) == big_lambda + n);   // all-ones path
    CAPTURE(n);

    // λ+i per iteration: x accumulates the loop index
    std::string tri =
        "int x, i;\n"
        "for (i = 0; i < " + std::to_string(n) + "; i++) {\n    x = x + i;\n}\n";
    Program pt = parse_ok(tri);
    PipelineResult rt = run_pipeline(pt);
    const SymRange& te = rt.loops.at(0).scalar_effects.at("x");
    REQUIRE(!te.is_bottom());
    long long expect = big_lambda + n * (n - 1) / 2;
    CHECK(te.lo().eval(v) == expect);
    CHECK(te.hi().eval(v) == expect);
    // and the oracle agrees exactly
    Machine m = interpret(pt, {}, {}, {}, {{"x", big_lambda}});
    CHECK(m.scalars.at("x") == expect);
  }
}

TEST_CASE("identity rule: x[i] = i yields the Identity fact") {
  Program p = parse_ok("param n;\nint x[n];\nint i;\nfor (i = 0; i < n; i++) {\n    x[i] = i;\n}\n");
  PipelineResult res = run_pipeline(p);
  auto facts = facts_on(res, "x");
  REQUIRE(facts.size() == 1);
  CHECK(facts[0]->str() == "x: [0:n-1], Identity");
  CHECK(facts[0]->rule == "identity");
  // the oracle confirms it
  Machine m = interpret(p, {{"n", 12}}, {});
  CHECK(!check_property(m.arrays.at("x"), {0, 11}, ArrayProperty::Identity).has_value());
}

TEST_CASE("strictly positive addend derives strict monotonicity plus injectivity") {
  Program p = parse_ok(read_file(corpus_path("corpus/fig1_injective.knl")));
  PipelineResult res = run_pipeline(p);
  auto facts = facts_on(res, "mt_to_id");
  REQUIRE(facts.size() == 3);
  CHECK(facts[1]->str() == "mt_to_id: [1:nelt], StrictMonotonic_inc");
  CHECK(facts[2]->str() == "mt_to_id: [0:nelt], Injective");
  CHECK(facts[2]->derived);
}

TEST_CASE("every injectivity fact is derived next to its strict base fact") {
  for (const char* rel : {"corpus/cg.knl", "corpus/fig1_injective.knl", "corpus/fig2a_rowstr.knl",
                          "corpus/fig2b_nzloc.knl", "corpus/fig3_jmatch.knl",
                          "corpus/fig4_blk.knl", "corpus/fig5_tree.knl",
                          "corpus/fig6_mt_to_id.knl"}) {
    Program p = parse_ok(read_file(corpus_path(rel)));
    PipelineResult res = run_pipeline(p);
    for (const auto& f : res.facts.entries()) {
      if (!f.is_property || f.property != ArrayProperty::Injective) continue;
      CAPTURE(rel);
      CHECK(f.derived);
      bool strict_sibling = false;
      for (const auto& g : res.facts.entries()) {
        strict_sibling |= g.array == f.array && g.origin == f.origin && g.is_property &&
                          (g.property == ArrayProperty::StrictMonotonicInc ||
                           g.property == ArrayProperty::StrictMonotonicDec);
      }
      CHECK(strict_sibling);
    }
  }
}

TEST_CASE("decreasing recurrences mirror the increasing ones") {
  Program p = parse_ok(
      "param n;\nint x[n + 1];\nint d[n + 1];\nint i;\n"
      "x[0] = 0;\n"
      "for (i = 1; i < n + 1; i++) {\n    x[i] = x[i-1] - 2;\n}\n"
      "d[0] = 0;\n"
      "for (i = 1; i < n + 1; i++) {\n    d[i] = d[i-1] - x[i];\n}\n");
  PipelineResult res = run_pipeline(p);
  auto xf = facts_on(res, "x");
  REQUIRE(xf.size() == 3);
  CHECK(xf[1]->str() == "x: [1:n], StrictMonotonic_dec");
  CHECK(xf[2]->property == ArrayProperty::Injective);
  // d's addend -x[i] has no covering value fact, so no property derives
  auto df = facts_on(res, "d");
  REQUIRE(df.size() == 1);  // the point fact only
  CHECK(!df[0]->is_property);
}

TEST_CASE("aggregation falls back to ⊥ for non-literal scalar steps") {
  // x grows by a parameter per iteration: R2 needs a literal step
  Program p = parse_ok(
      "param n, k;\nint x, i;\n"
      "for (i = 0; i < n; i++) {\n    x = x + k;\n}\n");
  PipelineResult res = run_pipeline(p);
  CHECK(res.loops.at(0).scalar_effects.at("x").is_bottom());
}

TEST_CASE("unprovably ordered must-ranges produce no facts") {
  // writes cover [1:n-1], provably nonempty only when n >= 2
  Program p = parse_ok(
      "param n;\nint x[n];\nint i;\n"
      "for (i = 1; i < n; i++) {\n    x[i] = 3;\n}\n");
  PipelineResult res = run_pipeline(p);
  CHECK(facts_on(res, "x").empty());
}

TEST_CASE("a later unanalyzable write kills every fact about the array") {
  Program p = parse_ok(
      "param n;\nint x[n];\nint b[n];\nint i;\n"
      "for (i = 0; i < n; i++) {\n    x[i] = 3;\n}\n"
      "for (i = 0; i < n; i++) {\n    x[b[i]] = 9;\n}\n");
  PipelineResult res = run_pipeline(p);
  CHECK(facts_on(res, "x").empty());
  // and the loop that did the damage still records a whole-array write
  CHECK(!res.loops.at(1).write_set.at("x").has_value());
}

TEST_CASE("an overlapping simple write kills, a disjoint one does not") {
  Program p = parse_ok(
      "param n;\nint x[2 * n + 2];\nint i;\n"
      "x[0] = 7;\n"
      "for (i = 1; i < n + 1; i++) {\n    x[i] = 1;\n}\n"          // disjoint from [0:0]
      "for (i = 0; i < n; i++) {\n    x[i + 1] = 2;\n}\n");        // overlaps [1:n]
  PipelineResult res = run_pipeline(p);
  auto xf = facts_on(res, "x");
  // surviving: the point fact x[0] and the last loop's value fact
  REQUIRE(xf.size() == 2);
  CHECK(xf[0]->str() == "x: [0:0], [7:7]");
  CHECK(xf[1]->str() == "x: [1:n], [2:2]");
}

TEST_CASE("collapsing an empty loop changes nothing") {
  Program p = parse_ok(
      "param n;\nint x[n];\nint i;\n"
      "x[0] = 5;\n"
      "for (i = 0; i < n; i++) { }\n");
  PipelineResult res = run_pipeline(p);
  REQUIRE(res.facts.entries().size() == 1);
  CHECK(res.facts.entries()[0].str() == "x: [0:0], [5:5]");
  CHECK(res.loops.size() == 1);
  CHECK(res.loops[0].facts.empty());
}

TEST_CASE("program without loops keeps only straight-line point facts") {
  Program p = parse_ok("param n;\nint x[n];\nint s;\ns = 4;\nx[1] = s + 2;\n");
  PipelineResult res = run_pipeline(p);
  REQUIRE(res.facts.entries().size() == 1);
  CHECK(res.facts.entries()[0].str() == "x: [1:1], [6:6]");
  CHECK(res.loops.empty());
  CHECK(res.top_scalars.at("s").str() == "[4:4]");
}

TEST_CASE("scalar effects compose across sequential collapsed loops") {
  Program p = parse_ok(
      "param n;\nint x, i;\n"
      "x = 5;\n"
      "for (i = 0; i < n; i++) {\n    x = x + 1;\n}\n"
      "for (i = 0; i < n; i++) {\n    x = x + 2;\n}\n");
  PipelineResult res = run_pipeline(p);
  CHECK(res.top_scalars.at("x").str() == "[3*n+5:3*n+5]");
}

TEST_CASE("trace contains the aggregation listing for the cg kernel") {
  Program p = parse_ok(read_file(corpus_path("corpus/cg.knl")));
  PipelineResult res = run_pipeline(p);
  std::string trace = render_trace(res);
  // inner packing loop, then the matrix scan, then the recurrence
  CHECK(trace.find("count: [λ:λ+1]; column_number: ⊥; value: ⊥") != std::string::npos);
  CHECK(trace.find("count: [Λ:Λ+COLUMNLEN]; column_number: ⊥; value: ⊥") != std::string::npos);
  CHECK(trace.find("count: [0:COLUMNLEN]; rowsize: [i], [0:COLUMNLEN]") != std::string::npos);
  CHECK(trace.find("rowsize: [0:ROWLEN-1], [0:COLUMNLEN]") != std::string::npos);
  CHECK(trace.find("rowptr: [i], rowptr[i-1]+[0:COLUMNLEN]") != std::string::npos);
  CHECK(trace.find("rowptr: [1:ROWLEN], Monotonic_inc") != std::string::npos);
  size_t pack = trace.find("count: [λ:λ+1]");
  size_t scan = trace.find("rowsize: [i],");
  size_t rec = trace.find("rowptr: [i],");
  CHECK(pack < scan);
  CHECK(scan < rec);
}

TEST_CASE("fact soundness: every stored fact holds on oracle runs") {
  for (const char* rel : {"corpus/cg.knl", "corpus/fig2b_nzloc.knl"}) {
    CAPTURE(rel);
    std::string path = corpus_path(rel);
    Program p = parse_ok(read_file(path));
    AnalysisOutput out = analyze_program(p);
    ShapeSpec shape = ShapeSpec::for_kernel_file(path);
    ValidationSummary sum = validate_analysis(rel, p, out, shape, 100, 2024);
    for (const auto& i : sum.issues) INFO(i.what);
    CHECK(sum.ok());
    CHECK(sum.facts_checked > 0);
  }
}

TEST_CASE("fig2a analogue derives the rowstr monotonicity fact") {
  Program p = parse_ok(read_file(corpus_path("corpus/fig2a_rowstr.knl")));
  PipelineResult res = run_pipeline(p);
  auto rf = facts_on(res, "rowstr");
  REQUIRE(rf.size() == 2);
  CHECK(rf[1]->str() == "rowstr: [1:nrows], Monotonic_inc");
  // the oracle confirms monotonicity on concrete builds
  ShapeSpec shape;
  for (uint64_t t = 0; t < 10; ++t) {
    GeneratedInput in = generate_input(p, shape, 77, t);
    Machine m = interpret(p, in.params, in.arrays);
    long long nrows = in.params.at("nrows");
    CHECK(!check_property(m.arrays.at("rowstr"), {1, nrows}, ArrayProperty::MonotonicInc)
               .has_value());
  }
}
