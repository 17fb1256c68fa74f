#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "idxpar/oracle.hpp"
#include "idxpar/parser.hpp"
#include "idxpar/printer.hpp"
#include "idxpar/subscript.hpp"

using namespace idxpar;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kCorpus[] = {
    "corpus/cg.knl",          "corpus/fig1_injective.knl", "corpus/fig2a_rowstr.knl",
    "corpus/fig2b_nzloc.knl", "corpus/fig3_jmatch.knl",    "corpus/fig4_blk.knl",
    "corpus/fig5_tree.knl",   "corpus/fig6_mt_to_id.knl",
};

std::string corpus_path(const char* rel) { return std::string(IDXPAR_SOURCE_DIR "/") + rel; }

Program parse_ok(const std::string& src) {
  ParseResult r = parse(src);
  for (const auto& d : r.diagnostics) INFO(d.line, ":", d.col, ": ", d.message);
  REQUIRE(r.ok());
  return std::move(*r.program);
}

}  // namespace

TEST_CASE("cg kernel parses into three top-level loops and one assignment") {
  Program p = parse_ok(read_file(corpus_path("corpus/cg.knl")));
  int loops = 0, assigns = 0;
  for (const auto& s : p.stmts) {
    if (s->kind == Stmt::Kind::For) ++loops;
    if (s->kind == Stmt::Kind::Assign) ++assigns;
  }
  CHECK(loops == 3);
  CHECK(assigns == 1);
  CHECK(p.all_loops().size() == 5);
  // the straight-line assignment is rowptr[0] = 0
  for (const auto& s : p.stmts) {
    if (s->kind != Stmt::Kind::Assign) continue;
    CHECK(s->target.name == "rowptr");
    REQUIRE(s->target.subscript != nullptr);
    CHECK(expr_to_source(*s->target.subscript) == "0");
    CHECK(expr_to_source(*s->rhs) == "0");
  }
}

TEST_CASE("empty loop body parses") {
  Program p = parse_ok("param n;\nint i;\nfor (i = 0; i < n; i++) { }\n");
  REQUIRE(p.stmts.size() == 1);
  CHECK(p.stmts[0]->kind == Stmt::Kind::For);
  CHECK(p.stmts[0]->body.empty());
}

TEST_CASE("post-increment in a subscript desugars to a follow-up assignment") {
  Program p = parse_ok(
      "param n;\n"
      "int column_number[n];\n"
      "int index, j;\n"
      "for (j = 0; j < n; j++) {\n"
      "    column_number[index++] = j;\n"
      "}\n");
  const auto& body = p.stmts[0]->body;
  REQUIRE(body.size() == 2);
  CHECK(body[0]->target.name == "column_number");
  CHECK(expr_to_source(*body[0]->target.subscript) == "index");
  CHECK(body[1]->target.name == "index");
  CHECK(body[1]->desugared_post_inc);
  CHECK(expr_to_source(*body[1]->rhs) == "index + 1");
}

TEST_CASE("statement-form x++ desugars in place") {
  Program p = parse_ok("int x;\nx++;\n");
  REQUIRE(p.stmts.size() == 1);
  CHECK(p.stmts[0]->target.name == "x");
  CHECK(expr_to_source(*p.stmts[0]->rhs) == "x + 1");
}

TEST_CASE("desugaring preserves semantics") {
  // the same packing loop written with ++ subscripts and spelled out
  std::string with_inc =
      "param n;\nint src[n];\nint dst[n];\nint pos, i;\n"
      "for (i = 0; i < n; i++) {\n"
      "    if (src[i] != 0) {\n        dst[pos++] = src[i];\n    }\n}\n";
  std::string spelled =
      "param n;\nint src[n];\nint dst[n];\nint pos, i;\n"
      "for (i = 0; i < n; i++) {\n"
      "    if (src[i] != 0) {\n        dst[pos] = src[i];\n        pos = pos + 1;\n    }\n}\n";
  Program a = parse_ok(with_inc);
  Program b = parse_ok(spelled);
  std::map<std::string, long long> params{{"n", 9}};
  std::map<std::string, std::vector<long long>> init{
      {"src", {3, 0, 1, 0, 0, 4, 1, 5, 9}}};
  Machine ma = interpret(a, params, init);
  Machine mb = interpret(b, params, init);
  CHECK(ma.arrays.at("dst") == mb.arrays.at("dst"));
  CHECK(ma.scalars.at("pos") == mb.scalars.at("pos"));
  CHECK(ma.arrays.at("dst") == std::vector<long long>{3, 1, 4, 1, 5, 9, 0, 0, 0});
}

TEST_CASE("unsupported constructs are rejected with positioned diagnostics") {
  struct Case {
    const char* src;
    const char* needle;
  };
  const Case cases[] = {
      {"int i;\nwhile (i < 10) { }\n", "'while' is not supported"},
      {"int x, y;\nx = f(y);\n", "function calls are not supported"},
      {"param n;\nint i;\nfor (i = 0; i < n; i = i + 2) { }\n", "stride"},
      {"param n;\nint i, x;\nfor (i = n; i > 0; i++) { }\n", "'<' or '<='"},
      {"param n;\nint i, x;\nfor (i = 0; i < n; i++) { x = i++; }\n",
       "only allowed inside subscripts"},
      {"int x;\nx = 1.5;\n", "floating-point literals"},
      {"param n;\nfloat m[n][n];\nint i;\nm[0][0] = 3;\n", "read position"},
      {"int x;\ny = 1;\n", "'y' is not declared"},
      {"param n;\nint i, x;\nfor (i = 0; i < x; i++) { x = x + 1; }\n", "modified in the loop"},
      {"param n;\nint i;\nfor (i = 0; i < n; i++) { i = 4; }\n", "written in loop body"},
      {"param n;\nint a[n];\nint i;\na = 4;\n", "without subscript"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.src);
    ParseResult r = parse(c.src);
    CHECK(!r.ok());
    CHECK(!r.program.has_value());
    bool found = false;
    for (const auto& d : r.diagnostics) {
      if (d.message.find(c.needle) != std::string::npos) {
        found = true;
        CHECK(d.line > 0);
        CHECK(d.col > 0);
      }
    }
    CAPTURE(r.diagnostics.empty() ? "" : r.diagnostics[0].message);
    CHECK(found);
  }
}

TEST_CASE("multiple violations produce multiple diagnostics") {
  ParseResult r = parse("int x;\nwhile (x) { }\ny = 1;\nz = 2;\n");
  CHECK(r.diagnostics.size() >= 2);
}

TEST_CASE("<= loop bounds normalize to < with upper+1") {
  Program p = parse_ok("param n;\nint i;\nfor (i = 1; i <= n; i++) { }\n");
  CHECK(expr_to_source(*p.stmts[0]->upper) == "n + 1");
  // normalized form survives the round trip
  Program q = parse_ok(pretty_print(p));
  CHECK(expr_to_source(*q.stmts[0]->upper) == "n + 1");
}

TEST_CASE("classify_subscript recognizes i+k and nothing else") {
  auto sub_of = [](const std::string& expr_text) {
    std::string src = "param n;\nint a[n];\nint i, index;\nfor (i = 0; i < n; i++) { a[" +
                      expr_text + "] = 0; }\n";
    ParseResult r = parse(src);
    REQUIRE(r.ok());
    Program p = std::move(*r.program);
    const Expr& sub = *p.stmts[0]->body[0]->target.subscript;
    return classify_subscript(sub, "i");
  };
  CHECK(sub_of("i") == 0);
  CHECK(sub_of("i - 1") == -1);
  CHECK(sub_of("i + 7") == 7);
  CHECK(sub_of("2 + i - 2") == 0);       // constant folding
  CHECK(sub_of("2 * i - i + 3") == 3);   // folds back to i+3
  CHECK(!sub_of("index").has_value());   // not the loop index
  CHECK(!sub_of("2 * i").has_value());
  CHECK(!sub_of("0 - i").has_value());
  CHECK(!sub_of("n - i").has_value());
  CHECK(!sub_of("a[i]").has_value());
}

TEST_CASE("pretty-print round trip is stable on the corpus") {
  for (const char* rel : kCorpus) {
    CAPTURE(rel);
    Program p1 = parse_ok(read_file(corpus_path(rel)));
    std::string printed = pretty_print(p1);
    Program p2 = parse_ok(printed);
    CHECK(pretty_print(p2) == printed);
  }
}

TEST_CASE("annotate inserts pragmas above parallel loops only") {
  Program p = parse_ok(read_file(corpus_path("corpus/cg.knl")));
  // find the last top-level loop (the product loop)
  const Stmt* candidate = nullptr;
  for (const auto& s : p.stmts)
    if (s->kind == Stmt::Kind::For) candidate = s.get();
  REQUIRE(candidate != nullptr);

  std::map<std::string, LoopAnnotation> ann;
  ann[candidate->loop_id()] = {true, {"j", "j1"}};
  std::string out = annotate(p, ann);
  CHECK(out.find("#pragma omp parallel for private(j,j1)\nfor (i = 0; i < ROWLEN + 1;") !=
        std::string::npos);
  // exactly one pragma line
  CHECK(out.find("#pragma") == out.rfind("#pragma"));

  // all-serial annotations leave the pretty-printed text untouched
  std::map<std::string, LoopAnnotation> none;
  for (const Stmt* l : p.all_loops()) none[l->loop_id()] = {false, {}};
  CHECK(annotate(p, none) == pretty_print(p));

  // annotated output still parses (pragma lines are trivia)
  Program q = parse_ok(out);
  CHECK(pretty_print(q) == pretty_print(p));

  std::map<std::string, LoopAnnotation> bogus;
  bogus["loop@9999"] = {true, {}};
  CHECK_THROWS_AS(annotate(p, bogus), InternalError);
}

TEST_CASE("fig2a outer loop annotation carries private(k)") {
  Program p = parse_ok(read_file(corpus_path("corpus/fig2a_rowstr.knl")));
  const Stmt* outer = nullptr;
  for (const auto& s : p.stmts)
    if (s->kind == Stmt::Kind::For) outer = s.get();
  std::map<std::string, LoopAnnotation> ann;
  ann[outer->loop_id()] = {true, {"k"}};
  std::string out = annotate(p, ann);
  CHECK(out.find("#pragma omp parallel for private(k)\nfor (j = 0; j < nrows;") !=
        std::string::npos);
}
