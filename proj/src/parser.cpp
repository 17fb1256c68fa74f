#include "idxpar/parser.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "idxpar/lexer.hpp"

namespace idxpar {

namespace {

// Names post-incremented inside the expression currently being parsed, in
// textual order. The parser appends `x = x + 1` statements after the
// enclosing statement, preserving C post-increment semantics.
using PendingIncs = std::vector<std::pair<std::string, Token>>;

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags)
      : toks_(std::move(toks)), diags_(diags) {}

  Program parse_program() {
    Program prog;
    while (at_decl_start()) parse_decl(prog);
    while (!cur().is(Token::Kind::End)) {
      if (at_decl_start()) {
        error(cur(), "declarations must precede statements");
        parse_decl(prog);
        continue;
      }
      auto stmts = parse_stmt();
      for (auto& s : stmts) prog.stmts.push_back(std::move(s));
    }
    return prog;
  }

 private:
  std::vector<Token> toks_;
  std::vector<Diagnostic>& diags_;
  size_t pos_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(size_t off = 1) const {
    return toks_[std::min(pos_ + off, toks_.size() - 1)];
  }
  void bump() {
    if (!cur().is(Token::Kind::End)) ++pos_;
  }

  void error(const Token& t, const std::string& msg) { diags_.push_back({t.line, t.col, msg}); }

  bool expect_punct(std::string_view p) {
    if (cur().is_punct(p)) {
      bump();
      return true;
    }
    error(cur(), "expected '" + std::string(p) + "', found '" + describe(cur()) + "'");
    return false;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Token::Kind::End:
        return "end of input";
      case Token::Kind::Int:
        return t.text;
      default:
        return t.text;
    }
  }

  // Skip forward to a statement boundary so one error does not cascade:
  // past the next `;`, past one balanced block, or to an enclosing `}`.
  void sync() {
    while (!cur().is(Token::Kind::End)) {
      if (cur().is_punct(";")) {
        bump();
        return;
      }
      if (cur().is_punct("{")) {
        int depth = 0;
        while (!cur().is(Token::Kind::End)) {
          if (cur().is_punct("{")) ++depth;
          if (cur().is_punct("}")) {
            --depth;
            if (depth == 0) {
              bump();
              return;
            }
          }
          bump();
        }
        return;
      }
      if (cur().is_punct("}")) return;
      bump();
    }
  }

  bool at_decl_start() const {
    return cur().is(Token::Kind::KwParam) || cur().is(Token::Kind::KwInt) ||
           cur().is(Token::Kind::KwFloat);
  }

  void parse_decl(Program& prog) {
    if (cur().is(Token::Kind::KwParam)) {
      bump();
      do {
        if (!cur().is(Token::Kind::Ident)) {
          error(cur(), "expected parameter name");
          sync();
          return;
        }
        prog.params.push_back(cur().text);
        bump();
      } while (cur().is_punct(",") && (bump(), true));
      expect_punct(";");
      return;
    }
    BaseType ty = cur().is(Token::Kind::KwFloat) ? BaseType::Float : BaseType::Int;
    bump();
    do {
      if (!cur().is(Token::Kind::Ident)) {
        error(cur(), "expected variable name");
        sync();
        return;
      }
      Token nameTok = cur();
      bump();
      std::vector<ExprPtr> extents;
      while (cur().is_punct("[")) {
        bump();
        extents.push_back(parse_expr(nullptr, /*allow_inc=*/false));
        expect_punct("]");
      }
      if (extents.empty()) {
        prog.scalars.push_back({nameTok.text, ty, nameTok.line});
      } else {
        if (extents.size() > 2)
          error(nameTok, "arrays of rank greater than 2 are not supported");
        ArrayDecl d;
        d.name = nameTok.text;
        d.type = ty;
        d.extents = std::move(extents);
        d.line = nameTok.line;
        prog.arrays.push_back(std::move(d));
      }
    } while (cur().is_punct(",") && (bump(), true));
    expect_punct(";");
  }

  std::vector<StmtPtr> parse_block() {
    std::vector<StmtPtr> out;
    if (!expect_punct("{")) return out;
    while (!cur().is_punct("}") && !cur().is(Token::Kind::End)) {
      auto stmts = parse_stmt();
      for (auto& s : stmts) out.push_back(std::move(s));
    }
    expect_punct("}");
    return out;
  }

  // One source statement may desugar into several AST statements.
  std::vector<StmtPtr> parse_stmt() {
    std::vector<StmtPtr> out;
    const Token& t = cur();

    if (t.is(Token::Kind::Ident)) {
      static const std::set<std::string> kRejected = {
          "while", "do", "switch", "return", "break", "continue", "goto"};
      if (kRejected.count(t.text)) {
        error(t, "'" + t.text + "' is not supported; only assignments, if/else and "
                 "canonical for loops are allowed");
        sync();
        return out;
      }
      parse_assign_like(out);
      return out;
    }
    if (t.is(Token::Kind::KwIf)) {
      out.push_back(parse_if());
      return out;
    }
    if (t.is(Token::Kind::KwFor)) {
      out.push_back(parse_for());
      return out;
    }
    error(t, "expected statement, found '" + describe(t) + "'");
    sync();
    return out;
  }

  void parse_assign_like(std::vector<StmtPtr>& out) {
    Token nameTok = cur();
    bump();

    if (cur().is_punct("(")) {
      error(nameTok, "function calls are not supported");
      sync();
      return;
    }

    // `x++;` statement form
    if (cur().is_punct("++")) {
      bump();
      expect_punct(";");
      out.push_back(make_incr(nameTok));
      return;
    }

    PendingIncs incs;
    LValue lv;
    lv.name = nameTok.text;
    lv.line = nameTok.line;
    lv.col = nameTok.col;
    if (cur().is_punct("[")) {
      bump();
      lv.subscript = parse_expr(&incs, /*allow_inc=*/true);  // subscript position
      expect_punct("]");
      if (cur().is_punct("[")) {
        error(cur(), "rank-2 array '" + nameTok.text + "' may appear only in read position");
        sync();
        return;
      }
    }
    if (!cur().is_punct("=")) {
      error(cur(), "expected '=' in assignment");
      sync();
      return;
    }
    bump();
    ExprPtr rhs = parse_expr(&incs, /*allow_inc=*/false);
    expect_punct(";");

    auto st = std::make_unique<Stmt>();
    st->kind = Stmt::Kind::Assign;
    st->line = nameTok.line;
    st->col = nameTok.col;
    st->target = std::move(lv);
    st->rhs = std::move(rhs);
    out.push_back(std::move(st));
    for (const auto& [name, tok] : incs) out.push_back(make_incr(tok));
  }

  StmtPtr make_incr(const Token& nameTok) {
    auto st = std::make_unique<Stmt>();
    st->kind = Stmt::Kind::Assign;
    st->line = nameTok.line;
    st->col = nameTok.col;
    st->target.name = nameTok.text;
    st->target.line = nameTok.line;
    st->target.col = nameTok.col;
    st->rhs = Expr::binary('+', Expr::ref(nameTok.text, nameTok.line, nameTok.col),
                           Expr::lit(1, nameTok.line, nameTok.col));
    st->desugared_post_inc = true;
    return st;
  }

  StmtPtr parse_if() {
    Token ifTok = cur();
    bump();
    expect_punct("(");
    auto st = std::make_unique<Stmt>();
    st->kind = Stmt::Kind::If;
    st->line = ifTok.line;
    st->col = ifTok.col;
    st->cond = parse_cond();
    expect_punct(")");
    if (!cur().is_punct("{")) {
      error(cur(), "if/else bodies must be brace-enclosed blocks");
      sync();
      return st;
    }
    st->then_block = parse_block();
    if (cur().is(Token::Kind::KwElse)) {
      bump();
      if (cur().is(Token::Kind::KwIf)) {
        // `else if` chains as a nested if inside the else block
        st->else_block.push_back(parse_if());
      } else if (cur().is_punct("{")) {
        st->else_block = parse_block();
      } else {
        error(cur(), "if/else bodies must be brace-enclosed blocks");
        sync();
      }
    }
    return st;
  }

  Cond parse_cond() {
    Cond c;
    c.lhs = parse_expr(nullptr, /*allow_inc=*/false);
    c.line = c.lhs->line;
    c.col = c.lhs->col;
    static const char* kRel[] = {"==", "!=", "<=", ">=", "<", ">"};
    for (const char* r : kRel) {
      if (cur().is_punct(r)) {
        c.op = r;
        bump();
        c.rhs = parse_expr(nullptr, /*allow_inc=*/false);
        return c;
      }
    }
    error(cur(), "expected comparison operator in condition");
    c.op = "!=";
    c.rhs = Expr::lit(0);
    return c;
  }

  StmtPtr parse_for() {
    Token forTok = cur();
    bump();
    expect_punct("(");
    auto st = std::make_unique<Stmt>();
    st->kind = Stmt::Kind::For;
    st->line = forTok.line;
    st->col = forTok.col;

    if (!cur().is(Token::Kind::Ident)) {
      error(cur(), "expected loop index variable");
      sync();
      return st;
    }
    st->index_var = cur().text;
    bump();
    expect_punct("=");
    st->lower = parse_expr(nullptr, /*allow_inc=*/false);
    expect_punct(";");

    if (!cur().is(Token::Kind::Ident) || cur().text != st->index_var) {
      error(cur(), "loop condition must test the loop index variable");
      sync();
      return st;
    }
    bump();
    bool le = false;
    if (cur().is_punct("<")) {
      bump();
    } else if (cur().is_punct("<=")) {
      le = true;
      bump();
    } else {
      error(cur(), "loop condition must use '<' or '<=' (unit-stride ascending loops only)");
      sync();
      return st;
    }
    ExprPtr upper = parse_expr(nullptr, /*allow_inc=*/false);
    if (le) upper = Expr::binary('+', std::move(upper), Expr::lit(1));
    st->upper = std::move(upper);
    expect_punct(";");

    if (!cur().is(Token::Kind::Ident) || cur().text != st->index_var ||
        !peek().is_punct("++")) {
      error(cur(), "loop increment must be '" + st->index_var + "++' (stride must be +1)");
      sync();
      return st;
    }
    bump();
    bump();
    expect_punct(")");
    if (!cur().is_punct("{")) {
      error(cur(), "for bodies must be brace-enclosed blocks");
      sync();
      return st;
    }
    st->body = parse_block();
    return st;
  }

  // expr := term (('+'|'-') term)* ; term := factor ('*' factor)*
  ExprPtr parse_expr(PendingIncs* incs, bool allow_inc) {
    ExprPtr e = parse_term(incs, allow_inc);
    while (cur().is_punct("+") || cur().is_punct("-")) {
      char op = cur().text[0];
      bump();
      ExprPtr r = parse_term(incs, allow_inc);
      e = Expr::binary(op, std::move(e), std::move(r));
    }
    return e;
  }

  ExprPtr parse_term(PendingIncs* incs, bool allow_inc) {
    ExprPtr e = parse_factor(incs, allow_inc);
    while (cur().is_punct("*")) {
      bump();
      ExprPtr r = parse_factor(incs, allow_inc);
      e = Expr::binary('*', std::move(e), std::move(r));
    }
    return e;
  }

  ExprPtr parse_factor(PendingIncs* incs, bool allow_inc) {
    const Token t = cur();
    if (t.is(Token::Kind::Int)) {
      bump();
      return Expr::lit(t.value, t.line, t.col);
    }
    if (t.is_punct("-")) {
      bump();
      ExprPtr inner = parse_factor(incs, allow_inc);
      if (inner->kind == Expr::Kind::IntLit) {
        inner->value = -inner->value;
        return inner;
      }
      return Expr::binary('-', Expr::lit(0, t.line, t.col), std::move(inner));
    }
    if (t.is_punct("(")) {
      bump();
      ExprPtr e = parse_expr(incs, allow_inc);
      expect_punct(")");
      return e;
    }
    if (t.is(Token::Kind::Ident)) {
      bump();
      if (cur().is_punct("(")) {
        error(t, "function calls are not supported");
        sync();
        return Expr::lit(0, t.line, t.col);
      }
      ExprPtr e = Expr::ref(t.text, t.line, t.col);
      while (cur().is_punct("[")) {
        bump();
        // subscript contents are an increment-legal position
        e->subscripts.push_back(parse_expr(incs, /*allow_inc=*/incs != nullptr));
        expect_punct("]");
      }
      if (cur().is_punct("++")) {
        Token incTok = cur();
        bump();
        if (!e->subscripts.empty()) {
          error(incTok, "post-increment applies to scalars only");
        } else if (!allow_inc || incs == nullptr) {
          error(incTok, "post-increment is only allowed inside subscripts or as a statement");
        } else {
          incs->emplace_back(t.text, t);
        }
      }
      return e;
    }
    error(t, "expected expression, found '" + describe(t) + "'");
    bump();
    return Expr::lit(0, t.line, t.col);
  }
};

// ---------------------------------------------------------------------------
// Post-parse validation of the kernel subset.

class Validator {
 public:
  Validator(const Program& prog, std::vector<Diagnostic>& diags)
      : prog_(prog), diags_(diags) {}

  void run() {
    check_decls();
    for (const auto& s : prog_.stmts) check_stmt(*s);
  }

 private:
  const Program& prog_;
  std::vector<Diagnostic>& diags_;
  std::vector<const Stmt*> loop_stack_;

  void error(int line, int col, const std::string& msg) { diags_.push_back({line, col, msg}); }

  void check_decls() {
    std::set<std::string> seen;
    auto dup = [&](const std::string& n, int line) {
      if (!seen.insert(n).second) error(line, 1, "duplicate declaration of '" + n + "'");
    };
    for (const auto& p : prog_.params) dup(p, 1);
    for (const auto& s : prog_.scalars) dup(s.name, s.line);
    for (const auto& a : prog_.arrays) {
      dup(a.name, a.line);
      for (const auto& e : a.extents) check_expr(*e, /*in_subscript=*/false);
    }
  }

  void check_stmt(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        if (prog_.is_param(s.target.name)) {
          error(s.line, s.col, "parameter '" + s.target.name + "' cannot be assigned");
        } else if (const ArrayDecl* a = prog_.array(s.target.name)) {
          if (!s.target.subscript)
            error(s.line, s.col, "array '" + s.target.name + "' assigned without subscript");
          else if (a->extents.size() == 2)
            error(s.line, s.col,
                  "rank-2 array '" + s.target.name + "' may appear only in read position");
          for (const Stmt* l : loop_stack_)
            if (l->index_var == s.target.name)
              error(s.line, s.col, "loop index '" + s.target.name + "' written in loop body");
        } else if (!prog_.scalar(s.target.name)) {
          error(s.line, s.col, "'" + s.target.name + "' is not declared");
        } else {
          for (const Stmt* l : loop_stack_)
            if (l->index_var == s.target.name && !is_own_header_write(s))
              error(s.line, s.col, "loop index '" + s.target.name + "' written in loop body");
        }
        if (s.target.subscript) check_expr(*s.target.subscript, true);
        check_expr(*s.rhs, false);
        break;
      }
      case Stmt::Kind::If: {
        check_expr(*s.cond.lhs, false);
        check_expr(*s.cond.rhs, false);
        for (const auto& t : s.then_block) check_stmt(*t);
        for (const auto& t : s.else_block) check_stmt(*t);
        break;
      }
      case Stmt::Kind::For: {
        if (!s.lower || !s.upper) break;  // parse already failed
        if (!prog_.scalar(s.index_var))
          error(s.line, s.col, "loop index '" + s.index_var + "' is not declared");
        else if (prog_.scalar(s.index_var)->type != BaseType::Int)
          error(s.line, s.col, "loop index '" + s.index_var + "' must be int");
        for (const Stmt* l : loop_stack_)
          if (l->index_var == s.index_var)
            error(s.line, s.col, "loop index '" + s.index_var + "' reused by enclosing loop");
        check_expr(*s.lower, false);
        check_expr(*s.upper, false);
        check_bound_invariance(s);
        loop_stack_.push_back(&s);
        for (const auto& t : s.body) check_stmt(*t);
        loop_stack_.pop_back();
        break;
      }
    }
  }

  static bool is_own_header_write(const Stmt&) { return false; }

  // Upper bound must not read anything the body writes.
  void check_bound_invariance(const Stmt& loop) {
    std::set<std::string> written;
    collect_writes(loop.body, written);
    std::set<std::string> bound_reads;
    collect_reads(*loop.upper, bound_reads);
    collect_reads(*loop.lower, bound_reads);
    for (const auto& n : bound_reads) {
      if (written.count(n))
        error(loop.line, loop.col,
              "loop bound reads '" + n + "', which is modified in the loop body");
    }
    if (written.count(loop.index_var))
      error(loop.line, loop.col, "loop index '" + loop.index_var + "' written in loop body");
  }

  static void collect_writes(const std::vector<StmtPtr>& stmts, std::set<std::string>& out) {
    for (const auto& s : stmts) {
      switch (s->kind) {
        case Stmt::Kind::Assign:
          out.insert(s->target.name);
          break;
        case Stmt::Kind::If:
          collect_writes(s->then_block, out);
          collect_writes(s->else_block, out);
          break;
        case Stmt::Kind::For:
          out.insert(s->index_var);
          collect_writes(s->body, out);
          break;
      }
    }
  }

  static void collect_reads(const Expr& e, std::set<std::string>& out) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        break;
      case Expr::Kind::Ref:
        out.insert(e.name);
        for (const auto& s : e.subscripts) collect_reads(*s, out);
        break;
      case Expr::Kind::Binary:
        collect_reads(*e.lhs, out);
        collect_reads(*e.rhs, out);
        break;
    }
  }

  void check_expr(const Expr& e, bool in_subscript) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return;
      case Expr::Kind::Ref: {
        if (!prog_.declared(e.name)) {
          error(e.line, e.col, "'" + e.name + "' is not declared");
          return;
        }
        const ArrayDecl* a = prog_.array(e.name);
        if (a == nullptr && !e.subscripts.empty())
          error(e.line, e.col, "'" + e.name + "' is not an array");
        if (a != nullptr && e.subscripts.empty())
          error(e.line, e.col, "array '" + e.name + "' used without subscript");
        if (a != nullptr && !e.subscripts.empty() && e.subscripts.size() != a->extents.size())
          error(e.line, e.col, "array '" + e.name + "' has rank " +
                                   std::to_string(a->extents.size()));
        for (const auto& s : e.subscripts) check_expr(*s, true);
        return;
      }
      case Expr::Kind::Binary:
        check_expr(*e.lhs, in_subscript);
        check_expr(*e.rhs, in_subscript);
        return;
    }
  }
};

}  // namespace

ParseResult parse(std::string_view source) {
  ParseResult res;
  auto toks = lex(source, res.diagnostics);
  Parser p(std::move(toks), res.diagnostics);
  Program prog = p.parse_program();
  // the validator also runs over partial programs, so every violation is
  // reported in one pass
  Validator v(prog, res.diagnostics);
  v.run();
  std::stable_sort(res.diagnostics.begin(), res.diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     return std::tie(a.line, a.col) < std::tie(b.line, b.col);
                   });
  if (res.diagnostics.empty()) res.program = std::move(prog);
  return res;
}

}  // namespace idxpar
