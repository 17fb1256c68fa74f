#include "idxpar/ast.hpp"

namespace idxpar {

ExprPtr Expr::clone() const {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->line = line;
  e->col = col;
  e->value = value;
  e->name = name;
  e->op = op;
  for (const auto& s : subscripts) e->subscripts.push_back(s->clone());
  if (lhs) e->lhs = lhs->clone();
  if (rhs) e->rhs = rhs->clone();
  return e;
}

ExprPtr Expr::lit(long long v, int line, int col) {
  auto e = std::make_unique<Expr>();
  e->kind = Kind::IntLit;
  e->value = v;
  e->line = line;
  e->col = col;
  return e;
}

ExprPtr Expr::ref(std::string n, int line, int col) {
  auto e = std::make_unique<Expr>();
  e->kind = Kind::Ref;
  e->name = std::move(n);
  e->line = line;
  e->col = col;
  return e;
}

ExprPtr Expr::binary(char op, ExprPtr l, ExprPtr r) {
  auto e = std::make_unique<Expr>();
  e->kind = Kind::Binary;
  e->op = op;
  e->line = l->line;
  e->col = l->col;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

bool Program::is_param(const std::string& n) const {
  for (const auto& p : params)
    if (p == n) return true;
  return false;
}

const ScalarDecl* Program::scalar(const std::string& n) const {
  for (const auto& s : scalars)
    if (s.name == n) return &s;
  return nullptr;
}

const ArrayDecl* Program::array(const std::string& n) const {
  for (const auto& a : arrays)
    if (a.name == n) return &a;
  return nullptr;
}

bool Program::declared(const std::string& n) const {
  return is_param(n) || scalar(n) != nullptr || array(n) != nullptr;
}

namespace {
void collect_loops(const std::vector<StmtPtr>& stmts, std::vector<const Stmt*>& out) {
  for (const auto& s : stmts) {
    switch (s->kind) {
      case Stmt::Kind::Assign:
        break;
      case Stmt::Kind::If:
        collect_loops(s->then_block, out);
        collect_loops(s->else_block, out);
        break;
      case Stmt::Kind::For:
        out.push_back(s.get());
        collect_loops(s->body, out);
        break;
    }
  }
}
}  // namespace

std::vector<const Stmt*> Program::all_loops() const {
  std::vector<const Stmt*> out;
  collect_loops(stmts, out);
  return out;
}

const Stmt* Program::find_loop(const std::string& id) const {
  for (const Stmt* l : all_loops())
    if (l->loop_id() == id) return l;
  return nullptr;
}

}  // namespace idxpar
