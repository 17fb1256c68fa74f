#include "idxpar/printer.hpp"

#include <set>
#include <sstream>

#include "idxpar/diag.hpp"

namespace idxpar {

namespace {

int precedence(char op) { return op == '*' ? 2 : 1; }

void emit_expr(std::ostream& os, const Expr& e, int parent_prec) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
      os << e.value;
      return;
    case Expr::Kind::Ref:
      os << e.name;
      for (const auto& s : e.subscripts) {
        os << '[';
        emit_expr(os, *s, 0);
        os << ']';
      }
      return;
    case Expr::Kind::Binary: {
      int prec = precedence(e.op);
      bool paren = prec < parent_prec;
      if (paren) os << '(';
      emit_expr(os, *e.lhs, prec);
      os << ' ' << e.op << ' ';
      // right operand needs a parenthesis when same-precedence and the
      // operator is not associative in the AST shape we rebuild
      emit_expr(os, *e.rhs, prec + 1);
      if (paren) os << ')';
      return;
    }
  }
}

class Printer {
 public:
  explicit Printer(const std::map<std::string, LoopAnnotation>* ann) : ann_(ann) {}

  std::string run(const Program& prog) {
    if (!prog.params.empty()) {
      os_ << "param ";
      for (size_t i = 0; i < prog.params.size(); ++i) {
        if (i) os_ << ", ";
        os_ << prog.params[i];
      }
      os_ << ";\n";
    }
    for (const auto& a : prog.arrays) {
      os_ << (a.type == BaseType::Int ? "int " : "float ") << a.name;
      for (const auto& e : a.extents) {
        os_ << '[';
        emit_expr(os_, *e, 0);
        os_ << ']';
      }
      os_ << ";\n";
    }
    if (!prog.scalars.empty()) {
      // group scalars by type, int first
      for (BaseType ty : {BaseType::Int, BaseType::Float}) {
        std::vector<const ScalarDecl*> group;
        for (const auto& s : prog.scalars)
          if (s.type == ty) group.push_back(&s);
        if (group.empty()) continue;
        os_ << (ty == BaseType::Int ? "int " : "float ");
        for (size_t i = 0; i < group.size(); ++i) {
          if (i) os_ << ", ";
          os_ << group[i]->name;
        }
        os_ << ";\n";
      }
    }
    os_ << '\n';
    emit_block(prog.stmts, 0);
    return os_.str();
  }

 private:
  std::ostringstream os_;
  const std::map<std::string, LoopAnnotation>* ann_;

  void indent(int depth) {
    for (int i = 0; i < depth; ++i) os_ << "    ";
  }

  void emit_block(const std::vector<StmtPtr>& stmts, int depth) {
    for (const auto& s : stmts) emit_stmt(*s, depth);
  }

  void emit_stmt(const Stmt& s, int depth) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        indent(depth);
        os_ << s.target.name;
        if (s.target.subscript) {
          os_ << '[';
          emit_expr(os_, *s.target.subscript, 0);
          os_ << ']';
        }
        os_ << " = ";
        emit_expr(os_, *s.rhs, 0);
        os_ << ";\n";
        return;
      }
      case Stmt::Kind::If: {
        indent(depth);
        os_ << "if (";
        emit_expr(os_, *s.cond.lhs, 0);
        os_ << ' ' << s.cond.op << ' ';
        emit_expr(os_, *s.cond.rhs, 0);
        os_ << ") {\n";
        emit_block(s.then_block, depth + 1);
        indent(depth);
        os_ << "}\n";
        if (!s.else_block.empty()) {
          indent(depth);
          os_ << "else {\n";
          emit_block(s.else_block, depth + 1);
          indent(depth);
          os_ << "}\n";
        }
        return;
      }
      case Stmt::Kind::For: {
        if (ann_ != nullptr) {
          auto it = ann_->find(s.loop_id());
          if (it != ann_->end() && it->second.parallel) {
            indent(depth);
            os_ << "#pragma omp parallel for";
            if (!it->second.private_scalars.empty()) {
              os_ << " private(";
              for (size_t i = 0; i < it->second.private_scalars.size(); ++i) {
                if (i) os_ << ',';
                os_ << it->second.private_scalars[i];
              }
              os_ << ')';
            }
            os_ << '\n';
          }
        }
        indent(depth);
        os_ << "for (" << s.index_var << " = ";
        emit_expr(os_, *s.lower, 0);
        os_ << "; " << s.index_var << " < ";
        emit_expr(os_, *s.upper, 0);
        os_ << "; " << s.index_var << "++) {\n";
        emit_block(s.body, depth + 1);
        indent(depth);
        os_ << "}\n";
        return;
      }
    }
  }
};

}  // namespace

std::string expr_to_source(const Expr& e) {
  std::ostringstream os;
  emit_expr(os, e, 0);
  return os.str();
}

std::string pretty_print(const Program& prog) {
  Printer p(nullptr);
  return p.run(prog);
}

std::string annotate(const Program& prog,
                     const std::map<std::string, LoopAnnotation>& verdicts) {
  std::set<std::string> known;
  for (const Stmt* l : prog.all_loops()) known.insert(l->loop_id());
  for (const auto& [id, ann] : verdicts) {
    if (!known.count(id)) throw InternalError("annotate: unknown loop id '" + id + "'");
  }
  Printer p(&verdicts);
  return p.run(prog);
}

}  // namespace idxpar
