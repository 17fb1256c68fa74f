#include "idxpar/subscript.hpp"

namespace idxpar {

SymExpr expr_to_sym(const Expr& e, const std::set<std::string>& loop_indexes) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
      return SymExpr::literal(e.value);
    case Expr::Kind::Ref: {
      if (e.subscripts.empty()) {
        if (loop_indexes.count(e.name)) return SymExpr::loop_index(e.name);
        return SymExpr::var(e.name);
      }
      if (e.subscripts.size() != 1) return SymExpr::bottom();
      return SymExpr::array_elem(e.name, expr_to_sym(*e.subscripts[0], loop_indexes));
    }
    case Expr::Kind::Binary: {
      SymExpr l = expr_to_sym(*e.lhs, loop_indexes);
      SymExpr r = expr_to_sym(*e.rhs, loop_indexes);
      switch (e.op) {
        case '+':
          return l + r;
        case '-':
          return l - r;
        case '*': {
          auto m = SymExpr::mul(l, r);
          return m ? *m : SymExpr::bottom();
        }
      }
      return SymExpr::bottom();
    }
  }
  return SymExpr::bottom();
}

std::optional<long long> classify_subscript(const Expr& e, const std::string& loop_index) {
  if (loop_index.empty()) return std::nullopt;
  SymExpr canon = expr_to_sym(e, {loop_index});
  if (canon.is_bottom()) return std::nullopt;
  if (canon.terms().size() != 1) return std::nullopt;
  const auto& [atom, coeff] = *canon.terms().begin();
  if (atom.kind != Atom::Kind::LoopIndex || atom.name != loop_index || coeff != 1)
    return std::nullopt;
  return canon.constant();
}

}  // namespace idxpar
